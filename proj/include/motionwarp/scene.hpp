// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "motionwarp/core.hpp"

namespace motionwarp::toy {

using Rgb = std::array<std::uint8_t, 3>;

enum class Shape { Rect, Circle, Wedge };

/// How an entity is positioned when a scene is compiled.
enum class Placement { Row, Bottom, TopRight };

/// A registered sprite the toy scene compiler knows how to draw. Each
/// entity has a unique color so that frames can be segmented by color key.
struct EntitySpec {
    std::string name;
    std::vector<std::string> aliases;
    Rgb color;
    Shape shape;
    double width_frac;   // of the image side
    double height_frac;
    Placement placement = Placement::Row;
    std::optional<Direction> facing;  // wedge sprites point this way
};

const std::vector<EntitySpec>& entity_registry();

/// First registered entity whose name or alias occurs as whole words in
/// `phrase` (case-insensitive). Ties break on earliest occurrence.
const EntitySpec* match_entity(std::string_view phrase);

struct PlacedEntity {
    const EntitySpec* spec = nullptr;
    int x = 0;  // top-left, pixels
    int y = 0;
    int width = 0;
    int height = 0;
    Mask ground_truth;  // image resolution
};

struct Scene {
    FrameImage image;
    Rgb background{};
    std::string background_name;
    std::vector<PlacedEntity> entities;

    const PlacedEntity* find(std::string_view phrase) const;
};

/// Compiles prompt keywords into a raster: a background color plus every
/// registered entity mentioned, laid out left to right in order of mention.
/// Sprite boxes are aligned to `align` pixels. Throws Error(SceneCompile)
/// listing the known entities when the prompt names none, unless
/// `allow_empty` is set.
Scene compile_scene(std::string_view prompt, int size, int align, bool allow_empty = false);

std::string known_entities();

}  // namespace motionwarp::toy
