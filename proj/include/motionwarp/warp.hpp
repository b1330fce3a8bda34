// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "motionwarp/core.hpp"

namespace motionwarp {

enum class Fill { Edge, Zero };

/// out(x, y) = in(x - dx, y - dy). Vacated cells replicate the nearest edge
/// (Fill::Edge) or become 0. Throws Error(Range) unless |dx| < W and |dy| < H.
LatentGrid shift(const LatentGrid& grid, Delta delta, Fill fill = Fill::Edge);

/// Same translation for masks; vacated cells are always false.
Mask shift(const Mask& mask, Delta delta);

struct Composition {
    LatentGrid latent;
    std::vector<Mask> masks;
    /// Characters whose mask was non-empty before this step and empty after.
    std::vector<bool> exited;
};

/// One step of disentangled motion control.
///
/// For each character i (in list order, later ones painting over earlier):
///   m~_i   = shift(m_i, -delta_i)
///   region = shift(m_i | m~_i, delta_i)
///   out[region] = shift(prev_latent, delta_i)[region]
///   m_i'   = shift(m_i, delta_i)
/// Every cell no region claims keeps base_latent, so the background stays
/// pinned to the first frame. A character with an empty mask claims nothing.
Composition compose_next_frame(const LatentGrid& prev_latent, std::span<const Mask> prev_masks,
                               std::span<const Delta> deltas, const LatentGrid& base_latent);

/// out = fg * m + bg * (1 - m), evaluated as a per-cell select.
LatentGrid fuse_foreground_background(const LatentGrid& fg, const LatentGrid& bg, const Mask& fg_mask);

/// Name of the synthetic character that carries the inverted camera motion.
inline constexpr std::string_view kBackgroundSceneName = "background_scene";

/// Camera-follow mode: the protagonist is pinned (all motionless) and a
/// leading "background_scene" character receives the opposite of its
/// per-frame directions. Throws Error(NotFound) if the protagonist is absent.
MotionPlan apply_camera_mode(const MotionPlan& plan, std::string_view protagonist);

}  // namespace motionwarp
