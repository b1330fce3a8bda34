// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "motionwarp/error.hpp"

namespace motionwarp {

// ---------------------------------------------------------------------------
// Direction algebra
// ---------------------------------------------------------------------------

enum class Direction : std::uint8_t {
    Motionless,
    Left,
    Right,
    Up,
    Down,
    LeftUp,
    LeftDown,
    RightUp,
    RightDown,
};

inline constexpr std::array<Direction, 9> kAllDirections = {
    Direction::Motionless, Direction::Left,     Direction::Right,
    Direction::Up,         Direction::Down,     Direction::LeftUp,
    Direction::LeftDown,   Direction::RightUp,  Direction::RightDown,
};

/// Canonical snake_case label, e.g. "right_down".
std::string_view to_string(Direction d);

/// Label as the LLM vocabulary spells it, e.g. "right down".
std::string_view to_spoken(Direction d);

/// Strict parse of a canonical label. Throws VocabularyError otherwise.
Direction parse_direction(std::string_view label);

/// Lenient parse used on model output: case, '_', '-' and runs of
/// whitespace are ignored, and diagonal word order may be swapped
/// ("Down Right" -> right_down). Returns nullopt if nothing matches.
std::optional<Direction> match_direction(std::string_view text);

Direction opposite(Direction d);

/// Per-frame displacement in grid cells. x grows rightward, y downward.
struct Delta {
    int dx = 0;
    int dy = 0;

    friend bool operator==(const Delta&, const Delta&) = default;
    Delta operator-() const { return {-dx, -dy}; }
};

/// Diagonals move sigma on both axes (lattice offsets, no sqrt(2) scaling).
Delta direction_to_delta(Direction d, int sigma);

// ---------------------------------------------------------------------------
// Motion plans
// ---------------------------------------------------------------------------

struct CharacterPlan {
    std::string name;
    std::string phrase;                 // segmentation prompt
    std::vector<Direction> directions;  // one per transition k = 1..F-1

    bool is_motionless() const;
    friend bool operator==(const CharacterPlan&, const CharacterPlan&) = default;
};

/// Reserved name of the implicit (c+1)-th character.
inline constexpr std::string_view kBackgroundName = "background";

struct MotionPlan {
    int frame_count = 0;
    std::vector<CharacterPlan> characters;

    /// Throws Error(Schema) on duplicate names, an explicit background
    /// entry, or a direction list whose length is not frame_count - 1.
    void validate() const;

    const CharacterPlan* find(std::string_view name) const;

    friend bool operator==(const MotionPlan&, const MotionPlan&) = default;
};

std::string plan_to_json(const MotionPlan& plan);
MotionPlan plan_from_json(std::string_view text);

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

enum class Resolution : std::uint8_t { Image, Latent };

/// Boolean occupancy grid, row-major.
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, Resolution resolution = Resolution::Latent);

    int width() const { return m_width; }
    int height() const { return m_height; }
    Resolution resolution() const { return m_resolution; }

    bool at(int x, int y) const { return m_cells[index(x, y)] != 0; }
    void set(int x, int y, bool value) { m_cells[index(x, y)] = value ? 1 : 0; }

    /// Out-of-range coordinates read as false.
    bool get_or_false(int x, int y) const;

    std::size_t count() const;
    bool empty() const { return count() == 0; }

    bool same_shape(const Mask& other) const {
        return m_width == other.m_width && m_height == other.m_height &&
               m_resolution == other.m_resolution;
    }

    Mask operator|(const Mask& other) const;
    Mask operator&(const Mask& other) const;
    Mask operator~() const;

    const std::vector<std::uint8_t>& cells() const { return m_cells; }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(m_width) +
               static_cast<std::size_t>(x);
    }

    int m_width = 0;
    int m_height = 0;
    Resolution m_resolution = Resolution::Latent;
    std::vector<std::uint8_t> m_cells;
};

/// Channel-major feature tensor (C x H x W).
class LatentGrid {
public:
    LatentGrid() = default;
    LatentGrid(int channels, int height, int width, float fill = 0.0f);

    int channels() const { return m_channels; }
    int height() const { return m_height; }
    int width() const { return m_width; }
    std::size_t size() const { return m_values.size(); }

    float& at(int c, int y, int x) { return m_values[index(c, y, x)]; }
    float at(int c, int y, int x) const { return m_values[index(c, y, x)]; }

    std::vector<float>& values() { return m_values; }
    const std::vector<float>& values() const { return m_values; }

    bool same_shape(const LatentGrid& other) const {
        return m_channels == other.m_channels && m_height == other.m_height &&
               m_width == other.m_width;
    }
    bool all_finite() const;

    friend bool operator==(const LatentGrid&, const LatentGrid&) = default;

private:
    std::size_t index(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * static_cast<std::size_t>(m_height) +
                static_cast<std::size_t>(y)) *
                   static_cast<std::size_t>(m_width) +
               static_cast<std::size_t>(x);
    }

    int m_channels = 0;
    int m_height = 0;
    int m_width = 0;
    std::vector<float> m_values;
};

/// 8-bit interleaved RGB raster.
struct FrameImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    FrameImage() = default;
    FrameImage(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t* pixel(int x, int y) { return &rgb[(static_cast<std::size_t>(y) * width + x) * 3]; }
    const std::uint8_t* pixel(int x, int y) const {
        return &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
    }

    friend bool operator==(const FrameImage&, const FrameImage&) = default;
};

// ---------------------------------------------------------------------------
// Diffusion schedule
// ---------------------------------------------------------------------------

/// Timesteps run 0..T with alpha_bar(0) == 1. betas[t-1] is beta_t.
struct DiffusionSchedule {
    int T = 0;
    std::vector<double> betas;
    std::vector<double> alpha_bars;  // alpha_bars[t], t = 0..T
    int t1 = 0;
    int t2 = 0;

    static DiffusionSchedule from_betas(std::vector<double> betas, int t1, int t2);
    static DiffusionSchedule linear(int T, double beta_start, double beta_end,
                                    double t1_frac, double t2_frac);

    double beta(int t) const { return betas.at(static_cast<std::size_t>(t - 1)); }
    double alpha(int t) const { return 1.0 - beta(t); }
    double alpha_bar(int t) const { return alpha_bars.at(static_cast<std::size_t>(t)); }

    /// Throws Error(Precondition) on betas outside (0,1), a decreasing
    /// schedule, or sandwich points violating 0 <= t2 < t1 < T.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Pipeline configuration and anchor state
// ---------------------------------------------------------------------------

enum class BackendKind : std::uint8_t { Toy, Bridge };
enum class LlmMode : std::uint8_t { Fallback, Replay, Http };

struct PipelineConfig {
    int frame_count = 8;
    int image_size = 512;
    int latent_factor = 8;
    int sigma = 4;
    double gamma = 0.6;
    std::uint64_t seed = 42;
    BackendKind backend = BackendKind::Toy;
    std::string bridge_url = "http://127.0.0.1:8765";
    LlmMode llm = LlmMode::Fallback;
    std::string llm_url = "http://127.0.0.1:8000";
    std::string llm_model = "gpt-4";
    std::string llm_replay_dir;
    std::string lexicon_path;
    double segmentation_confidence = 0.3;
    double attention_mix = 0.15;  // weight of the anchored attention term in the toy denoiser
    int attention_patch = 4;
    int threads = 1;

    int T = 50;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    double t1_frac = 0.4;
    double t2_frac = 0.25;

    int latent_size() const { return image_size / latent_factor; }
    DiffusionSchedule schedule() const;

    /// Throws Error(Usage) when an invariant is broken.
    void validate() const;
};

std::string to_string(BackendKind kind);
std::string to_string(LlmMode mode);

/// Anchor frame for cross-frame attention plus the masks captured at it
/// (one per tracked character).
struct AnchorState {
    int anchor = 0;
    std::vector<Mask> anchor_masks;
};

}  // namespace motionwarp
