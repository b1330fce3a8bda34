// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/warp.hpp"

#include <algorithm>
#include <cstdlib>

namespace motionwarp {

namespace {

void check_delta(Delta delta, int width, int height) {
    if (std::abs(delta.dx) >= std::max(width, 1) || std::abs(delta.dy) >= std::max(height, 1)) {
        throw Error(ErrorKind::Range, "shift (" + std::to_string(delta.dx) + "," + std::to_string(delta.dy) +
                                          ") exceeds the grid");
    }
}

}  // namespace

LatentGrid shift(const LatentGrid& grid, Delta delta, Fill fill) {
    check_delta(delta, grid.width(), grid.height());
    LatentGrid out(grid.channels(), grid.height(), grid.width());
    const int w = grid.width();
    const int h = grid.height();
    for (int c = 0; c < grid.channels(); ++c) {
        for (int y = 0; y < h; ++y) {
            const int sy = y - delta.dy;
            for (int x = 0; x < w; ++x) {
                const int sx = x - delta.dx;
                const bool inside = sx >= 0 && sx < w && sy >= 0 && sy < h;
                if (inside) {
                    out.at(c, y, x) = grid.at(c, sy, sx);
                } else if (fill == Fill::Edge) {
                    out.at(c, y, x) = grid.at(c, std::clamp(sy, 0, h - 1), std::clamp(sx, 0, w - 1));
                } else {
                    out.at(c, y, x) = 0.0f;
                }
            }
        }
    }
    return out;
}

Mask shift(const Mask& mask, Delta delta) {
    check_delta(delta, mask.width(), mask.height());
    Mask out(mask.width(), mask.height(), mask.resolution());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            out.set(x, y, mask.get_or_false(x - delta.dx, y - delta.dy));
        }
    }
    return out;
}

Composition compose_next_frame(const LatentGrid& prev_latent, std::span<const Mask> prev_masks,
                               std::span<const Delta> deltas, const LatentGrid& base_latent) {
    if (!prev_latent.same_shape(base_latent)) {
        throw Error(ErrorKind::Shape, "previous and base latents differ in shape");
    }
    if (prev_masks.size() != deltas.size()) {
        throw Error(ErrorKind::Shape, "one delta per character mask is required");
    }
    for (const auto& m : prev_masks) {
        if (m.width() != prev_latent.width() || m.height() != prev_latent.height() ||
            m.resolution() != Resolution::Latent) {
            throw Error(ErrorKind::Shape, "character masks must be latent-resolution and match the grid");
        }
    }

    Composition result;
    result.latent = base_latent;
    result.masks.reserve(prev_masks.size());
    result.exited.reserve(prev_masks.size());

    const int w = prev_latent.width();
    const int h = prev_latent.height();
    for (std::size_t i = 0; i < prev_masks.size(); ++i) {
        const Mask& m = prev_masks[i];
        const Delta d = deltas[i];
        const bool was_present = !m.empty();
        if (!was_present) {
            result.masks.push_back(m);
            result.exited.push_back(false);
            continue;
        }
        const Mask trace = shift(m, -d);
        const Mask region = shift(m | trace, d);
        const LatentGrid warped = shift(prev_latent, d, Fill::Edge);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!region.at(x, y)) {
                    continue;
                }
                for (int c = 0; c < prev_latent.channels(); ++c) {
                    result.latent.at(c, y, x) = warped.at(c, y, x);
                }
            }
        }
        Mask next = shift(m, d);
        result.exited.push_back(next.empty());
        result.masks.push_back(std::move(next));
    }
    return result;
}

LatentGrid fuse_foreground_background(const LatentGrid& fg, const LatentGrid& bg, const Mask& fg_mask) {
    if (!fg.same_shape(bg) || fg_mask.width() != fg.width() || fg_mask.height() != fg.height()) {
        throw Error(ErrorKind::Shape, "fusion inputs differ in shape");
    }
    LatentGrid out = bg;
    for (int c = 0; c < fg.channels(); ++c) {
        for (int y = 0; y < fg.height(); ++y) {
            for (int x = 0; x < fg.width(); ++x) {
                if (fg_mask.at(x, y)) {
                    out.at(c, y, x) = fg.at(c, y, x);
                }
            }
        }
    }
    return out;
}

MotionPlan apply_camera_mode(const MotionPlan& plan, std::string_view protagonist) {
    const CharacterPlan* hero = plan.find(protagonist);
    if (hero == nullptr) {
        throw Error(ErrorKind::NotFound, "protagonist '" + std::string(protagonist) + "' is not in the plan");
    }
    CharacterPlan scene;
    scene.name = std::string(kBackgroundSceneName);
    scene.phrase = std::string(kBackgroundSceneName);
    scene.directions.reserve(hero->directions.size());
    for (Direction d : hero->directions) {
        scene.directions.push_back(opposite(d));
    }

    MotionPlan out;
    out.frame_count = plan.frame_count;
    out.characters.push_back(std::move(scene));
    for (const auto& ch : plan.characters) {
        CharacterPlan copy = ch;
        if (copy.name == protagonist) {
            std::fill(copy.directions.begin(), copy.directions.end(), Direction::Motionless);
        }
        out.characters.push_back(std::move(copy));
    }
    return out;
}

}  // namespace motionwarp
