// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/scheduler.hpp"

#include <algorithm>
#include <cmath>

#include "motionwarp/segmenter.hpp"

namespace motionwarp {

Matrix attention_weights(const Matrix& q, const Matrix& k, int d) {
    if (d <= 0 || q.cols != d || k.cols != d) {
        throw Error(ErrorKind::Shape, "attention operands disagree on the feature dimension");
    }
    if (k.rows == 0) {
        throw Error(ErrorKind::Shape, "attention needs at least one key");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    Matrix w(q.rows, k.rows);
    for (int i = 0; i < q.rows; ++i) {
        double max_logit = -INFINITY;
        for (int j = 0; j < k.rows; ++j) {
            double dot = 0.0;
            for (int c = 0; c < d; ++c) {
                dot += q(i, c) * k(j, c);
            }
            w(i, j) = dot * scale;
            max_logit = std::max(max_logit, w(i, j));
        }
        double sum = 0.0;
        for (int j = 0; j < k.rows; ++j) {
            w(i, j) = std::exp(w(i, j) - max_logit);
            sum += w(i, j);
        }
        for (int j = 0; j < k.rows; ++j) {
            w(i, j) /= sum;
        }
    }
    return w;
}

Matrix cross_frame_attention(const Matrix& q, const Matrix& k, const Matrix& v, int d) {
    if (k.rows != v.rows) {
        throw Error(ErrorKind::Shape, "keys and values must have equal row counts");
    }
    const Matrix w = attention_weights(q, k, d);
    Matrix out(q.rows, v.cols);
    for (int i = 0; i < q.rows; ++i) {
        for (int j = 0; j < v.rows; ++j) {
            const double wij = w(i, j);
            for (int c = 0; c < v.cols; ++c) {
                out(i, c) += wij * v(j, c);
            }
        }
    }
    return out;
}

Matrix latent_to_tokens(const LatentGrid& grid, int patch) {
    if (patch < 1 || grid.width() % patch != 0 || grid.height() % patch != 0) {
        throw Error(ErrorKind::Shape, "patch size must divide the latent");
    }
    const int pw = grid.width() / patch;
    const int ph = grid.height() / patch;
    Matrix tokens(pw * ph, grid.channels() * patch * patch);
    for (int by = 0; by < ph; ++by) {
        for (int bx = 0; bx < pw; ++bx) {
            const int row = by * pw + bx;
            int col = 0;
            for (int c = 0; c < grid.channels(); ++c) {
                for (int y = 0; y < patch; ++y) {
                    for (int x = 0; x < patch; ++x) {
                        tokens(row, col++) = grid.at(c, by * patch + y, bx * patch + x);
                    }
                }
            }
        }
    }
    return tokens;
}

LatentGrid tokens_to_latent(const Matrix& tokens, int channels, int height, int width, int patch) {
    const int pw = width / patch;
    const int ph = height / patch;
    if (tokens.rows != pw * ph || tokens.cols != channels * patch * patch) {
        throw Error(ErrorKind::Shape, "token matrix does not match the latent shape");
    }
    LatentGrid grid(channels, height, width);
    for (int by = 0; by < ph; ++by) {
        for (int bx = 0; bx < pw; ++bx) {
            const int row = by * pw + bx;
            int col = 0;
            for (int c = 0; c < channels; ++c) {
                for (int y = 0; y < patch; ++y) {
                    for (int x = 0; x < patch; ++x) {
                        grid.at(c, by * patch + y, bx * patch + x) = static_cast<float>(tokens(row, col++));
                    }
                }
            }
        }
    }
    return grid;
}

AnchorState update_anchor(const AnchorState& state, int k, std::span<const Mask> masks_k,
                          std::span<const Mask> masks_prev, double gamma) {
    if (k <= state.anchor) {
        throw Error(ErrorKind::Precondition, "frame index must exceed the current anchor");
    }
    if (masks_k.size() != state.anchor_masks.size() || masks_prev.size() != masks_k.size()) {
        throw Error(ErrorKind::Shape, "anchor and frame mask counts differ");
    }
    if (masks_k.empty()) {
        return state;
    }
    double min_iou = 1.0;
    for (std::size_t i = 0; i < masks_k.size(); ++i) {
        min_iou = std::min(min_iou, iou(state.anchor_masks[i], masks_k[i]));
    }
    if (min_iou < gamma) {
        return AnchorState{k - 1, std::vector<Mask>(masks_prev.begin(), masks_prev.end())};
    }
    return state;
}

AnchorState update_anchor(const AnchorState& state, int k, const Mask& mask_k, const Mask& mask_prev,
                          double gamma) {
    return update_anchor(state, k, std::span<const Mask>(&mask_k, 1), std::span<const Mask>(&mask_prev, 1),
                         gamma);
}

const Slice& SliceSchedule::slice_of(int frame) const {
    for (const auto& s : slices) {
        if (frame >= s.start && frame < s.end) {
            return s;
        }
    }
    throw Error(ErrorKind::Range, "frame " + std::to_string(frame) + " lies outside every slice");
}

SliceSchedule slice_schedule(std::span<const std::string> prompts, int frame_count) {
    if (prompts.empty()) {
        throw Error(ErrorKind::Precondition, "at least one slice prompt is required");
    }
    if (static_cast<int>(prompts.size()) > frame_count) {
        throw Error(ErrorKind::Capacity, std::to_string(prompts.size()) + " prompts cannot share " +
                                             std::to_string(frame_count) + " frames");
    }
    const int n = static_cast<int>(prompts.size());
    const int base = frame_count / n;
    const int extra = frame_count % n;
    SliceSchedule schedule;
    int start = 0;
    for (int i = 0; i < n; ++i) {
        const int len = base + (i < extra ? 1 : 0);
        schedule.slices.push_back({prompts[static_cast<std::size_t>(i)], start, start + len});
        start += len;
    }
    return schedule;
}

std::vector<AnchorEntry> anchor_schedule(const SliceSchedule& slices,
                                         std::span<const std::vector<Mask>> masks, double gamma) {
    std::vector<AnchorEntry> out;
    for (const auto& slice : slices.slices) {
        if (slice.end > static_cast<int>(masks.size())) {
            throw Error(ErrorKind::Range, "mask sequence is shorter than the slice schedule");
        }
        AnchorState state{slice.start, masks[static_cast<std::size_t>(slice.start)]};
        out.push_back({slice.start, slice.start});
        for (int k = slice.start + 1; k < slice.end; ++k) {
            state = update_anchor(state, k, masks[static_cast<std::size_t>(k)],
                                  masks[static_cast<std::size_t>(k - 1)], gamma);
            out.push_back({k, state.anchor});
        }
    }
    return out;
}

}  // namespace motionwarp
