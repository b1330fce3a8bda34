// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "motionwarp/core.hpp"

namespace motionwarp {

/// Dense row-major matrix used for attention operands.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

/// Row-wise softmax(Q K^T / sqrt(d)). Throws Error(Shape) if Q and K
/// disagree on the feature dimension or d <= 0.
Matrix attention_weights(const Matrix& q, const Matrix& k, int d);

/// softmax(Q K^T / sqrt(d)) V with K and V taken from the anchor frame.
Matrix cross_frame_attention(const Matrix& q, const Matrix& k, const Matrix& v, int d);

/// Flattens a latent into non-overlapping patch tokens: one row per
/// patch x patch block, C * patch * patch features per row.
Matrix latent_to_tokens(const LatentGrid& grid, int patch);
LatentGrid tokens_to_latent(const Matrix& tokens, int channels, int height, int width, int patch);

/// IoU gate. When the smallest per-character IoU between the anchor masks
/// and the masks of frame k drops below gamma, the anchor moves to k - 1
/// and takes `masks_prev` (frame k - 1) as its snapshot. An empty mask list
/// never triggers an update.
AnchorState update_anchor(const AnchorState& state, int k, std::span<const Mask> masks_k,
                          std::span<const Mask> masks_prev, double gamma);

/// Single-character convenience overload.
AnchorState update_anchor(const AnchorState& state, int k, const Mask& mask_k, const Mask& mask_prev,
                          double gamma);

struct Slice {
    std::string prompt;
    int start = 0;  // inclusive
    int end = 0;    // exclusive

    friend bool operator==(const Slice&, const Slice&) = default;
};

struct SliceSchedule {
    std::vector<Slice> slices;

    const Slice& slice_of(int frame) const;
};

/// Contiguous, near-equal partition of [0, F); earlier slices take the
/// remainder. Throws Error(Capacity) when there are more prompts than frames.
SliceSchedule slice_schedule(std::span<const std::string> prompts, int frame_count);

struct AnchorEntry {
    int frame = 0;
    int anchor = 0;
    friend bool operator==(const AnchorEntry&, const AnchorEntry&) = default;
};

/// Folds update_anchor over every frame, slice by slice. masks[f] holds the
/// tracked characters' masks at frame f. Each slice restarts with its first
/// frame as anchor.
std::vector<AnchorEntry> anchor_schedule(const SliceSchedule& slices,
                                         std::span<const std::vector<Mask>> masks, double gamma);

}  // namespace motionwarp
