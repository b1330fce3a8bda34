// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "motionwarp/core.hpp"

namespace motionwarp {

struct SegmentationRequest {
    FrameImage frame;
    std::string phrase;
    double confidence = 0.3;
};

/// Open-vocabulary segmentation backend. Returns an image-resolution mask
/// for the best instance of `phrase`; an empty mask means nothing scored
/// at or above `confidence`.
class SegmentationProvider {
public:
    virtual ~SegmentationProvider() = default;
    virtual Mask segment(const FrameImage& frame, std::string_view phrase, double confidence) = 0;
};

/// Validates the request and forwards to the provider.
Mask segment(const SegmentationRequest& request, SegmentationProvider& provider);

/// Segments by the toy scene compiler's color keys. Per-pixel confidence
/// falls off linearly with the largest channel difference from the key.
class ColorKeySegmenter final : public SegmentationProvider {
public:
    Mask segment(const FrameImage& frame, std::string_view phrase, double confidence) override;
};

// ---------------------------------------------------------------------------
// Mask algebra
// ---------------------------------------------------------------------------

/// |a ∩ b| / |a ∪ b|; 1 when both are empty. Throws Error(Shape) on mismatch.
double iou(const Mask& a, const Mask& b);

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// Midpoint of the tight bounding box. Throws Error(EmptyMask) on an empty mask.
Point mask_center(const Mask& m);

struct BoundingBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;  // inclusive
    int y1 = 0;
};
BoundingBox bounding_box(const Mask& m);

/// Block reduce: a latent cell is set iff at least half of its
/// factor x factor image block is set.
Mask to_latent_resolution(const Mask& m, int factor);

/// Nearest-neighbor upsample back to image resolution.
Mask to_image_resolution(const Mask& m, int factor);

}  // namespace motionwarp
