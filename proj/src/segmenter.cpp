// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/segmenter.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "motionwarp/scene.hpp"

namespace motionwarp {

Mask segment(const SegmentationRequest& request, SegmentationProvider& provider) {
    if (request.phrase.empty()) {
        throw Error(ErrorKind::Precondition, "segmentation phrase is empty");
    }
    if (!(request.confidence > 0.0 && request.confidence <= 1.0)) {
        throw Error(ErrorKind::Precondition, "segmentation confidence must lie in (0, 1]");
    }
    Mask mask = provider.segment(request.frame, request.phrase, request.confidence);
    if (mask.width() != request.frame.width || mask.height() != request.frame.height) {
        throw Error(ErrorKind::Shape, "segmentation backend returned a mask of the wrong size");
    }
    return mask;
}

Mask ColorKeySegmenter::segment(const FrameImage& frame, std::string_view phrase, double confidence) {
    Mask mask(frame.width, frame.height, Resolution::Image);
    const toy::EntitySpec* spec = toy::match_entity(phrase);
    if (spec == nullptr) {
        return mask;
    }
    constexpr double kFalloff = 64.0;
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            const auto* p = frame.pixel(x, y);
            int diff = 0;
            for (int c = 0; c < 3; ++c) {
                diff = std::max(diff, std::abs(int{p[c]} - int{spec->color[static_cast<std::size_t>(c)]}));
            }
            const double score = 1.0 - diff / kFalloff;
            mask.set(x, y, score >= confidence);
        }
    }
    return mask;
}

double iou(const Mask& a, const Mask& b) {
    if (!a.same_shape(b)) {
        throw Error(ErrorKind::Shape, "iou of masks with different shapes");
    }
    std::size_t inter = 0;
    std::size_t uni = 0;
    const auto& ca = a.cells();
    const auto& cb = b.cells();
    for (std::size_t i = 0; i < ca.size(); ++i) {
        inter += static_cast<std::size_t>(ca[i] & cb[i]);
        uni += static_cast<std::size_t>(ca[i] | cb[i]);
    }
    if (uni == 0) {
        return 1.0;
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

BoundingBox bounding_box(const Mask& m) {
    BoundingBox box{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), -1, -1};
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (m.at(x, y)) {
                box.x0 = std::min(box.x0, x);
                box.y0 = std::min(box.y0, y);
                box.x1 = std::max(box.x1, x);
                box.y1 = std::max(box.y1, y);
            }
        }
    }
    if (box.x1 < 0) {
        throw Error(ErrorKind::EmptyMask, "mask is empty");
    }
    return box;
}

Point mask_center(const Mask& m) {
    const BoundingBox box = bounding_box(m);
    return {(box.x0 + box.x1) / 2.0, (box.y0 + box.y1) / 2.0};
}

Mask to_latent_resolution(const Mask& m, int factor) {
    if (factor < 1 || m.width() % factor != 0 || m.height() % factor != 0) {
        throw Error(ErrorKind::Shape, "mask dimensions are not divisible by the latent factor");
    }
    const int w = m.width() / factor;
    const int h = m.height() / factor;
    Mask out(w, h, Resolution::Latent);
    const int block = factor * factor;
    for (int by = 0; by < h; ++by) {
        for (int bx = 0; bx < w; ++bx) {
            int set = 0;
            for (int y = by * factor; y < (by + 1) * factor; ++y) {
                for (int x = bx * factor; x < (bx + 1) * factor; ++x) {
                    set += m.at(x, y) ? 1 : 0;
                }
            }
            out.set(bx, by, 2 * set >= block);
        }
    }
    return out;
}

Mask to_image_resolution(const Mask& m, int factor) {
    if (factor < 1) {
        throw Error(ErrorKind::Shape, "latent factor must be >= 1");
    }
    Mask out(m.width() * factor, m.height() * factor, Resolution::Image);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            out.set(x, y, m.at(x / factor, y / factor));
        }
    }
    return out;
}

}  // namespace motionwarp
