// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "motionwarp/diffusion.hpp"
#include "motionwarp/scene.hpp"

namespace motionwarp::toy {

/// Factor-k codec: encode averages each k x k pixel block per channel
/// (pixels mapped to [-1, 1]); decode upsamples by nearest neighbor.
LatentGrid encode_blocks(const FrameImage& image, int factor);
FrameImage decode_blocks(const LatentGrid& latent, int factor);

/// Dependency-free backend. The denoiser knows a clean target per frame
/// ("guide") and predicts the noise that separates x_t from it, so DDIM
/// lands on the target. Frame 0's guide is the compiled scene; later frames
/// get guides from the pipeline. With a non-zero attention mix, each
/// frame's target is blended with softmax(Q K^T / sqrt(d)) V where Q comes
/// from the frame's guide and K = V from its anchor frame's guide.
class ToyBackend final : public DenoiserBackend {
public:
    ToyBackend(DiffusionSchedule sched, int factor = 8, double attention_mix = 0.0, int attention_patch = 4);

    LatentGrid predict_noise(const LatentGrid& x_t, int t, int frame, std::string_view condition) override;
    LatentGrid encode(const FrameImage& image) override;
    FrameImage decode(const LatentGrid& latent) override;
    LatentShape latent_shape(int image_size) const override;

    void begin_first_frame(std::string_view prompt, int image_size) override;
    void set_anchors(std::span<const AnchorEntry> anchors) override;

    /// Replaces all per-frame guides; anchors reset to "attend to self".
    void set_guides(std::vector<LatentGrid> guides);
    const std::vector<LatentGrid>& guides() const { return m_guides; }

    /// Target the denoiser currently steers frame `frame` toward.
    const LatentGrid& target(int frame) const;

    const Scene& scene() const;

    /// Lets prompts without any registered entity compile to a bare
    /// background (used when regenerating a background alone).
    void set_allow_empty_scene(bool allow) { m_allow_empty = allow; }

private:
    void rebuild_targets();

    DiffusionSchedule m_sched;
    int m_factor;
    double m_mix;
    int m_patch;
    bool m_allow_empty = false;
    std::optional<Scene> m_scene;
    std::vector<LatentGrid> m_guides;
    std::vector<int> m_anchor_of;
    std::vector<LatentGrid> m_targets;
};

}  // namespace motionwarp::toy
