// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motionwarp/core.hpp"
#include "motionwarp/rng.hpp"
#include "motionwarp/scheduler.hpp"

namespace motionwarp {

struct LatentShape {
    int channels = 0;
    int height = 0;
    int width = 0;
};

struct FirstFrame {
    FrameImage image;
    LatentGrid latent;     // x_0 of frame 0
    LatentGrid latent_t1;  // the same DDIM chain captured at t1
};

/// Noise predictor plus the pixel/latent codec. Implementations must be
/// deterministic for identical inputs.
class DenoiserBackend {
public:
    virtual ~DenoiserBackend() = default;

    virtual LatentGrid predict_noise(const LatentGrid& x_t, int t, int frame, std::string_view condition) = 0;
    virtual LatentGrid encode(const FrameImage& image) = 0;
    virtual FrameImage decode(const LatentGrid& latent) = 0;
    virtual LatentShape latent_shape(int image_size) const = 0;

    /// Called once before the first frame is sampled.
    virtual void begin_first_frame(std::string_view /*prompt*/, int /*image_size*/) {}

    /// Backends that sample the first frame themselves return it here.
    virtual std::optional<FirstFrame> native_first_frame(std::string_view /*prompt*/, std::uint64_t /*seed*/,
                                                         int /*image_size*/, const DiffusionSchedule& /*sched*/) {
        return std::nullopt;
    }

    /// Per-frame anchor indices for a hosted cross-frame attention layer.
    virtual void set_anchors(std::span<const AnchorEntry> /*anchors*/) {}
};

/// Closed-form q(x_t | x_0) = sqrt(abar_t) x_0 + sqrt(1 - abar_t) eps with an
/// explicit eps grid.
LatentGrid forward_diffuse(const LatentGrid& x0, int t, const DiffusionSchedule& sched, const LatentGrid& eps);

/// Closed form with eps drawn from the (frame, t) forward stream.
LatentGrid forward_diffuse(const LatentGrid& x0, int t, const DiffusionSchedule& sched, const NoiseSource& noise,
                           int frame = 0);

/// Applies the one-step kernel t times, drawing step s's noise from the
/// (frame, s) forward stream.
LatentGrid forward_diffuse_stepwise(const LatentGrid& x0, int t, const DiffusionSchedule& sched,
                                    const NoiseSource& noise, int frame = 0);

/// Deterministic DDIM chain from t_from down to t_to over every integer step.
LatentGrid ddim_denoise(const LatentGrid& x, int t_from, int t_to, DenoiserBackend& backend,
                        std::string_view condition, const DiffusionSchedule& sched, int frame = 0);

/// Ancestral DDPM steps from t_from down to t_to on every frame in `frames`;
/// frames[i] is video frame first_frame + i. Reproducible for a given seed
/// regardless of `threads`.
std::vector<LatentGrid> ddpm_settle(std::span<const LatentGrid> frames, int t_from, int t_to,
                                    DenoiserBackend& backend, std::span<const std::string> conditions,
                                    const DiffusionSchedule& sched, const NoiseSource& noise, int first_frame = 0,
                                    int threads = 1);

/// Posterior standard deviation of the DDPM step t -> t-1.
double ddpm_posterior_std(const DiffusionSchedule& sched, int t);

/// z_T from the seed, DDIM to 0 (capturing t1), decode.
FirstFrame generate_first_frame(std::string_view prompt, std::uint64_t seed, DenoiserBackend& backend,
                                const DiffusionSchedule& sched, int image_size);

/// F value copies of the frame-0 latent.
std::vector<LatentGrid> replicate_initial_latents(const LatentGrid& x0_at_t1, int frame_count);

/// Replays one fixed noise grid per frame; with the grid injected by
/// forward_diffuse it inverts the forward process exactly under DDIM.
class ReplayNoiseDenoiser final : public DenoiserBackend {
public:
    explicit ReplayNoiseDenoiser(std::vector<LatentGrid> noise_per_frame)
        : m_noise(std::move(noise_per_frame)) {}

    LatentGrid predict_noise(const LatentGrid& x_t, int t, int frame, std::string_view condition) override;
    LatentGrid encode(const FrameImage& image) override;
    FrameImage decode(const LatentGrid& latent) override;
    LatentShape latent_shape(int image_size) const override;

private:
    std::vector<LatentGrid> m_noise;
};

}  // namespace motionwarp
