// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/diffusion.hpp"

#include <cmath>
#include <thread>

#include "motionwarp/toy_backend.hpp"

namespace motionwarp {

namespace {

void check_timestep(int t, const DiffusionSchedule& sched) {
    if (t < 0 || t > sched.T) {
        throw Error(ErrorKind::Range, "timestep " + std::to_string(t) + " outside [0, " + std::to_string(sched.T) + "]");
    }
}

void check_prediction(const LatentGrid& eps, const LatentGrid& x) {
    if (!eps.same_shape(x)) {
        throw Error(ErrorKind::Backend, "noise prediction has the wrong shape");
    }
    if (!eps.all_finite()) {
        throw Error(ErrorKind::Backend, "noise prediction is not finite");
    }
}

// One ancestral step t -> t-1 for a single frame.
LatentGrid ddpm_step(const LatentGrid& x, int t, DenoiserBackend& backend, std::string_view condition,
                     const DiffusionSchedule& sched, const NoiseSource& noise, int frame) {
    const LatentGrid eps = backend.predict_noise(x, t, frame, condition);
    check_prediction(eps, x);
    const double ab_t = sched.alpha_bar(t);
    const double ab_prev = sched.alpha_bar(t - 1);
    const double beta = sched.beta(t);
    const double coef_x0 = std::sqrt(ab_prev) * beta / (1.0 - ab_t);
    const double coef_xt = std::sqrt(1.0 - beta) * (1.0 - ab_prev) / (1.0 - ab_t);
    const double std_dev = ddpm_posterior_std(sched, t);

    LatentGrid out(x.channels(), x.height(), x.width());
    const auto& xv = x.values();
    const auto& ev = eps.values();
    auto& ov = out.values();
    for (std::size_t i = 0; i < xv.size(); ++i) {
        const double x0_hat = (xv[i] - std::sqrt(1.0 - ab_t) * ev[i]) / std::sqrt(ab_t);
        double next = coef_x0 * x0_hat + coef_xt * xv[i];
        if (std_dev > 0.0) {
            next += std_dev * noise.normal(NoisePurpose::Ancestral, frame, t, static_cast<std::uint32_t>(i));
        }
        ov[i] = static_cast<float>(next);
    }
    return out;
}

}  // namespace

LatentGrid forward_diffuse(const LatentGrid& x0, int t, const DiffusionSchedule& sched, const LatentGrid& eps) {
    check_timestep(t, sched);
    if (!eps.same_shape(x0)) {
        throw Error(ErrorKind::Shape, "noise grid does not match x0");
    }
    const double a = std::sqrt(sched.alpha_bar(t));
    const double b = std::sqrt(1.0 - sched.alpha_bar(t));
    LatentGrid out = x0;
    auto& ov = out.values();
    const auto& ev = eps.values();
    for (std::size_t i = 0; i < ov.size(); ++i) {
        ov[i] = static_cast<float>(a * ov[i] + b * ev[i]);
    }
    return out;
}

LatentGrid forward_diffuse(const LatentGrid& x0, int t, const DiffusionSchedule& sched, const NoiseSource& noise,
                           int frame) {
    check_timestep(t, sched);
    if (t == 0) {
        return x0;
    }
    return forward_diffuse(x0, t, sched,
                           noise.grid(NoisePurpose::Forward, frame, t, x0.channels(), x0.height(), x0.width()));
}

LatentGrid forward_diffuse_stepwise(const LatentGrid& x0, int t, const DiffusionSchedule& sched,
                                    const NoiseSource& noise, int frame) {
    check_timestep(t, sched);
    std::vector<double> x(x0.values().begin(), x0.values().end());
    for (int s = 1; s <= t; ++s) {
        const double keep = std::sqrt(1.0 - sched.beta(s));
        const double inject = std::sqrt(sched.beta(s));
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = keep * x[i] + inject * noise.normal(NoisePurpose::Forward, frame, s, static_cast<std::uint32_t>(i));
        }
    }
    LatentGrid out(x0.channels(), x0.height(), x0.width());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.values()[i] = static_cast<float>(x[i]);
    }
    return out;
}

LatentGrid ddim_denoise(const LatentGrid& x, int t_from, int t_to, DenoiserBackend& backend,
                        std::string_view condition, const DiffusionSchedule& sched, int frame) {
    check_timestep(t_from, sched);
    check_timestep(t_to, sched);
    if (t_from < t_to) {
        throw Error(ErrorKind::Precondition, "DDIM runs from a later timestep to an earlier one");
    }
    LatentGrid cur = x;
    for (int t = t_from; t > t_to; --t) {
        const LatentGrid eps = backend.predict_noise(cur, t, frame, condition);
        check_prediction(eps, cur);
        const double ab_t = sched.alpha_bar(t);
        const double ab_prev = sched.alpha_bar(t - 1);
        auto& cv = cur.values();
        const auto& ev = eps.values();
        for (std::size_t i = 0; i < cv.size(); ++i) {
            const double x0_hat = (cv[i] - std::sqrt(1.0 - ab_t) * ev[i]) / std::sqrt(ab_t);
            cv[i] = static_cast<float>(std::sqrt(ab_prev) * x0_hat + std::sqrt(1.0 - ab_prev) * ev[i]);
        }
    }
    return cur;
}

double ddpm_posterior_std(const DiffusionSchedule& sched, int t) {
    const double var = sched.beta(t) * (1.0 - sched.alpha_bar(t - 1)) / (1.0 - sched.alpha_bar(t));
    return std::sqrt(std::max(var, 0.0));
}

std::vector<LatentGrid> ddpm_settle(std::span<const LatentGrid> frames, int t_from, int t_to,
                                    DenoiserBackend& backend, std::span<const std::string> conditions,
                                    const DiffusionSchedule& sched, const NoiseSource& noise, int first_frame,
                                    int threads) {
    check_timestep(t_from, sched);
    check_timestep(t_to, sched);
    if (t_from < t_to) {
        throw Error(ErrorKind::Precondition, "DDPM settle runs from a later timestep to an earlier one");
    }
    if (conditions.size() != frames.size()) {
        throw Error(ErrorKind::Shape, "one condition per frame is required");
    }
    std::vector<LatentGrid> out(frames.begin(), frames.end());
    auto run = [&](std::size_t i) {
        const int frame = first_frame + static_cast<int>(i);
        for (int t = t_from; t > t_to; --t) {
            out[i] = ddpm_step(out[i], t, backend, conditions[i], sched, noise, frame);
        }
    };
    if (threads <= 1 || out.size() < 2) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            run(i);
        }
    } else {
        // Frames are independent: each owns its noise stream and output slot.
        std::vector<std::exception_ptr> errors(out.size());
        std::vector<std::jthread> workers;
        const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(threads), out.size());
        for (std::size_t w = 0; w < n_workers; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t i = w; i < out.size(); i += n_workers) {
                    try {
                        run(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        workers.clear();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    return out;
}

FirstFrame generate_first_frame(std::string_view prompt, std::uint64_t seed, DenoiserBackend& backend,
                                const DiffusionSchedule& sched, int image_size) {
    if (auto native = backend.native_first_frame(prompt, seed, image_size, sched)) {
        return std::move(*native);
    }
    backend.begin_first_frame(prompt, image_size);
    const LatentShape shape = backend.latent_shape(image_size);
    const NoiseSource noise(seed);
    const LatentGrid z_T = noise.grid(NoisePurpose::Initial, 0, sched.T, shape.channels, shape.height, shape.width);

    FirstFrame result;
    result.latent_t1 = ddim_denoise(z_T, sched.T, sched.t1, backend, prompt, sched, 0);
    result.latent = ddim_denoise(result.latent_t1, sched.t1, 0, backend, prompt, sched, 0);
    result.image = backend.decode(result.latent);
    return result;
}

std::vector<LatentGrid> replicate_initial_latents(const LatentGrid& x0_at_t1, int frame_count) {
    if (frame_count < 2) {
        throw Error(ErrorKind::Precondition, "at least two frames are required");
    }
    return std::vector<LatentGrid>(static_cast<std::size_t>(frame_count), x0_at_t1);
}

// ---------------------------------------------------------------------------

LatentGrid ReplayNoiseDenoiser::predict_noise(const LatentGrid& x_t, int, int frame, std::string_view) {
    if (frame < 0 || frame >= static_cast<int>(m_noise.size())) {
        throw BackendError("replay", "no noise recorded for frame " + std::to_string(frame));
    }
    const LatentGrid& eps = m_noise[static_cast<std::size_t>(frame)];
    if (!eps.same_shape(x_t)) {
        throw BackendError("replay", "recorded noise has the wrong shape");
    }
    return eps;
}

LatentGrid ReplayNoiseDenoiser::encode(const FrameImage& image) { return toy::encode_blocks(image, 8); }
FrameImage ReplayNoiseDenoiser::decode(const LatentGrid& latent) { return toy::decode_blocks(latent, 8); }

LatentShape ReplayNoiseDenoiser::latent_shape(int image_size) const {
    return {3, image_size / 8, image_size / 8};
}

}  // namespace motionwarp
