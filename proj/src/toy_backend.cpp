// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/toy_backend.hpp"

#include <algorithm>
#include <cmath>

namespace motionwarp::toy {

LatentGrid encode_blocks(const FrameImage& image, int factor) {
    if (factor < 1 || image.width % factor != 0 || image.height % factor != 0) {
        throw Error(ErrorKind::Shape, "image size must be divisible by the codec factor");
    }
    const int w = image.width / factor;
    const int h = image.height / factor;
    LatentGrid out(3, h, w);
    const double norm = 1.0 / (127.5 * factor * factor);
    for (int by = 0; by < h; ++by) {
        for (int bx = 0; bx < w; ++bx) {
            for (int c = 0; c < 3; ++c) {
                int sum = 0;
                for (int y = by * factor; y < (by + 1) * factor; ++y) {
                    for (int x = bx * factor; x < (bx + 1) * factor; ++x) {
                        sum += image.pixel(x, y)[c];
                    }
                }
                out.at(c, by, bx) = static_cast<float>(sum * norm - 1.0);
            }
        }
    }
    return out;
}

FrameImage decode_blocks(const LatentGrid& latent, int factor) {
    if (latent.channels() != 3) {
        throw Error(ErrorKind::Shape, "toy codec decodes 3-channel latents only");
    }
    FrameImage image(latent.width() * factor, latent.height() * factor);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            auto* p = image.pixel(x, y);
            for (int c = 0; c < 3; ++c) {
                const double v = (latent.at(c, y / factor, x / factor) + 1.0) * 127.5;
                p[c] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return image;
}

ToyBackend::ToyBackend(DiffusionSchedule sched, int factor, double attention_mix, int attention_patch)
    : m_sched(std::move(sched)), m_factor(factor), m_mix(attention_mix), m_patch(attention_patch) {
    if (factor < 1) {
        throw Error(ErrorKind::Precondition, "codec factor must be >= 1");
    }
    if (!(attention_mix >= 0.0 && attention_mix <= 1.0)) {
        throw Error(ErrorKind::Precondition, "attention mix must lie in [0, 1]");
    }
}

LatentGrid ToyBackend::predict_noise(const LatentGrid& x_t, int t, int frame, std::string_view) {
    if (t < 1 || t > m_sched.T) {
        throw BackendError("toy", "timestep " + std::to_string(t) + " out of range");
    }
    const LatentGrid& target = this->target(frame);
    if (!target.same_shape(x_t)) {
        throw BackendError("toy", "latent shape does not match the frame's guide");
    }
    const double a = std::sqrt(m_sched.alpha_bar(t));
    const double b = std::sqrt(1.0 - m_sched.alpha_bar(t));
    LatentGrid eps(x_t.channels(), x_t.height(), x_t.width());
    const auto& xv = x_t.values();
    const auto& tv = target.values();
    auto& ev = eps.values();
    for (std::size_t i = 0; i < xv.size(); ++i) {
        ev[i] = static_cast<float>((xv[i] - a * tv[i]) / b);
    }
    return eps;
}

LatentGrid ToyBackend::encode(const FrameImage& image) { return encode_blocks(image, m_factor); }
FrameImage ToyBackend::decode(const LatentGrid& latent) { return decode_blocks(latent, m_factor); }

LatentShape ToyBackend::latent_shape(int image_size) const {
    return {3, image_size / m_factor, image_size / m_factor};
}

void ToyBackend::begin_first_frame(std::string_view prompt, int image_size) {
    m_scene = compile_scene(prompt, image_size, m_factor, m_allow_empty);
    set_guides({encode_blocks(m_scene->image, m_factor)});
}

const Scene& ToyBackend::scene() const {
    if (!m_scene) {
        throw Error(ErrorKind::State, "no scene compiled yet");
    }
    return *m_scene;
}

void ToyBackend::set_guides(std::vector<LatentGrid> guides) {
    m_guides = std::move(guides);
    m_anchor_of.resize(m_guides.size());
    for (std::size_t i = 0; i < m_anchor_of.size(); ++i) {
        m_anchor_of[i] = static_cast<int>(i);
    }
    rebuild_targets();
}

void ToyBackend::set_anchors(std::span<const AnchorEntry> anchors) {
    for (const auto& entry : anchors) {
        if (entry.frame < 0 || entry.frame >= static_cast<int>(m_guides.size()) || entry.anchor < 0 ||
            entry.anchor > entry.frame) {
            throw Error(ErrorKind::Range, "anchor entry outside the guided frames");
        }
        m_anchor_of[static_cast<std::size_t>(entry.frame)] = entry.anchor;
    }
    rebuild_targets();
}

const LatentGrid& ToyBackend::target(int frame) const {
    if (frame < 0 || frame >= static_cast<int>(m_targets.size())) {
        throw BackendError("toy", "no guide for frame " + std::to_string(frame));
    }
    return m_targets[static_cast<std::size_t>(frame)];
}

void ToyBackend::rebuild_targets() {
    m_targets = m_guides;
    if (m_mix == 0.0) {
        return;
    }
    for (std::size_t k = 0; k < m_guides.size(); ++k) {
        const auto a = static_cast<std::size_t>(m_anchor_of[k]);
        if (a == k) {
            continue;
        }
        const LatentGrid& g = m_guides[k];
        const Matrix q = latent_to_tokens(g, m_patch);
        const Matrix kv = latent_to_tokens(m_guides[a], m_patch);
        const Matrix attended = cross_frame_attention(q, kv, kv, q.cols);
        const LatentGrid mixed = tokens_to_latent(attended, g.channels(), g.height(), g.width(), m_patch);
        auto& tv = m_targets[k].values();
        const auto& mv = mixed.values();
        for (std::size_t i = 0; i < tv.size(); ++i) {
            tv[i] = static_cast<float>((1.0 - m_mix) * tv[i] + m_mix * mv[i]);
        }
    }
}

}  // namespace motionwarp::toy
