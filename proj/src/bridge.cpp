// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/bridge.hpp"

#include <cmath>
#include <mutex>

#include <httplib.h>

#include "motionwarp/http_util.hpp"
#include "motionwarp/image_io.hpp"
#include "motionwarp/wire.hpp"

namespace motionwarp {

namespace {

std::string png_b64(const FrameImage& image) {
    const auto png = encode_png(image);
    return wire::base64_encode(png);
}

std::string blob_b64(const LatentGrid& grid) {
    const auto blob = wire::encode_latent(grid);
    return wire::base64_encode(blob);
}

std::string media_type(const httplib::Response& res) {
    std::string type = res.get_header_value("Content-Type");
    if (const auto semi = type.find(';'); semi != std::string::npos) type.resize(semi);
    return type;
}

std::span<const std::uint8_t> bytes_of(const std::string& body) {
    return {reinterpret_cast<const std::uint8_t*>(body.data()), body.size()};
}

}  // namespace

struct BridgeClient::Impl {
    UrlParts url;
    httplib::Client client;
    std::mutex mutex;  // httplib::Client is not safe for concurrent requests

    Impl(const std::string& base, int timeout) : url(split_url(base)), client(url.origin) {
        client.set_connection_timeout(timeout, 0);
        client.set_read_timeout(timeout, 0);
        client.set_write_timeout(timeout, 0);
    }

    httplib::Result get(const std::string& endpoint) {
        std::lock_guard lock(mutex);
        return client.Get(url.prefix + endpoint);
    }

    httplib::Result post(const std::string& endpoint, const nlohmann::json& body) {
        std::lock_guard lock(mutex);
        return client.Post(url.prefix + endpoint, body.dump(), "application/json");
    }

    // Checks transport, status and content type; returns the body.
    std::string expect(const std::string& endpoint, const httplib::Result& res, std::string_view type) {
        if (!res) {
            throw BackendError(endpoint, "unreachable at " + url.origin + " (" + httplib::to_string(res.error()) + ")");
        }
        if (res->status != 200) {
            std::string detail = res->body.substr(0, 200);
            throw BackendError(endpoint, "HTTP " + std::to_string(res->status) + (detail.empty() ? "" : ": " + detail));
        }
        if (media_type(*res) != type) {
            throw BackendError(endpoint, "expected content type " + std::string(type) + ", got '" +
                                             res->get_header_value("Content-Type") + "'");
        }
        return res->body;
    }

    nlohmann::json expect_json(const std::string& endpoint, const httplib::Result& res) {
        const std::string body = expect(endpoint, res, "application/json");
        try {
            return nlohmann::json::parse(body);
        } catch (const nlohmann::json::parse_error& e) {
            throw BackendError(endpoint, std::string("malformed JSON: ") + e.what());
        }
    }
};

BridgeClient::BridgeClient(std::string base_url, int timeout_seconds)
    : m_impl(std::make_unique<Impl>(base_url, timeout_seconds)) {}

BridgeClient::~BridgeClient() = default;

nlohmann::json BridgeClient::health() {
    const std::string ep = "/health";
    return m_impl->expect_json(ep, m_impl->get(ep));
}

FirstFrame BridgeClient::first_frame(std::string_view prompt, std::uint64_t seed, int size, int t1) {
    const std::string ep = "/first_frame";
    const auto doc = m_impl->expect_json(
        ep, m_impl->post(ep, {{"prompt", prompt}, {"seed", seed}, {"size", size}, {"t1", t1}}));
    try {
        FirstFrame out;
        out.image = decode_png_image(wire::base64_decode(doc.at("image").get<std::string>()));
        out.latent = wire::decode_latent(wire::base64_decode(doc.at("latent").get<std::string>()));
        out.latent_t1 = wire::decode_latent(wire::base64_decode(doc.at("latent_t1").get<std::string>()));
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(ep, std::string("response schema: ") + e.what());
    } catch (const Error& e) {
        throw BackendError(ep, e.what());
    }
}

LatentGrid BridgeClient::denoise(const LatentGrid& latent, int t, int frame, int anchor, std::string_view condition) {
    const std::string ep = "/denoise";
    const nlohmann::json body = {
        {"latent", blob_b64(latent)}, {"t", t}, {"frame", frame}, {"anchor", anchor}, {"condition", condition}};
    const std::string blob = m_impl->expect(ep, m_impl->post(ep, body), "application/octet-stream");
    try {
        return wire::decode_latent(bytes_of(blob));
    } catch (const Error& e) {
        throw BackendError(ep, e.what());
    }
}

Mask BridgeClient::segment(const FrameImage& image, std::string_view phrase, double confidence) {
    const std::string ep = "/segment";
    const nlohmann::json body = {{"image", png_b64(image)}, {"phrase", phrase}, {"confidence", confidence}};
    const std::string png = m_impl->expect(ep, m_impl->post(ep, body), "image/png");
    try {
        return decode_png_mask(bytes_of(png), Resolution::Image);
    } catch (const Error& e) {
        throw BackendError(ep, e.what());
    }
}

Direction BridgeClient::heading(const FrameImage& image, std::string_view character) {
    const std::string ep = "/heading";
    auto res = m_impl->post(ep, {{"image", png_b64(image)}, {"character", character}});
    if (res && res->status == 404) {
        throw Error(ErrorKind::NotFound, "bridge cannot find '" + std::string(character) + "' in the frame");
    }
    const auto doc = m_impl->expect_json(ep, res);
    try {
        return parse_direction(doc.at("direction").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(ep, std::string("response schema: ") + e.what());
    }
}

FrameImage BridgeClient::decode(const LatentGrid& latent) {
    const std::string ep = "/decode";
    const std::string png = m_impl->expect(ep, m_impl->post(ep, {{"latent", blob_b64(latent)}}), "image/png");
    try {
        return decode_png_image(bytes_of(png));
    } catch (const Error& e) {
        throw BackendError(ep, e.what());
    }
}

// ---------------------------------------------------------------------------

BridgeBackend::BridgeBackend(std::shared_ptr<BridgeClient> client) : m_client(std::move(client)) {}

void BridgeBackend::check_schedule(const DiffusionSchedule& sched) {
    const auto doc = m_client->health();
    try {
        m_channels = doc.value("latent_channels", m_channels);
        m_factor = doc.value("latent_factor", m_factor);
        const int T = doc.at("T").get<int>();
        const auto betas = doc.at("betas").get<std::vector<double>>();
        if (T != sched.T || betas.size() != sched.betas.size()) {
            throw BackendError("/health", "bridge runs T=" + std::to_string(T) + ", engine expects T=" +
                                              std::to_string(sched.T));
        }
        for (std::size_t i = 0; i < betas.size(); ++i) {
            if (std::abs(betas[i] - sched.betas[i]) > 1e-9) {
                throw BackendError("/health", "beta schedule differs at t=" + std::to_string(i + 1));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw BackendError("/health", std::string("response schema: ") + e.what());
    }
}

LatentGrid BridgeBackend::predict_noise(const LatentGrid& x_t, int t, int frame, std::string_view condition) {
    const auto it = m_anchor_of.find(frame);
    const int anchor = it == m_anchor_of.end() ? frame : it->second;
    return m_client->denoise(x_t, t, frame, anchor, condition);
}

LatentGrid BridgeBackend::encode(const FrameImage&) {
    throw Error(ErrorKind::Backend, "the bridge does not expose an encoder");
}

FrameImage BridgeBackend::decode(const LatentGrid& latent) { return m_client->decode(latent); }

LatentShape BridgeBackend::latent_shape(int image_size) const {
    return {m_channels, image_size / m_factor, image_size / m_factor};
}

std::optional<FirstFrame> BridgeBackend::native_first_frame(std::string_view prompt, std::uint64_t seed,
                                                            int image_size, const DiffusionSchedule& sched) {
    return m_client->first_frame(prompt, seed, image_size, sched.t1);
}

void BridgeBackend::set_anchors(std::span<const AnchorEntry> anchors) {
    for (const auto& a : anchors) m_anchor_of[a.frame] = a.anchor;
}

Mask BridgeSegmenter::segment(const FrameImage& frame, std::string_view phrase, double confidence) {
    Mask m = m_client->segment(frame, phrase, confidence);
    if (m.width() != frame.width || m.height() != frame.height) {
        throw BackendError("/segment", "mask size does not match the image");
    }
    return m;
}

Direction BridgeHeadingProvider::heading(const FrameImage& frame, std::string_view character) {
    return m_client->heading(frame, character);
}

}  // namespace motionwarp
