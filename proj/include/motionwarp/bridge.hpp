// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "motionwarp/diffusion.hpp"
#include "motionwarp/planner.hpp"
#include "motionwarp/segmenter.hpp"

namespace motionwarp {

/// Client side of the model bridge. Wire format:
///
///   GET  /health       -> application/json {"T", "betas", "latent_channels", "latent_factor", ...}
///   POST /first_frame  {"prompt", "seed", "size", "t1"}
///                      -> application/json {"image": b64 PNG, "latent": b64 blob, "latent_t1": b64 blob}
///   POST /denoise      {"latent": b64 blob, "t", "frame", "anchor", "condition"}
///                      -> application/octet-stream blob (noise prediction)
///   POST /segment      {"image": b64 PNG, "phrase", "confidence"} -> image/png (1-bit or gray mask)
///   POST /heading      {"image": b64 PNG, "character"} -> application/json {"direction"}
///   POST /decode       {"latent": b64 blob} -> image/png
///
/// A blob is wire::encode_latent (u32 LE header length, JSON shape header,
/// float32 LE payload). Every failure surfaces as BackendError naming the
/// endpoint; a 404 from /heading becomes Error(NotFound).
class BridgeClient {
public:
    explicit BridgeClient(std::string base_url, int timeout_seconds = 120);
    ~BridgeClient();

    BridgeClient(const BridgeClient&) = delete;
    BridgeClient& operator=(const BridgeClient&) = delete;

    nlohmann::json health();
    FirstFrame first_frame(std::string_view prompt, std::uint64_t seed, int size, int t1);
    LatentGrid denoise(const LatentGrid& latent, int t, int frame, int anchor, std::string_view condition);
    Mask segment(const FrameImage& image, std::string_view phrase, double confidence);
    Direction heading(const FrameImage& image, std::string_view character);
    FrameImage decode(const LatentGrid& latent);

private:
    struct Impl;
    std::unique_ptr<Impl> m_impl;
};

class BridgeBackend final : public DenoiserBackend {
public:
    explicit BridgeBackend(std::shared_ptr<BridgeClient> client);

    LatentGrid predict_noise(const LatentGrid& x_t, int t, int frame, std::string_view condition) override;
    LatentGrid encode(const FrameImage& image) override;
    FrameImage decode(const LatentGrid& latent) override;
    LatentShape latent_shape(int image_size) const override;
    std::optional<FirstFrame> native_first_frame(std::string_view prompt, std::uint64_t seed, int image_size,
                                                 const DiffusionSchedule& sched) override;
    void set_anchors(std::span<const AnchorEntry> anchors) override;

    /// Throws BackendError unless the bridge runs the same schedule.
    void check_schedule(const DiffusionSchedule& sched);

private:
    std::shared_ptr<BridgeClient> m_client;
    std::map<int, int> m_anchor_of;
    int m_channels = 4;
    int m_factor = 8;
};

class BridgeSegmenter final : public SegmentationProvider {
public:
    explicit BridgeSegmenter(std::shared_ptr<BridgeClient> client) : m_client(std::move(client)) {}
    Mask segment(const FrameImage& frame, std::string_view phrase, double confidence) override;

private:
    std::shared_ptr<BridgeClient> m_client;
};

class BridgeHeadingProvider final : public HeadingProvider {
public:
    explicit BridgeHeadingProvider(std::shared_ptr<BridgeClient> client) : m_client(std::move(client)) {}
    Direction heading(const FrameImage& frame, std::string_view character) override;

private:
    std::shared_ptr<BridgeClient> m_client;
};

}  // namespace motionwarp
