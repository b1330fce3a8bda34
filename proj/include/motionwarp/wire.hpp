// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motionwarp/core.hpp"

namespace motionwarp::wire {

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Latent blob layout:
//   u32 little-endian  header length N
//   N bytes            JSON header {"dtype":"float32","shape":[C,H,W]}
//   C*H*W float32      little-endian, channel-major
std::vector<std::uint8_t> encode_latent(const LatentGrid& grid);
LatentGrid decode_latent(std::span<const std::uint8_t> blob);

/// 64-bit FNV-1a, used to key replayed transcripts by prompt.
std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t value);

}  // namespace motionwarp::wire
