// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "motionwarp/core.hpp"

namespace motionwarp {

// PNG encoding is deterministic: fixed zlib level, no time chunk.

std::vector<std::uint8_t> encode_png(const FrameImage& image);
/// 1-bit grayscale.
std::vector<std::uint8_t> encode_png(const Mask& mask);

/// Decodes any 8-bit-or-less gray/RGB(A)/palette PNG into RGB.
FrameImage decode_png_image(std::span<const std::uint8_t> bytes);
/// Decodes a PNG into a mask; a pixel is set when its luminance is >= 128.
Mask decode_png_mask(std::span<const std::uint8_t> bytes, Resolution resolution);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace motionwarp
