// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/wire.hpp"

#include <array>
#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>

namespace motionwarp::wire {

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        return ((v & 0xFFU) << 24U) | ((v & 0xFF00U) << 8U) | ((v >> 8U) & 0xFF00U) | (v >> 24U);
    }
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t n = (std::uint32_t{bytes[i]} << 16U) | (std::uint32_t{bytes[i + 1]} << 8U) | bytes[i + 2];
        out.push_back(kAlphabet[(n >> 18U) & 63U]);
        out.push_back(kAlphabet[(n >> 12U) & 63U]);
        out.push_back(kAlphabet[(n >> 6U) & 63U]);
        out.push_back(kAlphabet[n & 63U]);
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t n = std::uint32_t{bytes[i]} << 16U;
        out.push_back(kAlphabet[(n >> 18U) & 63U]);
        out.push_back(kAlphabet[(n >> 12U) & 63U]);
        out += "==";
    } else if (rest == 2) {
        const std::uint32_t n = (std::uint32_t{bytes[i]} << 16U) | (std::uint32_t{bytes[i + 1]} << 8U);
        out.push_back(kAlphabet[(n >> 18U) & 63U]);
        out.push_back(kAlphabet[(n >> 12U) & 63U]);
        out.push_back(kAlphabet[(n >> 6U) & 63U]);
        out.push_back('=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    std::uint32_t acc = 0;
    int bits = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '=') {
            break;
        }
        if (c == '\n' || c == '\r') {
            continue;
        }
        const int v = decode_char(c);
        if (v < 0) {
            throw ParseError(i, "invalid base64 character");
        }
        acc = (acc << 6U) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFFU));
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_latent(const LatentGrid& grid) {
    nlohmann::ordered_json header;
    header["dtype"] = "float32";
    header["shape"] = {grid.channels(), grid.height(), grid.width()};
    const std::string head = header.dump();

    std::vector<std::uint8_t> blob(4 + head.size() + grid.size() * 4);
    const std::uint32_t len = to_le(static_cast<std::uint32_t>(head.size()));
    std::memcpy(blob.data(), &len, 4);
    std::memcpy(blob.data() + 4, head.data(), head.size());
    auto* dst = blob.data() + 4 + head.size();
    for (float v : grid.values()) {
        const std::uint32_t bits = to_le(std::bit_cast<std::uint32_t>(v));
        std::memcpy(dst, &bits, 4);
        dst += 4;
    }
    return blob;
}

LatentGrid decode_latent(std::span<const std::uint8_t> blob) {
    if (blob.size() < 4) {
        throw ParseError(0, "latent blob shorter than its length prefix");
    }
    std::uint32_t len = 0;
    std::memcpy(&len, blob.data(), 4);
    len = to_le(len);
    if (blob.size() < 4 + static_cast<std::size_t>(len)) {
        throw ParseError(4, "latent blob header truncated");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(blob.begin() + 4, blob.begin() + 4 + len);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(4 + e.byte, "latent blob header is not JSON");
    }
    if (header.value("dtype", "") != "float32") {
        throw Error(ErrorKind::Schema, "latent blob dtype must be float32");
    }
    const auto shape = header.at("shape").get<std::vector<int>>();
    if (shape.size() != 3) {
        throw Error(ErrorKind::Schema, "latent blob shape must be [C,H,W]");
    }
    LatentGrid grid(shape[0], shape[1], shape[2]);
    const std::size_t payload = 4 + static_cast<std::size_t>(len);
    if (blob.size() != payload + grid.size() * 4) {
        throw Error(ErrorKind::Shape, "latent blob payload does not match its shape");
    }
    const auto* src = blob.data() + payload;
    for (auto& v : grid.values()) {
        std::uint32_t bits = 0;
        std::memcpy(&bits, src, 4);
        v = std::bit_cast<float>(to_le(bits));
        src += 4;
    }
    return grid;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kDigits[value & 0xFU];
        value >>= 4U;
    }
    return out;
}

}  // namespace motionwarp::wire
