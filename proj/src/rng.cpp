// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/rng.hpp"

#include <cmath>
#include <numbers>

namespace motionwarp {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53U;
constexpr std::uint32_t kMul1 = 0xCD9E8D57U;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9U;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85U;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b);
    hi = static_cast<std::uint32_t>(product >> 32U);
    lo = static_cast<std::uint32_t>(product);
}

// 32 bits -> (0, 1], never 0 so log() stays finite.
inline double to_unit(std::uint32_t bits) {
    return (static_cast<double>(bits) + 1.0) / 4294967296.0;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0 = 0;
        std::uint32_t lo0 = 0;
        std::uint32_t hi1 = 0;
        std::uint32_t lo1 = 0;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

double NoiseSource::normal(NoisePurpose purpose, int frame, int timestep, std::uint32_t cell) const {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(m_seed),
                                              static_cast<std::uint32_t>(m_seed >> 32U)};
    const std::array<std::uint32_t, 4> ctr = {cell, static_cast<std::uint32_t>(timestep),
                                              static_cast<std::uint32_t>(frame),
                                              static_cast<std::uint32_t>(purpose)};
    const auto bits = philox4x32(ctr, key);
    // Box-Muller on the first two words.
    const double u1 = to_unit(bits[0]);
    const double u2 = to_unit(bits[1]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

LatentGrid NoiseSource::grid(NoisePurpose purpose, int frame, int timestep, int channels,
                             int height, int width) const {
    LatentGrid out(channels, height, width);
    auto& values = out.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = static_cast<float>(normal(purpose, frame, timestep, static_cast<std::uint32_t>(i)));
    }
    return out;
}

}  // namespace motionwarp
