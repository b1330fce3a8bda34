// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "motionwarp/core.hpp"

namespace motionwarp {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Stateless: the output depends only on (key, counter).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Which consumer a noise draw belongs to; keeps the streams disjoint.
enum class NoisePurpose : std::uint32_t {
    Initial = 0,  // z_T
    Forward = 1,  // q(x_t | x_0) draws
    Ancestral = 2,  // DDPM posterior draws
};

/// Counter-based Gaussian noise keyed by (seed, frame, timestep, cell).
/// Any draw can be reproduced in isolation, so results do not depend on
/// evaluation order or thread count.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : m_seed(seed) {}

    std::uint64_t seed() const { return m_seed; }

    double normal(NoisePurpose purpose, int frame, int timestep, std::uint32_t cell) const;

    /// Fills a C x H x W grid with standard normals; cell index is the flat
    /// channel-major offset.
    LatentGrid grid(NoisePurpose purpose, int frame, int timestep, int channels, int height,
                    int width) const;

private:
    std::uint64_t m_seed;
};

}  // namespace motionwarp
