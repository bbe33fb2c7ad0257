// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace covert {

/// Every random draw in the library comes from an explicitly seeded engine.
using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed);

/// Independent child stream for (seed, stream, index). Used to give every
/// trial its own generator so results do not depend on execution order.
Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

}  // namespace covert
