// SPDX-License-Identifier: Apache-2.0

#include "covert/rng.hpp"

namespace covert {

Rng make_rng(std::uint64_t seed) {
  return make_stream(seed, 0, 0);
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace covert
