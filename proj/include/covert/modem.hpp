// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "covert/rng.hpp"

namespace covert {

using Complex = std::complex<double>;
using BitVector = std::vector<std::uint8_t>;
using SymbolVector = std::vector<Complex>;

enum class Modulation { kQpsk, kQam16 };

int bits_per_symbol(Modulation m);
std::string_view to_string(Modulation m);

/// Constellation points indexed by their bit label, most significant bit
/// first. Both constellations are Gray-labelled with unit average energy:
///   QPSK   (+-1 +-1j)/sqrt(2), bit 0 -> I sign, bit 1 -> Q sign (0 = +)
///   16QAM  (a + bj)/sqrt(10), per-axis labels 00->-3 01->-1 11->+1 10->+3,
///          bits 0-1 select I and bits 2-3 select Q
std::span<const Complex> constellation(Modulation m);

/// n i.i.d. uniform bits, one per engine output (top bit).
BitVector generate_bits(std::size_t n, Rng& rng);

/// Throws std::invalid_argument if the bit count is not a multiple of
/// bits_per_symbol(m).
SymbolVector modulate(std::span<const std::uint8_t> bits, Modulation m);

/// Hard-decision nearest-point demapping. Exact ties resolve to the smallest
/// bit label.
BitVector demodulate(std::span<const Complex> symbols, Modulation m);

std::size_t bit_errors(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> decoded);

/// Fraction of differing bits. Requires equal, nonzero lengths.
double ber(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> decoded);

}  // namespace covert
