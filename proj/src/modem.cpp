// SPDX-License-Identifier: Apache-2.0

#include "covert/modem.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace covert {
namespace {

const std::array<Complex, 4> kQpsk = [] {
  const double a = 1.0 / std::sqrt(2.0);
  std::array<Complex, 4> pts{};
  for (unsigned label = 0; label < 4; ++label) {
    const double i = (label & 0b10) ? -a : a;
    const double q = (label & 0b01) ? -a : a;
    pts[label] = {i, q};
  }
  return pts;
}();

// Per-axis Gray level for a 2-bit label: 00->-3, 01->-1, 11->+1, 10->+3.
constexpr std::array<double, 4> kPamLevel = {-3.0, -1.0, 3.0, 1.0};

const std::array<Complex, 16> kQam16 = [] {
  const double scale = 1.0 / std::sqrt(10.0);
  std::array<Complex, 16> pts{};
  for (unsigned label = 0; label < 16; ++label) {
    pts[label] = {kPamLevel[label >> 2] * scale, kPamLevel[label & 0b11] * scale};
  }
  return pts;
}();

}  // namespace

int bits_per_symbol(Modulation m) {
  return m == Modulation::kQpsk ? 2 : 4;
}

std::string_view to_string(Modulation m) {
  return m == Modulation::kQpsk ? "QPSK" : "QAM16";
}

std::span<const Complex> constellation(Modulation m) {
  if (m == Modulation::kQpsk) return kQpsk;
  return kQam16;
}

BitVector generate_bits(std::size_t n, Rng& rng) {
  BitVector bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  return bits;
}

SymbolVector modulate(std::span<const std::uint8_t> bits, Modulation m) {
  const auto k = static_cast<std::size_t>(bits_per_symbol(m));
  if (bits.size() % k != 0) {
    throw std::invalid_argument("modulate: " + std::to_string(bits.size()) +
                                " bits is not a multiple of " + std::to_string(k));
  }
  const auto points = constellation(m);
  SymbolVector out(bits.size() / k);
  for (std::size_t s = 0; s < out.size(); ++s) {
    unsigned label = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const auto b = bits[s * k + j];
      if (b > 1) throw std::invalid_argument("modulate: bit values must be 0 or 1");
      label = (label << 1) | b;
    }
    out[s] = points[label];
  }
  return out;
}

BitVector demodulate(std::span<const Complex> symbols, Modulation m) {
  const auto k = static_cast<std::size_t>(bits_per_symbol(m));
  const auto points = constellation(m);
  BitVector out(symbols.size() * k);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t label = 0; label < points.size(); ++label) {
      const double d = std::norm(symbols[s] - points[label]);
      if (d < best_dist) {
        best_dist = d;
        best = label;
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      out[s * k + j] = static_cast<std::uint8_t>((best >> (k - 1 - j)) & 1u);
    }
  }
  return out;
}

std::size_t bit_errors(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> decoded) {
  if (sent.size() != decoded.size()) {
    throw std::invalid_argument("bit_errors: length mismatch (" + std::to_string(sent.size()) +
                                " vs " + std::to_string(decoded.size()) + ")");
  }
  std::size_t errors = 0;
  for (std::size_t i = 0; i < sent.size(); ++i) errors += (sent[i] != decoded[i]);
  return errors;
}

double ber(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> decoded) {
  if (sent.empty() && decoded.empty()) throw std::invalid_argument("ber: empty bit vectors");
  return static_cast<double>(bit_errors(sent, decoded)) / static_cast<double>(sent.size());
}

}  // namespace covert
