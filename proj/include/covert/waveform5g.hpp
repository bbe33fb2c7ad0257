// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "covert/modem.hpp"

namespace covert {

/// CP-OFDM numerology of the simplified uplink waveform.
struct OfdmConfig {
  std::size_t fft_size = 64;
  std::size_t cp_len = 8;
  std::size_t used_subcarriers = 48;
  double subcarrier_spacing_hz = 15e3;  // metadata only; the channel is flat
  std::size_t symbols_per_frame = 2;
};

void validate(const OfdmConfig& cfg);

/// FFT bins carrying data, in mapping order: +1..+N/2 then -N/2..-1 (stored
/// as fft_size - k). DC is never used.
std::vector<std::size_t> used_subcarrier_bins(const OfdmConfig& cfg);

// --- CRC-16-CCITT (generator x^16 + x^12 + x^5 + 1, zero initial register) ---

inline constexpr std::uint16_t kCrc16Polynomial = 0x1021;
inline constexpr std::size_t kCrcBits = 16;

/// Remainder of payload(x) * x^16 divided by the generator, bit-serial,
/// most significant bit first.
std::uint16_t crc16(std::span<const std::uint8_t> bits);

struct TransportBlock {
  BitVector payload;
  BitVector crc;  ///< kCrcBits bits, MSB first

  BitVector bits() const;  ///< payload followed by crc
};

/// Throws std::invalid_argument for an empty payload.
TransportBlock crc_attach(std::span<const std::uint8_t> payload);
bool crc_check(const TransportBlock& block);
/// Splits payload||crc and checks it.
bool crc_check(std::span<const std::uint8_t> bits_with_crc);

// --- OFDM ---

std::size_t ofdm_symbol_samples(const OfdmConfig& cfg);

/// Maps each group of used_subcarriers symbols onto one OFDM symbol, unitary
/// IDFT, then prepends the last cp_len samples.
SymbolVector ofdm_modulate(std::span<const Complex> symbols, const OfdmConfig& cfg);

/// Strips the CP, unitary DFT, one-tap equalization by h, and returns the
/// used-subcarrier symbols. Throws for h == 0 or a ragged sample count.
SymbolVector ofdm_demodulate(std::span<const Complex> samples, const OfdmConfig& cfg, Complex h);

// --- frame (CRC + QPSK + CP-OFDM) ---

/// Coded bits per frame: 2 bits per used subcarrier per OFDM symbol.
std::size_t frame_bits(const OfdmConfig& cfg);
std::size_t frame_payload_bits(const OfdmConfig& cfg);
std::size_t frame_samples(const OfdmConfig& cfg);

SymbolVector frame_tx(std::span<const std::uint8_t> payload, const OfdmConfig& cfg);

struct FrameRx {
  BitVector payload;
  BitVector bits;  ///< hard decisions for payload||crc
  bool crc_ok = false;
};

FrameRx frame_rx(std::span<const Complex> samples, const OfdmConfig& cfg, Complex h);

}  // namespace covert
