// SPDX-License-Identifier: Apache-2.0

#include "covert/waveform5g.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "covert/fft.hpp"

namespace covert {

void validate(const OfdmConfig& cfg) {
  if (cfg.fft_size == 0 || cfg.used_subcarriers == 0 || cfg.used_subcarriers >= cfg.fft_size) {
    // DC is excluded, so at most fft_size - 1 subcarriers can carry data.
    throw std::invalid_argument("ofdm: need 0 < used_subcarriers < fft_size");
  }
  if (cfg.used_subcarriers % 2 != 0) throw std::invalid_argument("ofdm: used_subcarriers must be even");
  if (cfg.cp_len >= cfg.fft_size) throw std::invalid_argument("ofdm: cp_len must be < fft_size");
  if (cfg.symbols_per_frame == 0) throw std::invalid_argument("ofdm: symbols_per_frame must be >= 1");
}

std::vector<std::size_t> used_subcarrier_bins(const OfdmConfig& cfg) {
  validate(cfg);
  const std::size_t half = cfg.used_subcarriers / 2;
  std::vector<std::size_t> bins;
  bins.reserve(cfg.used_subcarriers);
  for (std::size_t k = 1; k <= half; ++k) bins.push_back(k);
  for (std::size_t k = half; k >= 1; --k) bins.push_back(cfg.fft_size - k);
  return bins;
}

std::uint16_t crc16(std::span<const std::uint8_t> bits) {
  std::uint16_t reg = 0;
  for (auto b : bits) {
    const bool feedback = ((reg >> 15) & 1u) != (b & 1u);
    reg = static_cast<std::uint16_t>(reg << 1);
    if (feedback) reg ^= kCrc16Polynomial;
  }
  return reg;
}

BitVector TransportBlock::bits() const {
  BitVector out = payload;
  out.insert(out.end(), crc.begin(), crc.end());
  return out;
}

TransportBlock crc_attach(std::span<const std::uint8_t> payload) {
  if (payload.empty()) throw std::invalid_argument("crc_attach: empty payload");
  TransportBlock tb{BitVector(payload.begin(), payload.end()), BitVector(kCrcBits)};
  const std::uint16_t crc = crc16(payload);
  for (std::size_t i = 0; i < kCrcBits; ++i) {
    tb.crc[i] = static_cast<std::uint8_t>((crc >> (kCrcBits - 1 - i)) & 1u);
  }
  return tb;
}

bool crc_check(const TransportBlock& block) {
  if (block.crc.size() != kCrcBits) return false;
  return crc_check(block.bits());
}

bool crc_check(std::span<const std::uint8_t> bits_with_crc) {
  if (bits_with_crc.size() <= kCrcBits) return false;
  // Dividing payload||crc leaves a zero remainder iff the crc matches.
  return crc16(bits_with_crc) == 0;
}

std::size_t ofdm_symbol_samples(const OfdmConfig& cfg) {
  return cfg.fft_size + cfg.cp_len;
}

SymbolVector ofdm_modulate(std::span<const Complex> symbols, const OfdmConfig& cfg) {
  const auto bins = used_subcarrier_bins(cfg);
  if (symbols.size() % cfg.used_subcarriers != 0) {
    throw std::invalid_argument("ofdm_modulate: " + std::to_string(symbols.size()) +
                                " symbols is not a multiple of " + std::to_string(cfg.used_subcarriers));
  }
  const std::size_t n_ofdm = symbols.size() / cfg.used_subcarriers;
  const std::size_t stride = ofdm_symbol_samples(cfg);
  SymbolVector out(n_ofdm * stride);
  SymbolVector grid(cfg.fft_size);
  SymbolVector time(cfg.fft_size);
  for (std::size_t s = 0; s < n_ofdm; ++s) {
    std::fill(grid.begin(), grid.end(), Complex{});
    for (std::size_t k = 0; k < bins.size(); ++k) grid[bins[k]] = symbols[s * cfg.used_subcarriers + k];
    unitary_idft(grid, time);
    auto* dst = out.data() + s * stride;
    for (std::size_t i = 0; i < cfg.cp_len; ++i) dst[i] = time[cfg.fft_size - cfg.cp_len + i];
    for (std::size_t i = 0; i < cfg.fft_size; ++i) dst[cfg.cp_len + i] = time[i];
  }
  return out;
}

SymbolVector ofdm_demodulate(std::span<const Complex> samples, const OfdmConfig& cfg, Complex h) {
  const auto bins = used_subcarrier_bins(cfg);
  if (h == Complex{}) throw std::invalid_argument("ofdm_demodulate: channel gain is zero");
  const std::size_t stride = ofdm_symbol_samples(cfg);
  if (samples.size() % stride != 0) {
    throw std::invalid_argument("ofdm_demodulate: " + std::to_string(samples.size()) +
                                " samples is not a multiple of " + std::to_string(stride));
  }
  const std::size_t n_ofdm = samples.size() / stride;
  SymbolVector out(n_ofdm * cfg.used_subcarriers);
  SymbolVector freq(cfg.fft_size);
  for (std::size_t s = 0; s < n_ofdm; ++s) {
    unitary_dft(samples.subspan(s * stride + cfg.cp_len, cfg.fft_size), freq);
    for (std::size_t k = 0; k < bins.size(); ++k) out[s * cfg.used_subcarriers + k] = freq[bins[k]] / h;
  }
  return out;
}

std::size_t frame_bits(const OfdmConfig& cfg) {
  return 2 * cfg.used_subcarriers * cfg.symbols_per_frame;
}

std::size_t frame_payload_bits(const OfdmConfig& cfg) {
  if (frame_bits(cfg) <= kCrcBits) throw std::invalid_argument("ofdm: frame too small for the CRC");
  return frame_bits(cfg) - kCrcBits;
}

std::size_t frame_samples(const OfdmConfig& cfg) {
  return ofdm_symbol_samples(cfg) * cfg.symbols_per_frame;
}

SymbolVector frame_tx(std::span<const std::uint8_t> payload, const OfdmConfig& cfg) {
  if (payload.size() != frame_payload_bits(cfg)) {
    throw std::invalid_argument("frame_tx: payload must be " + std::to_string(frame_payload_bits(cfg)) +
                                " bits, got " + std::to_string(payload.size()));
  }
  const auto tb = crc_attach(payload);
  return ofdm_modulate(modulate(tb.bits(), Modulation::kQpsk), cfg);
}

FrameRx frame_rx(std::span<const Complex> samples, const OfdmConfig& cfg, Complex h) {
  if (samples.size() != frame_samples(cfg)) {
    throw std::invalid_argument("frame_rx: expected " + std::to_string(frame_samples(cfg)) +
                                " samples, got " + std::to_string(samples.size()));
  }
  FrameRx rx;
  rx.bits = demodulate(ofdm_demodulate(samples, cfg, h), Modulation::kQpsk);
  rx.crc_ok = crc_check(rx.bits);
  rx.payload.assign(rx.bits.begin(), rx.bits.end() - static_cast<std::ptrdiff_t>(kCrcBits));
  return rx;
}

}  // namespace covert
