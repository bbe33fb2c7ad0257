// SPDX-License-Identifier: Apache-2.0

#include "covert/signal.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

#include "covert/iq_block.hpp"

namespace covert {

std::string_view to_string(SignalType t) {
  switch (t) {
    case SignalType::kQpsk: return "QPSK";
    case SignalType::kQam16: return "QAM16";
    case SignalType::kOfdm: return "OFDM";
  }
  return "?";
}

SignalType parse_signal_type(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "QPSK") return SignalType::kQpsk;
  if (upper == "QAM16" || upper == "16QAM") return SignalType::kQam16;
  if (upper == "OFDM" || upper == "5G") return SignalType::kOfdm;
  throw std::invalid_argument("unknown signal type '" + std::string(name) + "'");
}

double nominal_signal_power(SignalType t, const OfdmConfig& ofdm) {
  if (t == SignalType::kOfdm) {
    return static_cast<double>(ofdm.used_subcarriers) / static_cast<double>(ofdm.fft_size);
  }
  return 1.0;
}

std::size_t frame_sample_count(SignalType t, const OfdmConfig& ofdm) {
  if (t != SignalType::kOfdm) return kBlockLength;
  const std::size_t n = frame_samples(ofdm);
  if (n % kBlockLength != 0) {
    throw std::invalid_argument("OFDM frame of " + std::to_string(n) +
                                " samples does not split into 16-sample blocks");
  }
  return n;
}

TxFrame make_frame(SignalType t, Rng& rng, const OfdmConfig& ofdm) {
  TxFrame frame;
  switch (t) {
    case SignalType::kQpsk:
    case SignalType::kQam16: {
      const auto m = t == SignalType::kQpsk ? Modulation::kQpsk : Modulation::kQam16;
      frame.bits = generate_bits(kBlockLength * static_cast<std::size_t>(bits_per_symbol(m)), rng);
      frame.samples = modulate(frame.bits, m);
      break;
    }
    case SignalType::kOfdm: {
      frame_sample_count(t, ofdm);
      const auto payload = generate_bits(frame_payload_bits(ofdm), rng);
      frame.bits = crc_attach(payload).bits();
      frame.samples = frame_tx(payload, ofdm);
      break;
    }
  }
  return frame;
}

BitVector decode_frame(SignalType t, std::span<const Complex> received, double gain, const OfdmConfig& ofdm) {
  if (gain == 0.0) throw std::invalid_argument("decode_frame: zero link gain");
  if (t == SignalType::kOfdm) return frame_rx(received, ofdm, gain).bits;
  SymbolVector equalized(received.begin(), received.end());
  for (auto& s : equalized) s /= gain;
  return demodulate(equalized, t == SignalType::kQpsk ? Modulation::kQpsk : Modulation::kQam16);
}

}  // namespace covert
