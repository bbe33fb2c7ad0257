// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "covert/modem.hpp"
#include "covert/rng.hpp"
#include "covert/waveform5g.hpp"

namespace covert {

/// Waveform the transmitter uses; the eavesdropper knows which one.
enum class SignalType { kQpsk, kQam16, kOfdm };

std::string_view to_string(SignalType t);
/// Accepts QPSK, QAM16/16QAM, OFDM (case-insensitive).
SignalType parse_signal_type(std::string_view name);

/// One transmission unit. A QPSK/QAM16 frame is a single 16-symbol block; an
/// OFDM frame is a CRC-protected CP-OFDM burst whose length is a multiple of
/// the block length.
struct TxFrame {
  BitVector bits;        ///< every bit the receiver must recover
  SymbolVector samples;  ///< transmitted baseband samples
};

/// Average power per transmitted sample (unit-energy constellations; OFDM
/// scales by the occupied fraction of the FFT).
double nominal_signal_power(SignalType t, const OfdmConfig& ofdm = {});

std::size_t frame_sample_count(SignalType t, const OfdmConfig& ofdm = {});

TxFrame make_frame(SignalType t, Rng& rng, const OfdmConfig& ofdm = {});

/// Hard decisions for the bits of one frame given the received samples and
/// the (known) flat gain of the transmitter link.
BitVector decode_frame(SignalType t, std::span<const Complex> received, double gain,
                       const OfdmConfig& ofdm = {});

}  // namespace covert
