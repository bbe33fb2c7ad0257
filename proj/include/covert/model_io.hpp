// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>

#include "covert/nnet.hpp"

namespace covert {

/// Model file layout, all integers and floats little-endian:
///
///   offset  size  field
///   0       8     magic "CJCNNMDL"
///   8       4     format version (u32, currently 1)
///   12      4     filters F (u32)
///   16      4     hidden units H (u32)
///   20      4     kernel width (u32, 3)
///   24      4     block length (u32, 16)
///   28      4     classes (u32, 2)
///   32      1     class index of "signal" (u8, 0)
///   33      1     class index of "noise" (u8, 1)
///   34      8     dropout rate (f64)
///   42      8     parameter count (u64)
///   50      8*n   parameters (f64) in Classifier's flat order
inline constexpr char kModelMagic[8] = {'C', 'J', 'C', 'N', 'N', 'M', 'D', 'L'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Overwrites path. Throws std::runtime_error if the file cannot be written.
void save_model(const Classifier& model, const std::filesystem::path& path);

/// Throws ModelFormatError on a bad magic, unsupported version, truncated or
/// oversized file, or (when `expected` is given) an architecture mismatch.
Classifier load_model(const std::filesystem::path& path, const std::optional<Architecture>& expected = std::nullopt);

}  // namespace covert
