// SPDX-License-Identifier: Apache-2.0

#include "covert/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace covert {
namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  const std::vector<char>& data() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(std::vector<char> data, std::string name) : buf_(std::move(data)), name_(std::move(name)) {}

  void need(std::size_t n, const char* what) const {
    if (pos_ + n > buf_.size()) {
      throw ModelFormatError(name_ + ": truncated model file (reading " + what + " at byte " +
                             std::to_string(pos_) + ")");
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(buf_[pos_++]);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  bool at_end() const { return pos_ == buf_.size(); }
  const char* peek(std::size_t n, const char* what) {
    need(n, what);
    const char* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  std::vector<char> buf_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_model(const Classifier& model, const std::filesystem::path& path) {
  const Architecture& arch = model.architecture();
  Writer w;
  w.bytes(kModelMagic, sizeof(kModelMagic));
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(arch.filters));
  w.u32(static_cast<std::uint32_t>(arch.hidden));
  w.u32(static_cast<std::uint32_t>(kKernelWidth));
  w.u32(static_cast<std::uint32_t>(kBlockLength));
  w.u32(static_cast<std::uint32_t>(kNumClasses));
  w.u8(static_cast<std::uint8_t>(Label::kSignal));
  w.u8(static_cast<std::uint8_t>(Label::kNoise));
  w.f64(arch.dropout_rate);
  w.u64(model.parameter_count());
  for (double v : model.parameters()) w.f64(v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
  if (!out) throw std::runtime_error("failed writing model to '" + path.string() + "'");
}

Classifier load_model(const std::filesystem::path& path, const std::optional<Architecture>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open model file '" + path.string() + "'");
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(data), path.string());

  if (std::memcmp(r.peek(sizeof(kModelMagic), "magic"), kModelMagic, sizeof(kModelMagic)) != 0) {
    throw ModelFormatError(path.string() + ": not a classifier model file (bad magic)");
  }
  const auto version = r.u32("version");
  if (version != kModelFormatVersion) {
    throw ModelFormatError(path.string() + ": unsupported model format version " + std::to_string(version));
  }
  Architecture arch;
  arch.filters = r.u32("filters");
  arch.hidden = r.u32("hidden");
  const auto kernel = r.u32("kernel width");
  const auto block = r.u32("block length");
  const auto classes = r.u32("class count");
  const auto signal_index = r.u8("label order");
  const auto noise_index = r.u8("label order");
  arch.dropout_rate = r.f64("dropout rate");
  if (kernel != kKernelWidth || block != kBlockLength || classes != kNumClasses) {
    throw ModelFormatError(path.string() + ": unsupported geometry (kernel " + std::to_string(kernel) + ", block " +
                           std::to_string(block) + ", classes " + std::to_string(classes) + ")");
  }
  if (signal_index != 0 || noise_index != 1) throw ModelFormatError(path.string() + ": unexpected label order");
  if (expected) {
    if (expected->filters != arch.filters) {
      throw ModelFormatError(path.string() + ": dimension mismatch: filters " + std::to_string(arch.filters) +
                             " in file, expected " + std::to_string(expected->filters));
    }
    if (expected->hidden != arch.hidden) {
      throw ModelFormatError(path.string() + ": dimension mismatch: hidden " + std::to_string(arch.hidden) +
                             " in file, expected " + std::to_string(expected->hidden));
    }
  }
  try {
    validate(arch);
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(path.string() + ": " + e.what());
  }

  Classifier model(arch);
  const auto count = r.u64("parameter count");
  if (count != model.parameter_count()) {
    throw ModelFormatError(path.string() + ": dimension mismatch: header declares F=" + std::to_string(arch.filters) +
                           ", H=" + std::to_string(arch.hidden) + " (" + std::to_string(model.parameter_count()) +
                           " parameters) but the file stores " + std::to_string(count));
  }
  for (auto& v : model.parameters()) v = r.f64("parameters");
  if (!r.at_end()) throw ModelFormatError(path.string() + ": trailing bytes after parameters");
  return model;
}

}  // namespace covert
