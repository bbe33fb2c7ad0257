// SPDX-License-Identifier: Apache-2.0

#include "covert/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace covert {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (size, direction) and kept for the
// lifetime of the process.
class PlanCache {
 public:
  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<fftw_complex> scratch(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, scratch.data(), scratch.data(), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void transform(std::span<const Complex> in, std::span<Complex> out, int sign) {
  if (in.size() != out.size()) throw std::invalid_argument("dft: input/output length mismatch");
  if (in.empty()) return;
  const int n = static_cast<int>(in.size());
  std::vector<Complex> buffer(in.begin(), in.end());
  auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
  fftw_execute_dft(plan_cache().get(n, sign), data, data);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buffer[i] * scale;
}

}  // namespace

void unitary_dft(std::span<const Complex> in, std::span<Complex> out) {
  transform(in, out, FFTW_FORWARD);
}

void unitary_idft(std::span<const Complex> in, std::span<Complex> out) {
  transform(in, out, FFTW_BACKWARD);
}

}  // namespace covert
