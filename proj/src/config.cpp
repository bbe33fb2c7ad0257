// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "covert/harness.hpp"

namespace covert {
namespace {

constexpr std::array<std::string_view, 31> kKeys = {
    "scenario",      "signal_type",  "snr_db",         "pnr_db",          "jammer",
    "n_trials",      "seed",         "d_tr",           "d_te",            "d_cr",
    "d_ce",          "d0",           "gamma",          "eps_acc_rel",     "genie",
    "literal_bisection", "pnr_reference", "epsilon_cap", "filters",       "hidden",
    "dropout",       "epochs",       "batch_size",     "learning_rate",   "adam_beta1",
    "adam_beta2",    "adam_eps",     "train_symbols",  "validation_fraction", "fft_size",
    "cp_len",
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw std::invalid_argument("config: bad value '" + std::string(value) + "' for key '" + std::string(key) +
                              "' (expected " + expected + ")");
}

double to_double(std::string_view key, std::string_view value) {
  value = trim(value);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) bad_value(key, value, "a number");
  return v;
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
  value = trim(value);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "a non-negative integer");
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "true or false");
}

}  // namespace

std::span<const std::string_view> config_keys() {
  return kKeys;
}

std::vector<double> parse_pnr_list(std::string_view text) {
  text = trim(text);
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string_view::npos) bad_value("pnr_db", text, "start:step:stop");
    const double start = to_double("pnr_db", text.substr(0, a));
    const double step = to_double("pnr_db", text.substr(a + 1, b - a - 1));
    const double stop = to_double("pnr_db", text.substr(b + 1));
    if (!(step > 0.0) || stop < start) bad_value("pnr_db", text, "start:step:stop with step > 0");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    out.push_back(to_double("pnr_db", item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "scenario") {
    cfg.scenario = std::string(value);
  } else if (key == "signal_type") {
    cfg.signal_type = parse_signal_type(value);
  } else if (key == "snr_db") {
    cfg.snr_db = to_double(key, value);
  } else if (key == "pnr_db") {
    cfg.pnr_db = parse_pnr_list(value);
  } else if (key == "jammer") {
    cfg.jammer = parse_jammer(value);
  } else if (key == "n_trials") {
    cfg.n_trials = to_uint(key, value);
  } else if (key == "seed") {
    cfg.seed = to_uint(key, value);
  } else if (key == "d_tr") {
    cfg.topology.d_tr = to_double(key, value);
  } else if (key == "d_te") {
    cfg.topology.d_te = to_double(key, value);
  } else if (key == "d_cr") {
    cfg.topology.d_cr = to_double(key, value);
  } else if (key == "d_ce") {
    cfg.topology.d_ce = to_double(key, value);
  } else if (key == "d0") {
    cfg.topology.reference_distance = to_double(key, value);
  } else if (key == "gamma") {
    cfg.topology.path_loss_exponent = to_double(key, value);
  } else if (key == "eps_acc_rel") {
    cfg.attack.eps_acc_rel = to_double(key, value);
  } else if (key == "genie") {
    cfg.attack.genie = to_bool(key, value);
  } else if (key == "literal_bisection") {
    cfg.attack.rule = to_bool(key, value) ? BisectionRule::kLiteral : BisectionRule::kMinimalPower;
  } else if (key == "pnr_reference") {
    cfg.attack.pnr_reference = parse_pnr_reference(value);
  } else if (key == "epsilon_cap") {
    if (value == "none" || value.empty()) {
      cfg.attack.epsilon_cap.reset();
    } else {
      cfg.attack.epsilon_cap = to_double(key, value);
    }
  } else if (key == "filters") {
    cfg.training.architecture.filters = to_uint(key, value);
  } else if (key == "hidden") {
    cfg.training.architecture.hidden = to_uint(key, value);
  } else if (key == "dropout") {
    cfg.training.architecture.dropout_rate = to_double(key, value);
  } else if (key == "epochs") {
    cfg.training.train.epochs = to_uint(key, value);
  } else if (key == "batch_size") {
    cfg.training.train.batch_size = to_uint(key, value);
  } else if (key == "learning_rate") {
    cfg.training.train.learning_rate = to_double(key, value);
  } else if (key == "adam_beta1") {
    cfg.training.train.beta1 = to_double(key, value);
  } else if (key == "adam_beta2") {
    cfg.training.train.beta2 = to_double(key, value);
  } else if (key == "adam_eps") {
    cfg.training.train.epsilon = to_double(key, value);
  } else if (key == "train_symbols") {
    cfg.training.n_symbols = to_uint(key, value);
  } else if (key == "validation_fraction") {
    cfg.training.validation_fraction = to_double(key, value);
  } else if (key == "fft_size") {
    cfg.ofdm.fft_size = to_uint(key, value);
  } else if (key == "cp_len") {
    cfg.ofdm.cp_len = to_uint(key, value);
  } else {
    throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
  }
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace covert
