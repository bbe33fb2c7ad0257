// SPDX-License-Identifier: Apache-2.0

#include "covert/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace covert {
namespace {

std::uint64_t derived_seed(std::uint64_t seed, Stream s) {
  return make_stream(seed, s)();
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string_view to_string(Jammer j) {
  switch (j) {
    case Jammer::kAdversarial: return "adversarial";
    case Jammer::kGaussian: return "gaussian";
    case Jammer::kNone: return "none";
  }
  return "?";
}

Jammer parse_jammer(std::string_view name) {
  if (name == "adversarial") return Jammer::kAdversarial;
  if (name == "gaussian") return Jammer::kGaussian;
  if (name == "none") return Jammer::kNone;
  throw std::invalid_argument("unknown jammer '" + std::string(name) + "' (adversarial, gaussian, none)");
}

std::string_view to_string(PnrReference r) {
  return r == PnrReference::kTransmit ? "transmit" : "eavesdropper";
}

PnrReference parse_pnr_reference(std::string_view name) {
  if (name == "transmit") return PnrReference::kTransmit;
  if (name == "eavesdropper") return PnrReference::kEavesdropper;
  throw std::invalid_argument("unknown PNR reference '" + std::string(name) + "' (transmit, eavesdropper)");
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.n_trials < 1) throw std::invalid_argument("scenario: n_trials must be >= 1");
  if (cfg.pnr_db.empty()) throw std::invalid_argument("scenario: PNR list is empty");
  for (double p : cfg.pnr_db) {
    if (!std::isfinite(p)) throw std::invalid_argument("scenario: PNR values must be finite");
  }
  if (!std::isfinite(cfg.snr_db)) throw std::invalid_argument("scenario: SNR must be finite");
  if (cfg.scenario.find_first_of(",\"\n\r") != std::string::npos) {
    throw std::invalid_argument("scenario: id must not contain commas, quotes or newlines");
  }
  validate(cfg.topology);
  if (!(cfg.attack.eps_acc_rel > 0.0 && cfg.attack.eps_acc_rel < 1.0)) {
    throw std::invalid_argument("scenario: eps_acc_rel must be in (0, 1)");
  }
  if (cfg.attack.epsilon_cap && !(*cfg.attack.epsilon_cap >= 0.0)) {
    throw std::invalid_argument("scenario: epsilon_cap must be >= 0");
  }
  validate(cfg.training.architecture);
  validate(cfg.training.train);
  const std::size_t n = cfg.training.n_symbols;
  if (n == 0 || n % kBlockLength != 0) {
    throw std::invalid_argument("scenario: train_symbols must be a positive multiple of 16");
  }
  if (!(cfg.training.validation_fraction >= 0.0 && cfg.training.validation_fraction < 1.0)) {
    throw std::invalid_argument("scenario: validation_fraction must be in [0, 1)");
  }
  if (cfg.signal_type == SignalType::kOfdm) frame_sample_count(cfg.signal_type, cfg.ofdm);
}

LinkBudget link_budget(const ScenarioConfig& cfg) {
  const Topology& t = cfg.topology;
  LinkBudget b;
  b.h_tr = path_gain(t.link(t.d_tr));
  b.h_te = path_gain(t.link(t.d_te));
  b.h_cr = path_gain(t.link(t.d_cr));
  b.h_ce = path_gain(t.link(t.d_ce));
  b.noise_power = eavesdropper_noise_power(cfg.signal_type, cfg.snr_db, t, cfg.ofdm);
  return b;
}

double perturbation_budget(const ScenarioConfig& cfg, const LinkBudget& links, double pnr_db) {
  const double p = ratio_from_db(pnr_db) * links.noise_power * static_cast<double>(kBlockLength);
  if (cfg.attack.pnr_reference == PnrReference::kEavesdropper) return p / (links.h_ce * links.h_ce);
  return p;
}

TrialSignals simulate_trial(const ScenarioConfig& cfg, const Classifier& model, double pnr_db, std::size_t trial) {
  const LinkBudget links = link_budget(cfg);
  const double p_max = perturbation_budget(cfg, links, pnr_db);

  Rng rng = make_stream(cfg.seed, kTrialStream, trial);
  TrialSignals s;
  s.frame = make_frame(cfg.signal_type, rng, cfg.ofdm);
  const std::size_t n = s.frame.samples.size();
  s.eavesdropper_noise = complex_gaussian(n, links.noise_power, rng);
  s.receiver_noise = complex_gaussian(n, links.noise_power, rng);

  SymbolVector clean_te(n), r_te(n), r_tr(n);
  for (std::size_t i = 0; i < n; ++i) {
    clean_te[i] = links.h_te * s.frame.samples[i];
    r_te[i] = clean_te[i] + s.eavesdropper_noise[i];
    r_tr[i] = links.h_tr * s.frame.samples[i] + s.receiver_noise[i];
  }
  const auto te_blocks = split_blocks(r_te);
  s.deltas.assign(te_blocks.size(), IqBlock{});

  switch (cfg.jammer) {
    case Jammer::kNone:
      break;
    case Jammer::kGaussian: {
      Rng jam = make_stream(cfg.seed, kJammerStream, trial);
      for (auto& d : s.deltas) d = gaussian_jam(p_max, jam);
      break;
    }
    case Jammer::kAdversarial: {
      if (cfg.attack.genie) {
        s.crafting_inputs = te_blocks;
      } else {
        // The jammer knows x and h_te but not the eavesdropper's noise, so it
        // substitutes a draw of its own.
        Rng craft = make_stream(cfg.seed, kCraftStream, trial);
        SymbolVector estimate = complex_gaussian(n, links.noise_power, craft);
        for (std::size_t i = 0; i < n; ++i) estimate[i] += clean_te[i];
        s.crafting_inputs = split_blocks(estimate);
      }
      AttackConfig ac;
      ac.p_max = p_max;
      ac.eps_acc = cfg.attack.eps_acc_rel * std::sqrt(p_max);
      ac.h_ce = links.h_ce;
      ac.rule = cfg.attack.rule;
      for (std::size_t b = 0; b < te_blocks.size(); ++b) {
        AttackResult r = craft_perturbation(model, s.crafting_inputs[b], ac);
        IqBlock delta = r.delta;
        if (cfg.attack.epsilon_cap && r.epsilon > *cfg.attack.epsilon_cap) {
          delta = (*cfg.attack.epsilon_cap / r.epsilon) * delta;
        }
        s.deltas[b] = delta;
        s.attacks.push_back(r);
      }
      break;
    }
  }

  const SymbolVector delta = join_blocks(s.deltas);
  s.receiver_input.resize(n);
  s.eavesdropper_input.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.receiver_input[i] = r_tr[i] + links.h_cr * delta[i];
    s.eavesdropper_input[i] = r_te[i] + links.h_ce * delta[i];
  }
  return s;
}

TrialRecord run_trial(const ScenarioConfig& cfg, const Classifier& model, double pnr_db, std::size_t trial) {
  const TrialSignals s = simulate_trial(cfg, model, pnr_db, trial);
  const LinkBudget links = link_budget(cfg);
  TrialRecord rec;
  const auto blocks = split_blocks(s.eavesdropper_input);
  rec.blocks = blocks.size();
  for (const auto& b : blocks) rec.covert_blocks += (model.classify(b) == Label::kNoise);
  for (const auto& a : s.attacks) rec.attack_successes += a.success;
  for (const auto& d : s.deltas) {
    const double p = squared_norm(d);
    rec.power_sum += p;
    rec.epsilon_sum += std::sqrt(p);
  }
  const BitVector decoded = decode_frame(cfg.signal_type, s.receiver_input, links.h_tr, cfg.ofdm);
  rec.bits = s.frame.bits.size();
  rec.bit_errors = bit_errors(s.frame.bits, decoded);
  return rec;
}

MetricsRow aggregate(const ScenarioConfig& cfg, double pnr_db, std::span<const TrialRecord> trials) {
  TrialRecord total;
  for (const auto& t : trials) {
    total.blocks += t.blocks;
    total.covert_blocks += t.covert_blocks;
    total.attack_successes += t.attack_successes;
    total.bit_errors += t.bit_errors;
    total.bits += t.bits;
    total.epsilon_sum += t.epsilon_sum;
    total.power_sum += t.power_sum;
  }
  MetricsRow row;
  row.scenario = cfg.scenario;
  row.signal_type = cfg.signal_type;
  row.snr_db = cfg.snr_db;
  row.pnr_db = pnr_db;
  row.jammer = cfg.jammer;
  row.n_trials = trials.size();
  row.seed = cfg.seed;
  if (total.blocks > 0) {
    const auto nb = static_cast<double>(total.blocks);
    row.covertness_rate = static_cast<double>(total.covert_blocks) / nb;
    row.attack_success_rate = static_cast<double>(total.attack_successes) / nb;
    row.mean_epsilon = total.epsilon_sum / nb;
  }
  if (total.bits > 0) row.ber = static_cast<double>(total.bit_errors) / static_cast<double>(total.bits);
  return row;
}

std::vector<TrialRecord> run_point(const ScenarioConfig& cfg, const Classifier& model, double pnr_db) {
  std::vector<TrialRecord> records(cfg.n_trials);
  parallel_for(cfg.n_trials, [&](std::size_t t) { records[t] = run_trial(cfg, model, pnr_db, t); });
  return records;
}

std::vector<MetricsRow> run_scenario(const ScenarioConfig& cfg, const Classifier& model) {
  validate(cfg);
  std::vector<MetricsRow> rows;
  rows.reserve(cfg.pnr_db.size());
  for (double pnr : cfg.pnr_db) {
    const auto records = run_point(cfg, model, pnr);
    rows.push_back(aggregate(cfg, pnr, records));
  }
  return rows;
}

double covertness_rate(const Classifier& model, std::span<const IqBlock> blocks) {
  if (blocks.empty()) throw std::invalid_argument("covertness_rate: empty evaluation set");
  std::size_t noise = 0;
  for (const auto& b : blocks) noise += (model.classify(b) == Label::kNoise);
  return static_cast<double>(noise) / static_cast<double>(blocks.size());
}

DatasetSpec dataset_spec(const ScenarioConfig& cfg) {
  DatasetSpec spec;
  spec.signal = cfg.signal_type;
  spec.snr_db = cfg.snr_db;
  spec.topology = cfg.topology;
  spec.n_symbols = cfg.training.n_symbols;
  spec.validation_fraction = cfg.training.validation_fraction;
  spec.ofdm = cfg.ofdm;
  return spec;
}

LabeledDataset scenario_dataset(const ScenarioConfig& cfg) {
  Rng rng = make_stream(cfg.seed, kDatasetStream);
  return build_dataset(dataset_spec(cfg), rng);
}

LabeledDataset evaluation_dataset(const ScenarioConfig& cfg) {
  Rng rng = make_stream(cfg.seed, kEvaluationStream);
  return build_dataset(dataset_spec(cfg), rng);
}

TrainResult train_classifier(const ScenarioConfig& cfg) {
  validate(cfg);
  const LabeledDataset data = scenario_dataset(cfg);
  TrainConfig tc = cfg.training.train;
  tc.seed = derived_seed(cfg.seed, kTrainStream);
  return train(Classifier::initialized(cfg.training.architecture, derived_seed(cfg.seed, kInitStream)), data, tc);
}

}  // namespace covert
