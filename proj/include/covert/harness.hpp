// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covert/attack.hpp"
#include "covert/channel.hpp"
#include "covert/dataset.hpp"
#include "covert/nnet.hpp"
#include "covert/signal.hpp"

namespace covert {

// Stream identifiers for make_stream(); each consumer of randomness gets
// its own so adding draws in one place never shifts another.
enum Stream : std::uint64_t {
  kTrialStream = 100,
  kJammerStream = 101,
  kCraftStream = 102,
  kDatasetStream = 200,
  kInitStream = 201,
  kTrainStream = 202,
  kEvaluationStream = 203,
};

enum class Jammer { kAdversarial, kGaussian, kNone };

std::string_view to_string(Jammer j);
Jammer parse_jammer(std::string_view name);

/// Where the PNR axis is measured: at the jammer's output (default) or as
/// received power at the eavesdropper.
enum class PnrReference { kTransmit, kEavesdropper };

std::string_view to_string(PnrReference r);
PnrReference parse_pnr_reference(std::string_view name);

struct AttackSettings {
  double eps_acc_rel = 1.0 / 128.0;  ///< bisection accuracy as a fraction of sqrt(P_max)
  bool genie = false;                ///< craft on the eavesdropper's actual noisy input
  BisectionRule rule = BisectionRule::kMinimalPower;
  PnrReference pnr_reference = PnrReference::kTransmit;
  std::optional<double> epsilon_cap;  ///< optional ceiling on the transmit amplitude
};

struct TrainSettings {
  Architecture architecture;
  TrainConfig train;
  std::size_t n_symbols = 20000;
  double validation_fraction = 0.2;
};

/// One experiment: a PNR sweep for a fixed waveform, SNR, topology and jammer.
struct ScenarioConfig {
  std::string scenario = "default";
  SignalType signal_type = SignalType::kQpsk;
  double snr_db = 3.0;
  std::vector<double> pnr_db = {-20, -16, -12, -8, -4, 0};
  Topology topology;
  Jammer jammer = Jammer::kAdversarial;
  std::size_t n_trials = 1000;  ///< frames per PNR point
  std::uint64_t seed = 1;
  AttackSettings attack;
  TrainSettings training;
  OfdmConfig ofdm;
};

void validate(const ScenarioConfig& cfg);

/// Gains of the four links and the common noise power.
struct LinkBudget {
  double noise_power = 0.0;
  double h_tr = 1.0, h_te = 1.0, h_cr = 1.0, h_ce = 1.0;
};

LinkBudget link_budget(const ScenarioConfig& cfg);

/// Jammer power budget per block, P_max = pnr * noise_power * 16 (divided by
/// h_ce^2 when the PNR is referenced at the eavesdropper).
double perturbation_budget(const ScenarioConfig& cfg, const LinkBudget& links, double pnr_db);

/// Every signal of one trial, kept so the superposition can be inspected.
struct TrialSignals {
  TxFrame frame;
  SymbolVector receiver_noise;
  SymbolVector eavesdropper_noise;
  std::vector<IqBlock> crafting_inputs;  ///< what the jammer computes its gradient on
  std::vector<IqBlock> deltas;           ///< transmitted perturbation per block
  std::vector<AttackResult> attacks;     ///< empty unless the jammer is adversarial
  SymbolVector receiver_input;           ///< h_tr x + h_cr delta + n
  SymbolVector eavesdropper_input;       ///< h_te x + h_ce delta + n'
};

/// Per-trial tallies; a trial is one frame (one block for QPSK/QAM16).
struct TrialRecord {
  std::size_t blocks = 0;
  std::size_t covert_blocks = 0;  ///< eavesdropper said "noise"
  std::size_t attack_successes = 0;
  std::size_t bit_errors = 0;
  std::size_t bits = 0;
  double epsilon_sum = 0.0;  ///< sum of transmit ||delta||_2
  double power_sum = 0.0;    ///< sum of transmit ||delta||_2^2

  bool operator==(const TrialRecord&) const = default;
};

/// Trial randomness depends only on (seed, trial), not on the PNR point, so
/// every PNR point sees the same messages and noise.
TrialSignals simulate_trial(const ScenarioConfig& cfg, const Classifier& model, double pnr_db, std::size_t trial);
TrialRecord run_trial(const ScenarioConfig& cfg, const Classifier& model, double pnr_db, std::size_t trial);

struct MetricsRow {
  std::string scenario;
  SignalType signal_type = SignalType::kQpsk;
  double snr_db = 0.0;
  double pnr_db = 0.0;
  Jammer jammer = Jammer::kNone;
  double covertness_rate = 0.0;
  double ber = 0.0;
  double attack_success_rate = 0.0;
  double mean_epsilon = 0.0;
  std::size_t n_trials = 0;
  std::uint64_t seed = 0;

  bool operator==(const MetricsRow&) const = default;
};

MetricsRow aggregate(const ScenarioConfig& cfg, double pnr_db, std::span<const TrialRecord> trials);

/// All trials for one PNR point, in trial order.
std::vector<TrialRecord> run_point(const ScenarioConfig& cfg, const Classifier& model, double pnr_db);

/// One row per PNR value, in configuration order.
std::vector<MetricsRow> run_scenario(const ScenarioConfig& cfg, const Classifier& model);

/// Fraction of blocks the classifier labels noise. Throws for an empty set.
double covertness_rate(const Classifier& model, std::span<const IqBlock> blocks);

DatasetSpec dataset_spec(const ScenarioConfig& cfg);
/// Training data for the scenario's eavesdropper (stream fixed by the seed).
LabeledDataset scenario_dataset(const ScenarioConfig& cfg);
/// Fresh data from an independent stream, for reporting.
LabeledDataset evaluation_dataset(const ScenarioConfig& cfg);
/// One classifier per (signal type, SNR), trained on scenario_dataset().
TrainResult train_classifier(const ScenarioConfig& cfg);

// --- configuration files: flat "key = value" lines, '#' starts a comment ---

/// Names accepted by apply_setting(), in documentation order.
std::span<const std::string_view> config_keys();

/// Throws std::invalid_argument for unknown keys or malformed values.
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(std::string_view text);

/// "a,b,c" or "start:step:stop" (inclusive).
std::vector<double> parse_pnr_list(std::string_view text);

// --- CSV ---

inline constexpr std::string_view kCsvHeader =
    "scenario,signal_type,snr_db,pnr_db,jammer,covertness_rate,ber,attack_success_rate,mean_epsilon,n_trials,seed";

/// Shortest round-trip decimal representation.
std::string format_number(double v);

std::string to_csv(std::span<const MetricsRow> rows);
/// Overwrites path. Throws std::runtime_error if it cannot be written.
void emit_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path);
std::vector<MetricsRow> parse_csv(std::string_view text);
std::vector<MetricsRow> read_csv(const std::filesystem::path& path);

}  // namespace covert
