// SPDX-License-Identifier: Apache-2.0
//
// covertsim: train the eavesdropper's classifier, sweep the cooperative
// jammer's power and report covertness / BER as CSV.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covert/harness.hpp"
#include "covert/model_io.hpp"

namespace {

using covert::ScenarioConfig;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Scenario file (key = value lines)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Master seed (overrides the config)");
  for (auto key : covert::config_keys()) {
    if (key == "seed") continue;
    const std::string name(key);
    cmd->add_option_function<std::string>(
           "--" + name, [&opts, name](const std::string& v) { opts.overrides[name] = v; },
           "Override config key '" + name + "'")
        ->group("Config overrides");
  }
}

ScenarioConfig resolve(const CommonOptions& opts) {
  ScenarioConfig cfg = opts.config_path.empty() ? ScenarioConfig{} : covert::load_config(opts.config_path);
  for (const auto& [k, v] : opts.overrides) covert::apply_setting(cfg, k, v);
  if (opts.seed) cfg.seed = *opts.seed;
  covert::validate(cfg);
  return cfg;
}

void print_evaluation(const char* name, const covert::Evaluation& ev) {
  std::printf("%-12s accuracy %.4f  (signal recall %.4f, noise recall %.4f)  confusion [[%zu %zu] [%zu %zu]]\n", name,
              ev.accuracy(), ev.class_accuracy(covert::Label::kSignal), ev.class_accuracy(covert::Label::kNoise),
              ev.confusion[0][0], ev.confusion[0][1], ev.confusion[1][0], ev.confusion[1][1]);
}

covert::Classifier obtain_model(const ScenarioConfig& cfg, const std::string& model_path) {
  if (!model_path.empty()) {
    if (!std::filesystem::exists(model_path)) {
      throw std::invalid_argument("model file '" + model_path + "' does not exist");
    }
    return covert::load_model(model_path, cfg.training.architecture);
  }
  std::cerr << "no --model given; training a classifier for " << covert::to_string(cfg.signal_type) << " at "
            << cfg.snr_db << " dB\n";
  return covert::train_classifier(cfg).model;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covert communication against a neural signal detector via a cooperative jammer"};
  app.require_subcommand(1);

  CommonOptions train_opts, sweep_opts, eval_opts;
  std::string train_model, sweep_model, sweep_out, eval_model;
  std::string sweep_jammers;

  auto* train_cmd = app.add_subcommand("train", "Build a dataset, train the eavesdropper's classifier, save it");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--model,--out", train_model, "Output model file")->required();

  auto* sweep_cmd = app.add_subcommand("attack-sweep", "Run the PNR sweep and write metrics CSV");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--model", sweep_model, "Trained model file (trained in-process when omitted)");
  sweep_cmd->add_option("--out", sweep_out, "CSV output path (stdout when omitted)");
  sweep_cmd->add_option("--jammers", sweep_jammers, "Comma-separated jammers to run in turn (overrides 'jammer')");

  auto* eval_cmd = app.add_subcommand("eval", "Report classifier accuracy on fresh data");
  add_common(eval_cmd, eval_opts);
  eval_cmd->add_option("--model", eval_model, "Trained model file (trained in-process when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      const ScenarioConfig cfg = resolve(train_opts);
      const auto result = covert::train_classifier(cfg);
      std::printf("initial loss %.4f\n", result.initial_loss);
      for (const auto& e : result.history) {
        std::printf("epoch %3zu  loss %.5f  train acc %.4f  val acc %.4f\n", e.epoch, e.train_loss, e.train_accuracy,
                    e.validation_accuracy);
      }
      covert::save_model(result.model, train_model);
      std::printf("saved %s\n", train_model.c_str());
    } else if (*sweep_cmd) {
      ScenarioConfig cfg = resolve(sweep_opts);
      const covert::Classifier model = obtain_model(cfg, sweep_model);
      std::vector<covert::Jammer> jammers{cfg.jammer};
      if (!sweep_jammers.empty()) {
        jammers.clear();
        for (const auto& name : CLI::detail::split(sweep_jammers, ',')) jammers.push_back(covert::parse_jammer(name));
      }
      std::vector<covert::MetricsRow> rows;
      for (auto j : jammers) {
        cfg.jammer = j;
        const auto part = covert::run_scenario(cfg, model);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      if (sweep_out.empty()) {
        std::cout << covert::to_csv(rows);
      } else {
        covert::emit_csv(rows, sweep_out);
      }
    } else if (*eval_cmd) {
      const ScenarioConfig cfg = resolve(eval_opts);
      const covert::Classifier model = obtain_model(cfg, eval_model);
      const auto train_data = covert::scenario_dataset(cfg);
      print_evaluation("validation", covert::evaluate(model, train_data.validation_blocks(),
                                                      train_data.validation_labels()));
      print_evaluation("fresh", covert::evaluate(model, covert::evaluation_dataset(cfg)));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
