// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "covert/dataset.hpp"
#include "covert/model_io.hpp"
#include "covert/nnet.hpp"
#include "gradient_check.hpp"

using namespace covert;
using namespace covert::testing;

namespace {

IqBlock random_block(Rng& rng, double variance = 1.0) {
  const auto s = complex_gaussian(kBlockLength, variance, rng);
  IqBlock b{};
  std::copy(s.begin(), s.end(), b.begin());
  return b;
}

IqBlock constant_block(Complex v) {
  IqBlock b{};
  b.fill(v);
  return b;
}

std::filesystem::path temp_path(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("init_model: shapes and determinism") {
  const Architecture arch{16, 64, 0.1};
  const auto a = Classifier::initialized(arch, 5);
  const auto b = Classifier::initialized(arch, 5);
  CHECK(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
  CHECK(a.parameter_count() == 16 * 3 + 16 + 64 * (16 * 2 * 14) + 64 + 2 * 64 + 2);
  CHECK(a.parameter_count() == 28930);
  const auto c = Classifier::initialized(arch, 6);
  CHECK_FALSE(std::equal(a.parameters().begin(), a.parameters().end(), c.parameters().begin()));
  CHECK_THROWS_AS(Classifier(Architecture{0, 4, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(Classifier(Architecture{4, 4, 1.0}), std::invalid_argument);
}

TEST_CASE("forward: zero model is uniform, outputs normalised") {
  Rng rng = make_rng(1);
  const Classifier zero;
  const auto p = zero.forward(random_block(rng));
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.5);

  for (int i = 0; i < 50; ++i) {
    const auto m = Classifier::initialized({8, 16, 0.1}, static_cast<std::uint64_t>(i));
    const auto q = m.forward(random_block(rng, 10.0));
    CHECK(std::abs(q[0] + q[1] - 1.0) < 1e-9);
    CHECK(q[0] > 0.0);
    CHECK(q[1] > 0.0);
  }

  IqBlock bad{};
  bad[3] = {std::nan(""), 0.0};
  CHECK_THROWS_AS(zero.forward(bad), std::invalid_argument);
}

TEST_CASE("forward: hand-evaluated 1-filter 1-unit network") {
  Classifier m(Architecture{1, 1, 0.0});
  const double cw[3] = {0.5, -1.0, 0.25};
  const double cb = 0.1;
  std::copy(cw, cw + 3, m.conv_weights().begin());
  m.conv_bias()[0] = cb;
  for (std::size_t i = 0; i < 28; ++i) m.hidden_weights()[i] = 0.02 * static_cast<double>(i + 1) - 0.2;
  m.hidden_bias()[0] = 0.3;
  m.output_weights()[0] = 1.5;
  m.output_weights()[1] = -0.5;
  m.output_bias()[0] = -0.2;
  m.output_bias()[1] = 0.1;

  IqBlock x{};
  for (std::size_t i = 0; i < 16; ++i) {
    x[i] = {std::sin(0.7 * static_cast<double>(i)), 0.1 * static_cast<double>(i) - 0.8};
  }

  // Step by step: conv over the I row then the Q row, ReLU, one hidden unit,
  // ReLU, two logits, softmax.
  double hidden = 0.3;
  for (int row = 0; row < 2; ++row) {
    for (int j = 0; j < 14; ++j) {
      double s = cb;
      for (int k = 0; k < 3; ++k) {
        const Complex v = x[static_cast<std::size_t>(j + k)];
        s += cw[k] * (row == 0 ? v.real() : v.imag());
      }
      const double w = 0.02 * (row * 14 + j + 1) - 0.2;
      hidden += w * std::max(s, 0.0);
    }
  }
  hidden = std::max(hidden, 0.0);
  const double z0 = 1.5 * hidden - 0.2;
  const double z1 = -0.5 * hidden + 0.1;
  const double p0 = std::exp(z0) / (std::exp(z0) + std::exp(z1));

  const auto p = m.forward(x);
  CHECK(p[0] == doctest::Approx(p0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(1.0 - p0).epsilon(1e-12));
}

TEST_CASE("dropout only in training mode") {
  Rng rng = make_rng(2);
  const auto m = Classifier::initialized({8, 32, 0.5}, 3);
  const IqBlock x = random_block(rng);
  Rng d = make_rng(4);
  CHECK(m.forward(x, false, d) == m.forward(x));
  bool differs = false;
  for (int i = 0; i < 10; ++i) differs |= (m.forward(x, true, d) != m.forward(x));
  CHECK(differs);

  const auto nodrop = Classifier::initialized({8, 32, 0.0}, 3);
  CHECK(nodrop.forward(x, true, d) == nodrop.forward(x));
}

TEST_CASE("cross-entropy values") {
  CHECK(cross_entropy({1.0, 0.0}, Label::kSignal) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(cross_entropy({0.5, 0.5}, Label::kSignal) == doctest::Approx(std::log(2.0)));
  CHECK(cross_entropy({0.5, 0.5}, Label::kNoise) == doctest::Approx(0.6931).epsilon(1e-4));
  CHECK(cross_entropy({0.9, 0.1}, Label::kNoise) == doctest::Approx(-std::log(0.1)));
  CHECK(cross_entropy({0.9, 0.1}, Label::kNoise) == doctest::Approx(2.3026).epsilon(1e-4));
  CHECK(std::isfinite(cross_entropy({1.0, 0.0}, Label::kNoise)));

  Rng rng = make_rng(3);
  CHECK(Classifier().loss(random_block(rng), Label::kNoise) == doctest::Approx(std::log(2.0)));

  const auto m = Classifier::initialized({4, 8, 0.1}, 9);
  for (int i = 0; i < 20; ++i) {
    const IqBlock x = random_block(rng);
    for (auto t : {Label::kSignal, Label::kNoise}) {
      CHECK(m.loss(x, t) == doctest::Approx(cross_entropy(m.forward(x), t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("input_gradient matches central finite differences") {
  const auto r = check_input_gradient(100, 10);
  CHECK(r.pairs == 100);
  CHECK(r.max_relative_error < 1e-4);
  // Kinks should be rare; a flood of redraws would hide a real problem.
  CHECK(r.redrawn <= 5);
}

TEST_CASE("kink detector agrees with the network's own pieces") {
  Classifier m(Architecture{1, 1, 0.0});
  m.conv_weights()[0] = 1.0;
  m.conv_bias()[0] = 1.0;
  m.hidden_weights()[0] = 1.0;
  m.hidden_bias()[0] = 0.5;
  IqBlock x{};
  x[0] = {-1.0 + 5e-5, 0.0};  // conv pre-activation at column 0 is 5e-5
  CHECK(stencil_crosses_kink(m, x, 1e-4));
  x[0] = {0.0, 0.0};
  CHECK_FALSE(stencil_crosses_kink(m, x, 1e-4));
}

TEST_CASE("input_gradient: zero model, two-target identity") {
  Rng rng = make_rng(12);
  const IqTensor g = Classifier().input_gradient(random_block(rng), Label::kNoise);
  CHECK(squared_norm(g) == 0.0);

  // L(x, signal) + L(x, noise) = -log(p0 p1); compare the summed analytic
  // gradients against a finite-difference gradient of -log(p0 p1).
  const auto m = Classifier::initialized({8, 16, 0.1}, 13);
  for (int i = 0; i < 10; ++i) {
    const IqBlock x = random_block(rng);
    const IqTensor gs = m.input_gradient(x, Label::kSignal);
    const IqTensor gn = m.input_gradient(x, Label::kNoise);
    IqTensor sum{};
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = gs[k] + gn[k];
    const IqTensor fd = numeric_gradient(
        [&](const IqBlock& b) {
          const auto p = m.forward(b);
          return -std::log(p[0] * p[1]);
        },
        x, 1e-4);
    CHECK(relative_error(sum, fd) < 1e-4);
  }
}

TEST_CASE("parameter gradient matches finite differences") {
  Rng rng = make_rng(14);
  auto m = Classifier::initialized({3, 5, 0.0}, 15);
  const IqBlock x = random_block(rng);
  std::vector<double> grad(m.parameter_count(), 0.0);
  Rng d = make_rng(0);
  m.accumulate_gradient(x, Label::kNoise, false, d, grad);
  for (std::size_t i = 0; i < m.parameter_count(); i += 7) {
    const double keep = m.parameters()[i];
    m.parameters()[i] = keep + 1e-5;
    const double up = m.loss(x, Label::kNoise);
    m.parameters()[i] = keep - 1e-5;
    const double down = m.loss(x, Label::kNoise);
    m.parameters()[i] = keep;
    CHECK(grad[i] == doctest::Approx((up - down) / 2e-5).epsilon(1e-5).scale(1e-6));
  }
}

TEST_CASE("Adam: zero gradient from a fresh state leaves weights unchanged") {
  TrainConfig cfg;
  AdamOptimizer adam(5, cfg);
  std::vector<double> w{1, -2, 3, 0.5, 0};
  const auto before = w;
  const std::vector<double> g(5, 0.0);
  adam.step(w, g);
  CHECK(w == before);

  // First step moves each weight by about lr against the gradient sign.
  const std::vector<double> g2{1, -1, 2, -3, 0.5};
  AdamOptimizer adam2(5, cfg);
  adam2.step(w, g2);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(w[i] - before[i] == doctest::Approx(-cfg.learning_rate * (g2[i] > 0 ? 1 : -1)).epsilon(1e-6));
  }
}

namespace {

LabeledDataset toy_dataset(std::size_t per_class, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  LabeledDataset d;
  for (std::size_t i = 0; i < per_class; ++i) {
    d.blocks.push_back(constant_block({1.0, 1.0}) + random_block(rng, 0.01));
    d.labels.push_back(Label::kSignal);
    d.blocks.push_back(constant_block({-1.0, -1.0}) + random_block(rng, 0.01));
    d.labels.push_back(Label::kNoise);
  }
  d.train_count = d.blocks.size() * 4 / 5;
  return d;
}

}  // namespace

TEST_CASE("train: separable toy problem") {
  const LabeledDataset data = toy_dataset(100, 20);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 16;
  cfg.seed = 21;
  const auto result = train(Classifier::initialized({4, 8, 0.1}, 22), data, cfg);
  CHECK(result.initial_loss == doctest::Approx(std::log(2.0)).epsilon(0.2 / std::log(2.0)));
  REQUIRE(result.history.size() == 20);
  CHECK(result.history.back().validation_accuracy >= 0.99);
  for (std::size_t e = 2; e < result.history.size(); ++e) {
    CHECK(result.history[e].train_loss <= result.history[e - 1].train_loss * 1.05);
  }

  const auto again = train(Classifier::initialized({4, 8, 0.1}, 22), data, cfg);
  CHECK(std::equal(result.model.parameters().begin(), result.model.parameters().end(),
                   again.model.parameters().begin()));
}

TEST_CASE("train: rejects bad input, reports divergence") {
  LabeledDataset one_class;
  one_class.blocks.assign(4, IqBlock{});
  one_class.labels.assign(4, Label::kSignal);
  one_class.train_count = 4;
  CHECK_THROWS_AS(train(Classifier({2, 2, 0.0}), one_class, {}), std::invalid_argument);
  CHECK_THROWS_AS(train(Classifier({2, 2, 0.0}), LabeledDataset{}, {}), std::invalid_argument);

  TrainConfig bad;
  bad.epochs = 0;
  CHECK_THROWS_AS(train(Classifier({2, 2, 0.0}), toy_dataset(4, 1), bad), std::invalid_argument);

  TrainConfig huge;
  huge.learning_rate = 1e300;
  huge.epochs = 3;
  LabeledDataset big = toy_dataset(20, 2);
  for (auto& b : big.blocks) b = 1e150 * b;
  CHECK_THROWS_AS(train(Classifier::initialized({2, 2, 0.0}, 1), big, huge), TrainingDivergedError);
}

TEST_CASE("build_dataset") {
  DatasetSpec spec;
  spec.n_symbols = 20000;
  Rng rng = make_rng(30);
  const auto d = build_dataset(spec, rng);
  CHECK(d.size() == 2500);
  CHECK(std::count(d.labels.begin(), d.labels.end(), Label::kSignal) == 1250);
  CHECK(std::count(d.labels.begin(), d.labels.end(), Label::kNoise) == 1250);
  CHECK(d.train_count == 2000);

  spec.n_symbols = 100;
  CHECK_THROWS_AS(build_dataset(spec, rng), std::invalid_argument);

  // Signal blocks carry extra energy on top of the common noise floor.
  spec.n_symbols = 16 * 500;
  spec.snr_db = 60;
  Rng r2 = make_rng(31);
  const auto hi = build_dataset(spec, r2);
  const double sigma2 = eavesdropper_noise_power(spec.signal, spec.snr_db, spec.topology);
  const double threshold = 16 * (1.0 + sigma2) / 2.0;
  std::size_t right = 0;
  for (std::size_t i = 0; i < hi.size(); ++i) {
    const Label guess = squared_norm(hi.blocks[i]) > threshold ? Label::kSignal : Label::kNoise;
    right += (guess == hi.labels[i]);
  }
  CHECK(static_cast<double>(right) / static_cast<double>(hi.size()) >= 0.999);

  Rng a = make_rng(32), b = make_rng(32);
  CHECK(build_dataset(spec, a).blocks == build_dataset(spec, b).blocks);

  spec.signal = SignalType::kOfdm;
  spec.n_symbols = 16 * 20;
  Rng r3 = make_rng(33);
  CHECK(build_dataset(spec, r3).size() == 40);
}

TEST_CASE("evaluate") {
  LabeledDataset d = toy_dataset(10, 40);
  Classifier always_signal(Architecture{1, 1, 0.0});
  always_signal.output_bias()[0] = 10.0;
  always_signal.output_bias()[1] = -10.0;
  const auto ev = evaluate(always_signal, d);
  CHECK(ev.accuracy() == 0.5);
  CHECK(ev.confusion[0][0] == 10);
  CHECK(ev.confusion[1][0] == 10);
  CHECK(ev.class_accuracy(Label::kSignal) == 1.0);
  CHECK(ev.class_accuracy(Label::kNoise) == 0.0);

  const auto m = Classifier::initialized({4, 8, 0.1}, 41);
  std::vector<Label> predicted;
  for (const auto& b : d.blocks) predicted.push_back(m.classify(b));
  CHECK(evaluate(m, d.blocks, predicted).accuracy() == 1.0);

  CHECK_THROWS_AS(evaluate(m, std::span<const IqBlock>{}, std::span<const Label>{}), std::invalid_argument);

  // Four blocks, a model that says "noise" iff the mean I sample is negative:
  // one conv filter picks x[j+1], one hidden unit sums the I row negated.
  Classifier sign(Architecture{1, 1, 0.0});
  sign.conv_weights()[1] = 1.0;
  std::fill(sign.hidden_weights().begin(), sign.hidden_weights().end(), 0.0);
  sign.hidden_bias()[0] = 1.0;
  for (std::size_t j = 0; j < 14; ++j) sign.hidden_weights()[j] = -1.0;
  sign.output_weights()[1] = 1.0;  // noise logit grows as the I row shrinks
  sign.output_bias()[1] = -0.5;
  // hidden = max(1 - sum(relu(I)), 0); noise logit = hidden - 0.5; signal logit = 0
  const std::vector<IqBlock> blocks{constant_block({1, 0}), constant_block({-1, 0}), constant_block({0.01, 0}),
                                    constant_block({-2, 0})};
  const std::vector<Label> truth{Label::kSignal, Label::kNoise, Label::kSignal, Label::kSignal};
  // hidden per block: 0, 1, 1 - 0.14, 1 -> labels S, N, N, N
  const auto e4 = evaluate(sign, blocks, truth);
  CHECK(e4.correct == 2);
  CHECK(e4.confusion[0][0] == 1);
  CHECK(e4.confusion[0][1] == 2);
  CHECK(e4.confusion[1][1] == 1);
}

TEST_CASE("model file round trip and errors") {
  const auto path = temp_path("covert_model_roundtrip.bin");
  const auto m = Classifier::initialized({16, 64, 0.1}, 50);
  save_model(m, path);
  const auto loaded = load_model(path, Architecture{16, 64, 0.1});
  CHECK(loaded.architecture() == m.architecture());
  CHECK(std::equal(m.parameters().begin(), m.parameters().end(), loaded.parameters().begin()));
  Rng rng = make_rng(51);
  for (int i = 0; i < 10; ++i) {
    const IqBlock x = random_block(rng);
    CHECK(loaded.forward(x) == m.forward(x));
  }

  CHECK_THROWS_WITH_AS(load_model(path, Architecture{16, 32, 0.1}), doctest::Contains("dimension mismatch"),
                       ModelFormatError);

  const auto size = std::filesystem::file_size(path);
  const auto cut = temp_path("covert_model_truncated.bin");
  std::filesystem::copy_file(path, cut, std::filesystem::copy_options::overwrite_existing);
  std::filesystem::resize_file(cut, size - 13);
  CHECK_THROWS_WITH_AS(load_model(cut), doctest::Contains("truncated"), ModelFormatError);
  std::filesystem::resize_file(cut, 5);
  CHECK_THROWS_AS(load_model(cut), ModelFormatError);

  // Header claims 65 hidden units but the weights were written for 64.
  const auto lie = temp_path("covert_model_lie.bin");
  std::filesystem::copy_file(path, lie, std::filesystem::copy_options::overwrite_existing);
  {
    std::fstream f(lie, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(16);
    const char h65[4] = {65, 0, 0, 0};
    f.write(h65, 4);
  }
  CHECK_THROWS_WITH_AS(load_model(lie), doctest::Contains("dimension mismatch"), ModelFormatError);

  {
    std::fstream f(lie, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    const char v9[4] = {9, 0, 0, 0};
    f.write(v9, 4);
  }
  CHECK_THROWS_WITH_AS(load_model(lie), doctest::Contains("version"), ModelFormatError);

  {
    std::ofstream f(lie, std::ios::binary | std::ios::trunc);
    f << "not a model at all, definitely not";
  }
  CHECK_THROWS_WITH_AS(load_model(lie), doctest::Contains("magic"), ModelFormatError);
  CHECK_THROWS_AS(load_model(temp_path("covert_no_such_model.bin")), ModelFormatError);

  std::filesystem::remove(path);
  std::filesystem::remove(cut);
  std::filesystem::remove(lie);
}

TEST_CASE("QPSK vs noise at 10 dB is learnable") {
  DatasetSpec spec;
  spec.snr_db = 10;
  spec.n_symbols = 16 * 600;
  Rng rng = make_rng(60);
  const auto data = build_dataset(spec, rng);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.seed = 61;
  const auto r = train(Classifier::initialized({16, 64, 0.1}, 62), data, cfg);
  CHECK(r.history.back().validation_accuracy >= 0.9);
}
