#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <json.hpp>

#include "obl/error.hpp"
#include "obl/regressor.hpp"

using namespace obl;

namespace {

MinedSet linear_pairs(std::size_t n = 1000) {
  return mine(sample(FunctionId::kLinear2x, n, SampleMode::kGrid, 0), OppositionScheme::kT1);
}

// Straight evaluation of the network, written independently of the library.
Point forward_by_hand(const RegressorModel& m, const Point& x) {
  std::vector<double> h(m.hidden.outputs);
  for (std::size_t j = 0; j < h.size(); ++j) {
    double z = m.hidden.bias[j];
    for (std::size_t i = 0; i < x.size(); ++i) {
      z += m.hidden.weights[j * x.size() + i] * m.norm_in[i].normalize(x[i]);
    }
    h[j] = std::tanh(z);
  }
  Point y(m.output.outputs);
  for (std::size_t k = 0; k < y.size(); ++k) {
    double z = m.output.bias[k];
    for (std::size_t j = 0; j < h.size(); ++j) z += m.output.weights[k * h.size() + j] * h[j];
    y[k] = m.norm_out[k].denormalize(z);
  }
  return y;
}

std::filesystem::path temp_file(const std::string& stem) {
  return std::filesystem::temp_directory_path() /
         (stem + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + ".json");
}

}  // namespace

TEST(Regressor, InitShapesAndDeterminism) {
  const Architecture arch{2, 5, 2};
  const RegressorModel a = init(arch, 9);
  EXPECT_EQ(a, init(arch, 9));
  EXPECT_NE(a.hidden.weights, init(arch, 10).hidden.weights);
  EXPECT_EQ(a.hidden.weights.size(), 10u);
  EXPECT_EQ(a.output.weights.size(), 10u);
  for (double b : a.hidden.bias) EXPECT_EQ(b, 0.0);
  for (double b : a.output.bias) EXPECT_EQ(b, 0.0);
  const double limit = std::sqrt(6.0 / (2 + 5));
  for (double w : a.hidden.weights) EXPECT_LE(std::abs(w), limit);
}

TEST(Regressor, ArchitectureValidation) {
  EXPECT_THROW(init({1, 0, 1}, 0), UsageError);
  EXPECT_THROW(init({0, 4, 1}, 0), UsageError);
}

TEST(Regressor, TrainConfigValidation) {
  const MinedSet data = linear_pairs(50);
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(train(init({}, 0), data, cfg), UsageError);
  cfg = {};
  cfg.learning_rate = -1.0;
  EXPECT_THROW(train(init({}, 0), data, cfg), UsageError);
  cfg = {};
  cfg.validation_fraction = 0.9;
  EXPECT_THROW(train(init({}, 0), data, cfg), UsageError);
}

TEST(Regressor, LearnsLinearReflection) {
  TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.seed = 1;
  const TrainResult r = train(init({}, 1), linear_pairs(), cfg);
  ASSERT_FALSE(r.history.empty());
  EXPECT_LT(r.history[r.best_epoch - 1].validation_mse, 1e-4);
  const double x2 = predict(r.model, std::array{2.0})[0];
  EXPECT_GE(x2, 7.8);
  EXPECT_LE(x2, 8.2);
}

TEST(Regressor, BestValidationCurveNonIncreasing) {
  TrainConfig cfg;
  cfg.epochs = 300;
  const TrainResult r = train(init({}, 4), linear_pairs(200), cfg);
  ASSERT_EQ(r.history.size(), 300u);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    EXPECT_LE(r.history[i].best_validation_mse, r.history[i - 1].best_validation_mse);
    EXPECT_EQ(r.history[i].epoch, i + 1);
  }
  EXPECT_EQ(r.history.back().best_validation_mse, r.history[r.best_epoch - 1].validation_mse);
  EXPECT_EQ(r.validation_indices.size(), 40u);
}

TEST(Regressor, EarlyStoppingHonoursPatience) {
  TrainConfig cfg;
  cfg.epochs = 5000;
  cfg.patience = 5;
  cfg.learning_rate = 1.0;
  const TrainResult r = train(init({}, 2), linear_pairs(100), cfg);
  EXPECT_EQ(r.history.size(), r.best_epoch + 5);
  EXPECT_LT(r.history.size(), 5000u);
}

TEST(Regressor, TrainingIsDeterministic) {
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 32;
  cfg.seed = 77;
  const TrainResult a = train(init({}, 3), linear_pairs(300), cfg);
  const TrainResult b = train(init({}, 3), linear_pairs(300), cfg);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.validation_indices, b.validation_indices);
}

TEST(Regressor, DivergenceReported) {
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 1e300;
  cfg.optimizer = Optimizer::kGradientDescent;
  try {
    train(init({}, 0), linear_pairs(100), cfg);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_LT(e.epoch(), 200u);
  }
}

TEST(Regressor, PredictMatchesHandForwardPass) {
  TrainConfig cfg;
  cfg.epochs = 50;
  const MinedSet data = mine(sample(FunctionId::kBooth, 400, SampleMode::kUniform, 3),
                             OppositionScheme::kT1);
  const TrainResult r = train(init({2, 16, 2}, 5), data, cfg);
  for (const Point& x : {Point{0.0, 0.0}, Point{-3.5, 7.25}, Point{9.0, -9.0}}) {
    const Point expect = forward_by_hand(r.model, x);
    const Point got = predict(r.model, x);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(got[k], std::clamp(expect[k], -10.0, 10.0), 1e-12);
    }
  }
  EXPECT_THROW(predict(r.model, std::array{1.0}), UsageError);
}

TEST(Regressor, PredictionsClampedIntoBox) {
  RegressorModel m = init({}, 0);
  m.output.bias[0] = 50.0;
  m.box = DomainBox({0.0}, {10.0});
  EXPECT_EQ(predict(m, std::array{1.0})[0], 10.0);
  m.output.bias[0] = -50.0;
  EXPECT_EQ(predict(m, std::array{1.0})[0], 0.0);
}

TEST(Regressor, GradientMatchesFiniteDifferences) {
  for (const Architecture& arch : {Architecture{1, 16, 1}, Architecture{2, 7, 2}}) {
    const MinedSet data =
        arch.input_dim == 1
            ? linear_pairs(60)
            : mine(sample(FunctionId::kBulkin, 60, SampleMode::kUniform, 1), OppositionScheme::kT2);
    RegressorModel m = init(arch, 13);
    m.norm_in = fit_min_max(data.inputs, arch.input_dim);
    m.norm_out = fit_min_max(data.opposites, arch.output_dim);
    for (std::size_t i = 0; i < m.hidden.bias.size(); ++i) m.hidden.bias[i] = 0.1 * double(i % 3);
    m.output.bias[0] = 0.3;
    EXPECT_LT(grad_check(m, data), 1e-4);
  }
}

TEST(Regressor, FreshModelGradientCheck) {
  const MinedSet data =
      mine(sample(FunctionId::kSquare, 10, SampleMode::kUniform, 4), OppositionScheme::kT1);
  EXPECT_LT(grad_check(init({}, 6), data), 1e-4);
}

TEST(Regressor, OutputBiasGradientIsMeanResidual) {
  const RegressorModel m = init({1, 4, 1}, 21);
  const std::vector<Point> u{{0.0}, {0.25}, {0.5}, {1.0}};
  const std::vector<Point> v{{1.0}, {0.5}, {0.2}, {0.0}};
  double residual = 0.0, sq = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double r = forward_by_hand(m, u[n])[0] - v[n][0];
    residual += r;
    sq += r * r;
  }
  EXPECT_NEAR(loss_gradient(m, u, v).output.bias[0], residual / 4.0, 1e-14);
  EXPECT_NEAR(loss(m, u, v), sq / 8.0, 1e-14);
}

TEST(Regressor, ConstantDimensionNormalization) {
  const std::vector<Point> rows{{3.0, 1.0}, {3.0, 2.0}};
  const auto mm = fit_min_max(rows, 2);
  EXPECT_EQ(mm[0].min, 3.0);
  EXPECT_EQ(mm[0].max, 4.0);
  EXPECT_EQ(mm[1].normalize(2.0), 1.0);
}

TEST(Regressor, SaveLoadRoundTripIsExact) {
  TrainConfig cfg;
  cfg.epochs = 100;
  const TrainResult r = train(init({}, 8), linear_pairs(200), cfg);
  const auto path = temp_file("obl_model");
  save(r.model, path);
  const RegressorModel back = load(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back, r.model);
  for (double x : {0.0, 1.0 / 3.0, 2.5, 9.999}) {
    EXPECT_EQ(predict(back, std::array{x}), predict(r.model, std::array{x}));
  }
  EXPECT_EQ(deserialize(serialize(init({2, 3, 2}, 1))), init({2, 3, 2}, 1));
}

TEST(Regressor, MalformedModelFiles) {
  const std::string good = serialize(init({}, 0));
  auto mutate = [&](auto&& fn) {
    nlohmann::json j = nlohmann::json::parse(good);
    fn(j);
    return j.dump();
  };
  auto expect_field = [](const std::string& text, const std::string& field) {
    try {
      deserialize(text);
      ADD_FAILURE() << "accepted malformed model naming " << field;
    } catch (const FormatError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  expect_field(mutate([](auto& j) { j["version"] = 2; }), "version");
  expect_field(mutate([](auto& j) { j.erase("weights"); }), "weights");
  expect_field(mutate([](auto& j) { j["weights"][0]["w"].erase(0); }), "w");
  expect_field(mutate([](auto& j) { j["arch"]["hidden_activation"] = "relu"; }),
               "hidden_activation");
  expect_field("{not json", "JSON");
  EXPECT_NO_THROW(deserialize(mutate([](auto& j) { j["comment"] = "extra keys are ignored"; })));
  EXPECT_THROW(load("/nonexistent/model.json"), std::runtime_error);
}
