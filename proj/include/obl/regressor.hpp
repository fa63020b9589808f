#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "obl/benchfn.hpp"
#include "obl/opposition.hpp"

namespace obl {

/// input -> tanh hidden layer -> identity output.
struct Architecture {
  std::size_t input_dim = 1;
  std::size_t hidden_units = 16;
  std::size_t output_dim = 1;

  /// Throws UsageError for zero-sized layers.
  void validate() const;
  bool operator==(const Architecture&) const = default;
};

/// Dense layer, weights stored row-major as (outputs x inputs).
struct Layer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double& w(std::size_t row, std::size_t col) { return weights[row * inputs + col]; }
  double w(std::size_t row, std::size_t col) const { return weights[row * inputs + col]; }
  bool operator==(const Layer&) const = default;
};

/// Affine map of [min, max] onto [0, 1].
struct MinMax {
  double min = 0.0;
  double max = 1.0;

  double normalize(double v) const { return (v - min) / (max - min); }
  double denormalize(double u) const { return min + u * (max - min); }
  bool operator==(const MinMax&) const = default;
};

/// Fits per-dimension ranges; a constant dimension gets a unit-width range so
/// the map stays invertible.
std::vector<MinMax> fit_min_max(std::span<const Point> rows, std::size_t dim);

struct RegressorModel {
  Architecture arch;
  Layer hidden;
  Layer output;
  std::vector<MinMax> norm_in;
  std::vector<MinMax> norm_out;
  /// Predictions are clamped into this box once the model has been trained.
  std::optional<DomainBox> box;
  std::uint64_t seed = 0;

  bool operator==(const RegressorModel&) const = default;
};

/// Glorot-uniform weights, zero biases, identity normalization.
RegressorModel init(const Architecture& arch, std::uint64_t seed);

enum class Optimizer { kGradientDescent, kAdam };

std::optional<Optimizer> parse_optimizer(std::string_view text);
std::string_view name(Optimizer opt);

struct TrainConfig {
  std::size_t epochs = 6000;
  double learning_rate = 0.1;
  std::size_t batch_size = 0;  // 0 means full batch
  double validation_fraction = 0.2;
  std::size_t patience = 1000;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::kAdam;

  void validate() const;
};

struct EpochLoss {
  std::size_t epoch = 0;
  double train_mse = 0.0;
  double validation_mse = 0.0;
  double best_validation_mse = 0.0;
};

struct TrainResult {
  RegressorModel model;
  std::vector<EpochLoss> history;
  std::size_t best_epoch = 0;
  std::vector<std::size_t> validation_indices;
};

/// Fits x -> opposite on `data` by minimizing squared error in normalized
/// space. The returned model carries the weights with the lowest validation
/// error; the loop stops after `patience` epochs without improvement.
TrainResult train(RegressorModel model, const MinedSet& data, const TrainConfig& cfg);

/// Network output for a raw input, denormalized and clamped into the box.
Point predict(const RegressorModel& model, std::span<const double> x);

/// Parameter gradient of
///   L = 1/(2N) * sum_n ||net(u_n) - v_n||^2
/// where u, v are already normalized inputs and targets. Returned in the same
/// shape as the model's layers.
struct Gradient {
  Layer hidden;
  Layer output;
};

double loss(const RegressorModel& model, std::span<const Point> inputs,
            std::span<const Point> targets);
Gradient loss_gradient(const RegressorModel& model, std::span<const Point> inputs,
                       std::span<const Point> targets);

/// Max relative discrepancy between backprop and central finite differences
/// (step 1e-6) over every parameter, using the model's normalization.
double grad_check(const RegressorModel& model, const MinedSet& data);

/// Versioned JSON document; doubles round-trip exactly.
std::string serialize(const RegressorModel& model);
/// Throws FormatError naming the offending field.
RegressorModel deserialize(std::string_view text);

void save(const RegressorModel& model, const std::filesystem::path& path);
RegressorModel load(const std::filesystem::path& path);

}  // namespace obl
