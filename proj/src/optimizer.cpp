#include "obl/optimizer.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "obl/error.hpp"
#include "obl/evaluation.hpp"
#include "obl/opposition.hpp"
#include "obl/random.hpp"

namespace obl {

std::string_view name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kRandomOnly:
      return "random";
    case StrategyKind::kType1:
      return "type1";
    case StrategyKind::kType2Model:
      return "type2_ann";
  }
  return "?";
}

double optimization_error(FunctionId fn, std::span<const double> x) {
  // registered minima are all 0
  return eval(fn, x);
}

RunStats run(FunctionId fn, const Strategy& strategy, std::size_t n_iters, std::uint64_t seed,
             std::size_t run_index) {
  if (arity(fn) != 2) {
    throw UsageError(std::string(name(fn)) + " is not one of the 2-D optimization problems");
  }
  if (n_iters == 0) throw UsageError("optimization run needs at least one iteration");
  const RegressorModel* model = strategy.model();
  if (strategy.kind() == StrategyKind::kType2Model) {
    if (model == nullptr) throw UsageError("type-II strategy without a model");
    if (model->arch.input_dim != arity(fn) || model->arch.output_dim != arity(fn)) {
      throw UsageError("model arity " + std::to_string(model->arch.input_dim) + " -> " +
                       std::to_string(model->arch.output_dim) + " does not match " +
                       std::string(name(fn)));
    }
  }

  const DomainBox box = default_box(fn);
  Rng rng(seed);
  RunStats stats;
  stats.run_index = run_index;
  stats.seed = seed;
  stats.per_iteration_errors.reserve(n_iters);
  for (std::size_t t = 0; t < n_iters; ++t) {
    Point guess(box.arity());
    for (std::size_t d = 0; d < guess.size(); ++d) {
      guess[d] = rng.uniform(box.lower()[d], box.upper()[d]);
    }
    double err = optimization_error(fn, guess);
    switch (strategy.kind()) {
      case StrategyKind::kRandomOnly:
        break;
      case StrategyKind::kType1:
        err = std::min(err, optimization_error(fn, type1_opposite_input(guess, box)));
        break;
      case StrategyKind::kType2Model: {
        Point opposite = predict(*model, guess);
        // a model trained on another box may still predict outside this one
        for (std::size_t d = 0; d < opposite.size(); ++d) {
          opposite[d] = std::clamp(opposite[d], box.lower()[d], box.upper()[d]);
        }
        err = std::min(err, optimization_error(fn, opposite));
        break;
      }
    }
    stats.per_iteration_errors.push_back(err);
  }
  const ErrorSummary s = summarize(stats.per_iteration_errors);
  stats.mean = s.mean;
  stats.std = s.std;
  return stats;
}

ComparisonReport compare(FunctionId fn, const RegressorModel& model, std::size_t n_samples,
                         std::size_t n_runs, std::uint64_t seed) {
  if (n_runs == 0) throw UsageError("comparison needs at least one run");
  const std::size_t n_iters = n_samples / 10;
  if (n_iters == 0) throw UsageError("n_samples must be at least 10 (0.1 * n_s iterations)");
  ComparisonReport report{fn, n_samples, n_iters, seed, {}};
  for (std::size_t r = 0; r < n_runs; ++r) {
    const std::uint64_t run_seed = derive_seed(seed, r);
    ComparisonRow row;
    row.run_index = r;
    row.seed = run_seed;
    row.random = run(fn, Strategy::random_only(), n_iters, run_seed, r);
    row.type2 = run(fn, Strategy::type2(model), n_iters, run_seed, r);
    row.type1 = run(fn, Strategy::type1(), n_iters, run_seed, r);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::span<const PublishedRun> published_runs(FunctionId fn) {
  static constexpr std::array<PublishedRun, 5> kAckley{{
      {"487.70 ± 516.362", "108.00 ± 139.03", "117.43 ± 150.53", "198.91 ± 222.677"},
      {"377.43 ± 455.85", "108.65 ± 136.91", "116.62 ± 138.02", "155.24 ± 187.24"},
      {"512.31 ± 529.517", "156.66 ± 162.61", "143.05 ± 153.73", "238.00 ± 246.19"},
      {"374.87 ± 388.63", "124.20 ± 124.50", "123.83 ± 134.19", "154.55 ± 139.38"},
      {"415.84 ± 465.70", "146.94 ± 157.14", "128.90 ± 145.57", "175.28 ± 218.05"},
  }};
  static constexpr std::array<PublishedRun, 5> kBooth{{
      {"424.53 ± 502.66", "302.66 ± 274.64", "337.39 ± 304.37", "183.97 ± 197.39"},
      {"420.03 ± 443.28", "303.23 ± 318.19", "330.74 ± 328.68", "191.13 ± 166.01"},
      {"391.28 ± 445.53", "318.19 ± 276.40", "328.68 ± 280.56", "166.01 ± 195.55"},
      {"338.94 ± 406.02", "292.60 ± 290.77", "123.83 ± 295.41", "154.55 ± 174.13"},
      {"430.72 ± 496.36", "323.67 ± 286.38", "338.95 ± 289.79", "187.19 ± 211.87"},
  }};
  static constexpr std::array<PublishedRun, 5> kBulkin{{
      {"120.40 ± 41.00", "47.26 ± 18.99", "63.89 ± 24.04", "101.21 ± 38.46"},
      {"119.20 ± 50.42", "53.78 ± 15.48", "68.58 ± 26.75", "97.11 ± 42.71"},
      {"126.78 ± 45.16", "43.09 ± 17.24", "72.83 ± 29.55", "103.427 ± 38.58"},
      {"118.39 ± 47.31", "49.17 ± 20.12", "64.02 ± 30.43", "94.27 ± 39.96"},
      {"128.58 ± 44.49", "48.23 ± 20.96", "66.43 ± 30.63", "100.40 ± 38.16"},
  }};
  switch (fn) {
    case FunctionId::kAckley:
      return kAckley;
    case FunctionId::kBooth:
      return kBooth;
    case FunctionId::kBulkin:
      return kBulkin;
    default:
      return {};
  }
}

}  // namespace obl
