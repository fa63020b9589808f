#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "obl/benchfn.hpp"
#include "obl/regressor.hpp"

namespace obl {

enum class StrategyKind { kRandomOnly, kType1, kType2Model };

std::string_view name(StrategyKind kind);

/// How a random guess is paired with an opposite guess. The type-II strategy
/// borrows a trained model; the model must outlive the strategy.
class Strategy {
 public:
  static Strategy random_only() { return Strategy(StrategyKind::kRandomOnly, nullptr); }
  static Strategy type1() { return Strategy(StrategyKind::kType1, nullptr); }
  static Strategy type2(const RegressorModel& model) {
    return Strategy(StrategyKind::kType2Model, &model);
  }

  StrategyKind kind() const { return kind_; }
  const RegressorModel* model() const { return model_; }

 private:
  Strategy(StrategyKind kind, const RegressorModel* model) : kind_(kind), model_(model) {}

  StrategyKind kind_;
  const RegressorModel* model_;
};

struct RunStats {
  std::vector<double> per_iteration_errors;
  double mean = 0.0;
  double std = 0.0;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
};

/// Error of a point: f(x) - f(x*), which is f(x) for the registered problems.
double optimization_error(FunctionId fn, std::span<const double> x);

/// Each iteration draws a uniform guess from the box and keeps the lower
/// error of the guess and its opposite (type-I reflection or the model's
/// prediction). The guess stream depends only on `seed`, so different
/// strategies see identical guesses.
RunStats run(FunctionId fn, const Strategy& strategy, std::size_t n_iters, std::uint64_t seed,
             std::size_t run_index = 0);

struct ComparisonRow {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  RunStats random;
  RunStats type2;
  RunStats type1;
};

struct ComparisonReport {
  FunctionId fn;
  std::size_t n_samples = 0;
  std::size_t n_iters = 0;
  std::uint64_t seed = 0;
  std::vector<ComparisonRow> rows;
};

/// n_runs runs per strategy with 0.1 * n_samples iterations each; run r uses
/// derive_seed(seed, r).
ComparisonReport compare(FunctionId fn, const RegressorModel& model, std::size_t n_samples,
                         std::size_t n_runs, std::uint64_t seed);

/// Published per-run cells ("mean ± std") for the three 2-D problems, kept as
/// reference text only.
struct PublishedRun {
  std::string_view random;
  std::string_view type2_ann;
  std::string_view type2_fis;
  std::string_view type1;
};

std::span<const PublishedRun> published_runs(FunctionId fn);

}  // namespace obl
