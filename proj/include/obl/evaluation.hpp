#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "obl/benchfn.hpp"
#include "obl/opposition.hpp"
#include "obl/regressor.hpp"

namespace obl {

/// Exact type-II opposite of a monotone 1-D benchmark.
struct OracleResult {
  Point x;
  double target = 0.0;  // opposite output value sought
  bool clamped = false;  // target lay outside f(box); x is the nearer endpoint
};

/// Solves f(x_opp) = opposite_value(f(x), stats, scheme) by bisection on the
/// box, to |f(x_opp) - target| <= 1e-9 * (y_max - y_min). Throws
/// UnsupportedFunctionError for the 2-D problems.
OracleResult oracle_type2(FunctionId fn, std::span<const double> x, OppositionScheme scheme,
                          const OutputStats& stats, const DomainBox& box);
/// Statistics and box taken from `stats_source`.
OracleResult oracle_type2(FunctionId fn, std::span<const double> x, OppositionScheme scheme,
                          const Dataset& stats_source);

/// 100 * |target - f(x_pred)| / (y_max - y_min), i.e. percent of output range.
/// Stats given with min and max swapped are accepted.
double type2_error(FunctionId fn, std::span<const double> x, std::span<const double> x_pred,
                   OppositionScheme scheme, const OutputStats& stats, const DomainBox& box);
double type2_error(FunctionId fn, std::span<const double> x, std::span<const double> x_pred,
                   OppositionScheme scheme, const OutputStats& stats);

struct ErrorSummary {
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator; 0 for a single value
  std::size_t n = 0;
};

ErrorSummary summarize(std::span<const double> errors);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 0.0;  // one-sided, alternative: first mean is smaller
};

WelchResult welch(std::span<const double> a, std::span<const double> b);
/// Same test computed from summary statistics.
WelchResult welch(const ErrorSummary& a, const ErrorSummary& b);

/// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double dof);

/// Published error statistics of the learned opposites and of the evolving
/// fuzzy rules baseline, for one (function, scheme) pair.
struct ReferenceRow {
  FunctionId fn;
  OppositionScheme scheme;
  double proposed_mean;
  double proposed_std;
  double fuzzy_mean;
  double fuzzy_std;
  std::optional<double> p_value;
};

std::span<const ReferenceRow> reference_table();
std::optional<ReferenceRow> reference_row(FunctionId fn, OppositionScheme scheme);

struct EvaluationConfig {
  std::size_t n_test = 200;
  std::uint64_t seed = 0;
  /// Sample size assumed for the published fuzzy statistics in the Welch test.
  std::size_t reference_n = 15;
};

struct EvaluationReport {
  FunctionId fn;
  OppositionScheme scheme;
  std::size_t n_test = 0;
  ErrorSummary ann;
  std::vector<double> errors;
  std::optional<ReferenceRow> reference;
  std::optional<WelchResult> welch;
};

/// Percent errors of `model` on n_test uniform points from `box`.
EvaluationReport evaluate_model(const RegressorModel& model, FunctionId fn,
                                OppositionScheme scheme, const OutputStats& stats,
                                const DomainBox& box, const EvaluationConfig& cfg);

}  // namespace obl
