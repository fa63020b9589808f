#include "obl/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "obl/error.hpp"
#include "obl/random.hpp"

namespace obl {
namespace {

OutputStats ordered(OutputStats stats) {
  if (stats.y_min > stats.y_max) std::swap(stats.y_min, stats.y_max);
  return stats;
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

OracleResult oracle_type2(FunctionId fn, std::span<const double> x, OppositionScheme scheme,
                          const OutputStats& stats, const DomainBox& box) {
  if (!is_monotone(fn)) {
    throw UnsupportedFunctionError(std::string(name(fn)) +
                                   " is not a monotone 1-D benchmark; no exact oracle");
  }
  validate_box(fn, box);
  const double y = eval(fn, x, box);
  const double target = opposite_value(y, stats, scheme);

  double lo = box.lower()[0];
  double hi = box.upper()[0];
  const double f_lo = eval(fn, std::array{lo}, box);
  const double f_hi = eval(fn, std::array{hi}, box);
  const bool increasing = f_hi >= f_lo;
  if (target <= std::min(f_lo, f_hi) || target >= std::max(f_lo, f_hi)) {
    const bool at_low_end = (target <= std::min(f_lo, f_hi)) == increasing;
    const double end = at_low_end ? lo : hi;
    const double f_end = at_low_end ? f_lo : f_hi;
    return {{end}, target, f_end != target};
  }

  const double tol = 1e-9 * (stats.y_max - stats.y_min);
  double best = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = eval(fn, std::array{mid}, box);
    best = mid;
    if (std::abs(f_mid - target) <= tol) break;
    if ((f_mid < target) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {{best}, target, false};
}

OracleResult oracle_type2(FunctionId fn, std::span<const double> x, OppositionScheme scheme,
                          const Dataset& stats_source) {
  return oracle_type2(fn, x, scheme, output_stats(stats_source), stats_source.box);
}

double type2_error(FunctionId fn, std::span<const double> x, std::span<const double> x_pred,
                   OppositionScheme scheme, const OutputStats& stats, const DomainBox& box) {
  const OutputStats s = ordered(stats);
  const double range = s.y_max - s.y_min;
  if (!(range > 0.0)) throw DomainError("type-II error undefined for a degenerate output range");
  const double target = opposite_value(eval(fn, x, box), s, scheme);
  return 100.0 * std::abs(target - eval(fn, x_pred, box)) / range;
}

double type2_error(FunctionId fn, std::span<const double> x, std::span<const double> x_pred,
                   OppositionScheme scheme, const OutputStats& stats) {
  return type2_error(fn, x, x_pred, scheme, stats, default_box(fn));
}

ErrorSummary summarize(std::span<const double> errors) {
  if (errors.empty()) throw UsageError("cannot summarize an empty error sample");
  const double mean = mean_of(errors);
  double ss = 0.0;
  for (const double e : errors) ss += (e - mean) * (e - mean);
  const double sd =
      errors.size() > 1 ? std::sqrt(ss / static_cast<double>(errors.size() - 1)) : 0.0;
  return {mean, sd, errors.size()};
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw UsageError("incomplete beta needs a, b > 0");
  if (std::isnan(x)) return x;
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw UsageError("Student-t needs positive degrees of freedom");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
  return t >= 0.0 ? 1.0 - tail : tail;
}

WelchResult welch(const ErrorSummary& a, const ErrorSummary& b) {
  if (a.n < 2 || b.n < 2) throw UsageError("Welch test needs at least 2 samples per group");
  const double na = static_cast<double>(a.n);
  const double nb = static_cast<double>(b.n);
  const double va = a.std * a.std / na;
  const double vb = b.std * b.std / nb;
  const double se2 = va + vb;
  if (!(se2 > 0.0)) throw DomainError("Welch t undefined: both samples have zero variance");
  const double t = (a.mean - b.mean) / std::sqrt(se2);
  const double dof = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  return {t, dof, student_t_cdf(t, dof)};
}

WelchResult welch(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw UsageError("Welch test needs at least 2 samples per group");
  return welch(summarize(a), summarize(b));
}

std::span<const ReferenceRow> reference_table() {
  using F = FunctionId;
  using S = OppositionScheme;
  static const std::array<ReferenceRow, 24> rows{{
      {F::kCubicShift, S::kT1, 0.76, 0.85, 4.41, 2.44, 0.0005},
      {F::kCubicShift, S::kT2, 9.53, 12.99, 11.96, 12.82, 0.3398},
      {F::kCubicShift, S::kT3, 4.65, 9.95, 6.82, 10.62, 0.3214},
      {F::kLogShift, S::kT1, 18.95, 18.00, 30.05, 20.87, 0.11},
      {F::kLogShift, S::kT2, 10.02, 15.73, 11.20, 18.48, 0.4398},
      {F::kLogShift, S::kT3, 2.98, 9.85, 6.39, 7.87, 0.2020},
      {F::kLinear2x, S::kT1, 0.19, 0.26, 0.01, 0.01, 0.9693},
      {F::kLinear2x, S::kT2, 6.24, 11.08, 21.03, 14.31, 0.0091},
      // published p-value for this row is garbled
      {F::kLinear2x, S::kT3, 0.30, 0.58, 0.25, 0.65, std::nullopt},
      {F::kSquare, S::kT1, 0.49, 0.55, 3.04, 1.72, 0.0005},
      {F::kSquare, S::kT2, 8.46, 12.56, 15.02, 14.31, 0.1456},
      {F::kSquare, S::kT3, 3.61, 7.98, 4.41, 6.38, 0.4039},
      {F::kSqrt, S::kT1, 0.60, 1.15, 0.04, 0.13, 0.9188},
      {F::kSqrt, S::kT2, 2.91, 7.68, 18.99, 16.33, 0.0074},
      {F::kSqrt, S::kT3, 2.70, 5.91, 3.74, 4.22, 0.3287},
      {F::kPow32, S::kT1, 0.37, 0.31, 1.68, 1.03, 0.0014},
      {F::kPow32, S::kT2, 5.16, 10.52, 17.89, 14.92, 0.0212},
      {F::kPow32, S::kT3, 2.15, 4.27, 2.66, 4.12, 0.4022},
      {F::kCubicPoly, S::kT1, 1.36, 2.84, 4.42, 2.72, 0.0122},
      {F::kCubicPoly, S::kT2, 9.84, 12.57, 11.82, 12.95, 0.3656},
      {F::kCubicPoly, S::kT3, 5.13, 10.79, 6.31, 9.99, 0.4022},
      {F::kSqrtShiftThird, S::kT1, 1.63, 3.50, 0.06, 0.11, 0.9061},
      {F::kSqrtShiftThird, S::kT2, 4.27, 8.17, 18.20, 16.79, 0.0173},
      {F::kSqrtShiftThird, S::kT3, 2.11, 5.15, 3.74, 4.61, 0.2332},
  }};
  return rows;
}

std::optional<ReferenceRow> reference_row(FunctionId fn, OppositionScheme scheme) {
  for (const ReferenceRow& row : reference_table()) {
    if (row.fn == fn && row.scheme == scheme) return row;
  }
  return std::nullopt;
}

EvaluationReport evaluate_model(const RegressorModel& model, FunctionId fn,
                                OppositionScheme scheme, const OutputStats& stats,
                                const DomainBox& box, const EvaluationConfig& cfg) {
  if (cfg.n_test == 0) throw UsageError("evaluation needs at least one test point");
  if (model.arch.input_dim != arity(fn) || model.arch.output_dim != arity(fn)) {
    throw UsageError("model arity does not match " + std::string(name(fn)));
  }
  if (!is_monotone(fn)) {
    throw UnsupportedFunctionError(std::string(name(fn)) +
                                   " has no exact type-II oracle; evaluation needs a monotone "
                                   "1-D benchmark");
  }
  validate_box(fn, box);
  EvaluationReport report{fn, scheme, cfg.n_test, {}, {}, reference_row(fn, scheme), std::nullopt};
  Rng rng(cfg.seed);
  report.errors.reserve(cfg.n_test);
  for (std::size_t i = 0; i < cfg.n_test; ++i) {
    Point x(box.arity());
    for (std::size_t d = 0; d < x.size(); ++d) x[d] = rng.uniform(box.lower()[d], box.upper()[d]);
    const Point x_pred = predict(model, x);
    report.errors.push_back(type2_error(fn, x, x_pred, scheme, stats, box));
  }
  report.ann = summarize(report.errors);
  if (report.reference && report.ann.n >= 2 && cfg.reference_n >= 2) {
    const ErrorSummary fuzzy{report.reference->fuzzy_mean, report.reference->fuzzy_std,
                             cfg.reference_n};
    if (report.ann.std > 0.0 || fuzzy.std > 0.0) report.welch = welch(report.ann, fuzzy);
  }
  return report;
}

}  // namespace obl
