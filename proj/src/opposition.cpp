#include "obl/opposition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "obl/error.hpp"

namespace obl {

std::optional<OppositionScheme> parse_scheme(std::string_view text) {
  if (text == "t1" || text == "T1") return OppositionScheme::kT1;
  if (text == "t2" || text == "T2") return OppositionScheme::kT2;
  if (text == "t3" || text == "T3") return OppositionScheme::kT3;
  return std::nullopt;
}

std::string_view name(OppositionScheme scheme) {
  switch (scheme) {
    case OppositionScheme::kT1:
      return "t1";
    case OppositionScheme::kT2:
      return "t2";
    case OppositionScheme::kT3:
      return "t3";
  }
  return "?";
}

OutputStats output_stats(std::span<const double> ys) {
  if (ys.empty()) throw UsageError("output statistics of an empty sample");
  const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  const double sum = std::accumulate(ys.begin(), ys.end(), 0.0);
  // the rounded mean can land a hair outside [min, max] for constant data
  const double mean = std::clamp(sum / static_cast<double>(ys.size()), *lo, *hi);
  return {*lo, *hi, mean};
}

OutputStats output_stats(const Dataset& d) { return output_stats(d.ys); }

OppositeValue opposite_value_detail(double v, const OutputStats& stats, OppositionScheme scheme) {
  if (!(v >= stats.y_min && v <= stats.y_max)) {
    throw DomainError("output value " + std::to_string(v) + " outside [" +
                      std::to_string(stats.y_min) + ", " + std::to_string(stats.y_max) + "]");
  }
  const double reflected = stats.y_max + stats.y_min - v;
  double candidate = reflected;
  switch (scheme) {
    case OppositionScheme::kT1:
      return {reflected, false};
    case OppositionScheme::kT2: {
      const double modulus = stats.y_max;
      if (!(modulus > 0.0)) return {reflected, true};
      const double shifted = v + 0.5 * (stats.y_min + stats.y_max);
      double r = std::fmod(shifted, modulus);
      if (r < 0.0) r += modulus;
      if (r >= modulus) r = 0.0;
      candidate = r;
      break;
    }
    case OppositionScheme::kT3:
      candidate = 2.0 * stats.y_mean - v;
      break;
  }
  if (candidate < stats.y_min || candidate > stats.y_max) return {reflected, true};
  return {candidate, false};
}

double opposite_value(double v, const OutputStats& stats, OppositionScheme scheme) {
  return opposite_value_detail(v, stats, scheme).value;
}

Point type1_opposite_input(std::span<const double> x, const DomainBox& box) {
  if (!box.contains(x)) throw DomainError("type-I opposite of a point outside the box");
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    // the sum can round past a bound when the box is not symmetric
    out[i] = std::clamp(box.lower()[i] + box.upper()[i] - x[i], box.lower()[i], box.upper()[i]);
  }
  return out;
}

std::size_t nearest_index(std::span<const double> ys, double target) {
  if (ys.empty()) throw UsageError("nearest_index over an empty sequence");
  std::size_t best = 0;
  double best_dist = std::abs(ys[0] - target);
  for (std::size_t i = 1; i < ys.size(); ++i) {
    const double dist = std::abs(ys[i] - target);
    if (dist < best_dist) {
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

namespace {

// Nearest-value lookup over a sorted (value, index) table. Equal |y - t| can
// only occur for equal values (one run) or for one run on each side of t, so
// the smallest index is the first entry of the better run.
class SortedLookup {
 public:
  explicit SortedLookup(std::span<const double> ys) : order_(ys.size()), ys_(ys) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return ys[a] < ys[b]; });
  }

  std::size_t nearest(double target) const {
    const auto above = std::lower_bound(order_.begin(), order_.end(), target,
                                        [&](std::size_t i, double t) { return ys_[i] < t; });
    std::optional<std::size_t> lo_run, hi_run;
    if (above != order_.end()) hi_run = *above;
    if (above != order_.begin()) {
      const double below_value = ys_[*std::prev(above)];
      auto first = std::lower_bound(order_.begin(), above, below_value,
                                    [&](std::size_t i, double t) { return ys_[i] < t; });
      lo_run = *first;
    }
    if (!lo_run) return *hi_run;
    if (!hi_run) return *lo_run;
    const double d_lo = std::abs(ys_[*lo_run] - target);
    const double d_hi = std::abs(ys_[*hi_run] - target);
    if (d_lo < d_hi) return *lo_run;
    if (d_hi < d_lo) return *hi_run;
    return std::min(*lo_run, *hi_run);
  }

 private:
  std::vector<std::size_t> order_;
  std::span<const double> ys_;
};

}  // namespace

MinedSet mine(const Dataset& d, OppositionScheme scheme) {
  validate(d);
  const OutputStats stats = output_stats(d);
  const SortedLookup lookup(d.ys);

  MinedSet m{{}, {}, {}, {}, {}, {}, scheme, stats, d.box};
  const std::size_t n = d.size();
  m.inputs = d.xs;
  m.outputs = d.ys;
  m.opposites.reserve(n);
  m.targets.reserve(n);
  m.achieved.reserve(n);
  m.fallback.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const OppositeValue target = opposite_value_detail(d.ys[i], stats, scheme);
    const std::size_t j = lookup.nearest(target.value);
    m.opposites.push_back(d.xs[j]);
    m.targets.push_back(target.value);
    m.achieved.push_back(d.ys[j]);
    m.fallback.push_back(target.fell_back);
  }
  return m;
}

}  // namespace obl
