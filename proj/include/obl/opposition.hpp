#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "obl/benchfn.hpp"

namespace obl {

/// Output-space oppositeness schemes.
///   T1: y_max + y_min - v              (reflection)
///   T2: (v + (y_min + y_max) / 2) mod y_max   (modular shift)
///   T3: 2 * y_mean - v                 (mean reflection)
/// Any T2/T3 value outside [y_min, y_max] is replaced by the T1 value.
enum class OppositionScheme { kT1, kT2, kT3 };

std::optional<OppositionScheme> parse_scheme(std::string_view text);
std::string_view name(OppositionScheme scheme);

struct OutputStats {
  double y_min = 0.0;
  double y_max = 0.0;
  double y_mean = 0.0;
};

OutputStats output_stats(std::span<const double> ys);
OutputStats output_stats(const Dataset& d);

struct OppositeValue {
  double value;
  bool fell_back;  // T2/T3 result left the output range and T1 was used
};

/// v must lie in [stats.y_min, stats.y_max]; throws DomainError otherwise.
OppositeValue opposite_value_detail(double v, const OutputStats& stats, OppositionScheme scheme);
double opposite_value(double v, const OutputStats& stats, OppositionScheme scheme);

/// Componentwise lower + upper - x.
Point type1_opposite_input(std::span<const double> x, const DomainBox& box);

/// argmin_i |ys[i] - target|, smallest index on ties.
std::size_t nearest_index(std::span<const double> ys, double target);

/// Quasi-opposite pairs mined from a dataset, in input order.
struct MinedSet {
  std::vector<Point> inputs;
  std::vector<Point> opposites;
  std::vector<double> outputs;   // y(inputs[i])
  std::vector<double> targets;   // opposite output value sought for inputs[i]
  std::vector<double> achieved;  // y(opposites[i]), the nearest sampled output
  std::vector<bool> fallback;
  OppositionScheme scheme = OppositionScheme::kT1;
  OutputStats stats;
  DomainBox box;

  std::size_t size() const { return inputs.size(); }
  std::size_t arity() const { return box.arity(); }
};

MinedSet mine(const Dataset& d, OppositionScheme scheme);

}  // namespace obl
