#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace obl {

using Point = std::vector<double>;

/// Benchmark functions. The first eight are the 1-D monotone benchmarks,
/// the last three the 2-D global optimization problems.
enum class FunctionId {
  kCubicShift,      // (2x + 8)^3
  kLogShift,        // log(x + 3)
  kLinear2x,        // 2x
  kSquare,          // x^2
  kSqrt,            // sqrt(x)
  kPow32,           // x^(3/2)
  kCubicPoly,       // x^3 + x^2 + 1
  kSqrtShiftThird,  // sqrt(x + 1) / 3
  kAckley,
  kBulkin,
  kBooth,
};

std::span<const FunctionId> all_functions();
std::span<const FunctionId> monotone_functions();

std::string_view name(FunctionId fn);
std::optional<FunctionId> parse_function(std::string_view text);
/// Comma separated list of every registry id, for error messages.
std::string function_names();

std::size_t arity(FunctionId fn);
bool is_monotone(FunctionId fn);

/// Axis-aligned input box. Construction enforces lower[i] < upper[i].
class DomainBox {
 public:
  DomainBox(std::vector<double> lower, std::vector<double> upper);

  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  std::size_t arity() const { return lower_.size(); }
  bool contains(std::span<const double> x) const;
  Point midpoint() const;

  bool operator==(const DomainBox&) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

DomainBox default_box(FunctionId fn);

/// Throws DomainError when `box` leaves the set on which `fn` is defined
/// (and, for the 1-D benchmarks, monotone).
void validate_box(FunctionId fn, const DomainBox& box);

/// Registered global minimizer of the 2-D problems; nullopt for 1-D functions.
std::optional<Point> minimizer(FunctionId fn);

/// Evaluates the formula. Throws UsageError on arity mismatch and DomainError
/// when x is outside the box (the default box unless one is given).
double eval(FunctionId fn, std::span<const double> x);
double eval(FunctionId fn, std::span<const double> x, const DomainBox& box);

struct Dataset {
  std::vector<Point> xs;
  std::vector<double> ys;
  DomainBox box;

  std::size_t size() const { return ys.size(); }
  std::size_t arity() const { return box.arity(); }
};

/// Checks |xs| = |ys| >= 2, point arity and box membership.
void validate(const Dataset& d);

enum class SampleMode { kGrid, kUniform };

std::optional<SampleMode> parse_sample_mode(std::string_view text);
std::string_view name(SampleMode mode);

/// Grid mode: n equispaced points including both endpoints in 1-D; in 2-D a
/// k x k tensor grid with k = max(2, round(sqrt(n))). Uniform mode draws n
/// i.i.d. points from the box.
Dataset sample(FunctionId fn, std::size_t n, SampleMode mode, std::uint64_t seed);
Dataset sample(FunctionId fn, std::size_t n, SampleMode mode, std::uint64_t seed,
               const DomainBox& box);

}  // namespace obl
