#include "obl/benchfn.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "obl/error.hpp"
#include "obl/random.hpp"

namespace obl {
namespace {

struct Entry {
  FunctionId id;
  std::string_view name;
  std::size_t arity;
  // box on which the formula is defined and, for 1-D entries, monotone
  double natural_lower;
  std::vector<double> lower;
  std::vector<double> upper;
};

const std::array<Entry, 11>& registry() {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  static const std::array<Entry, 11> entries{{
      {FunctionId::kCubicShift, "cubic_shift", 1, -kInf, {0.0}, {10.0}},
      {FunctionId::kLogShift, "log_shift", 1, -3.0, {0.0}, {10.0}},
      {FunctionId::kLinear2x, "linear2x", 1, -kInf, {0.0}, {10.0}},
      {FunctionId::kSquare, "square", 1, 0.0, {0.0}, {10.0}},
      {FunctionId::kSqrt, "sqrt", 1, 0.0, {0.0}, {10.0}},
      {FunctionId::kPow32, "pow32", 1, 0.0, {0.0}, {10.0}},
      {FunctionId::kCubicPoly, "cubic_poly", 1, 0.0, {0.0}, {10.0}},
      {FunctionId::kSqrtShiftThird, "sqrt_shift_third", 1, -1.0, {0.0}, {10.0}},
      {FunctionId::kAckley, "ackley", 2, -kInf, {-35.0, -35.0}, {35.0, 35.0}},
      {FunctionId::kBulkin, "bulkin", 2, -kInf, {-15.0, -3.0}, {-5.0, 3.0}},
      {FunctionId::kBooth, "booth", 2, -kInf, {-10.0, -10.0}, {10.0, 10.0}},
  }};
  return entries;
}

const Entry& entry(FunctionId fn) { return registry()[static_cast<std::size_t>(fn)]; }

constexpr std::array<FunctionId, 11> kAll{
    FunctionId::kCubicShift, FunctionId::kLogShift,  FunctionId::kLinear2x,
    FunctionId::kSquare,     FunctionId::kSqrt,      FunctionId::kPow32,
    FunctionId::kCubicPoly,  FunctionId::kSqrtShiftThird, FunctionId::kAckley,
    FunctionId::kBulkin,     FunctionId::kBooth};

double formula(FunctionId fn, std::span<const double> x) {
  switch (fn) {
    case FunctionId::kCubicShift: {
      const double u = 2.0 * x[0] + 8.0;
      return u * u * u;
    }
    case FunctionId::kLogShift:
      return std::log(x[0] + 3.0);
    case FunctionId::kLinear2x:
      return 2.0 * x[0];
    case FunctionId::kSquare:
      return x[0] * x[0];
    case FunctionId::kSqrt:
      return std::sqrt(x[0]);
    case FunctionId::kPow32:
      return x[0] * std::sqrt(x[0]);
    case FunctionId::kCubicPoly:
      return x[0] * x[0] * x[0] + x[0] * x[0] + 1.0;
    case FunctionId::kSqrtShiftThird:
      return std::sqrt(x[0] + 1.0) / 3.0;
    case FunctionId::kAckley: {
      const double e = std::exp(1.0);
      const double r = std::sqrt(0.5 * (x[0] * x[0] + x[1] * x[1]));
      const double c = std::cos(2.0 * std::numbers::pi * x[0]) +
                       std::cos(2.0 * std::numbers::pi * x[1]);
      return 20.0 * (1.0 - std::exp(-0.2 * r)) - std::exp(0.5 * c) + e;
    }
    case FunctionId::kBulkin:
      return 100.0 * std::sqrt(std::abs(x[1] - 0.01 * x[0] * x[0])) +
             0.01 * std::abs(x[0] + 10.0);
    case FunctionId::kBooth: {
      const double a = x[0] + 2.0 * x[1] - 7.0;
      const double b = 2.0 * x[0] + x[1] - 5.0;
      return a * a + b * b;
    }
  }
  throw UsageError("unknown function id");
}

std::string describe(std::span<const double> x) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
  out << ')';
  return out.str();
}

}  // namespace

std::span<const FunctionId> all_functions() { return kAll; }

std::span<const FunctionId> monotone_functions() { return std::span(kAll).first(8); }

std::string_view name(FunctionId fn) { return entry(fn).name; }

std::optional<FunctionId> parse_function(std::string_view text) {
  for (const Entry& e : registry()) {
    if (e.name == text) return e.id;
  }
  return std::nullopt;
}

std::string function_names() {
  std::string out;
  for (const Entry& e : registry()) {
    if (!out.empty()) out += ", ";
    out += e.name;
  }
  return out;
}

std::size_t arity(FunctionId fn) { return entry(fn).arity; }

bool is_monotone(FunctionId fn) { return entry(fn).arity == 1; }

DomainBox::DomainBox(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw UsageError("domain box needs matching, non-empty lower/upper bounds");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i]) || !std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) {
      throw UsageError("domain box requires finite lower < upper in dimension " +
                       std::to_string(i + 1));
    }
  }
}

bool DomainBox::contains(std::span<const double> x) const {
  if (x.size() != arity()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
  }
  return true;
}

Point DomainBox::midpoint() const {
  Point mid(arity());
  for (std::size_t i = 0; i < arity(); ++i) mid[i] = 0.5 * (lower_[i] + upper_[i]);
  return mid;
}

DomainBox default_box(FunctionId fn) { return DomainBox(entry(fn).lower, entry(fn).upper); }

void validate_box(FunctionId fn, const DomainBox& box) {
  const Entry& e = entry(fn);
  if (box.arity() != e.arity) {
    throw UsageError(std::string(e.name) + " takes " + std::to_string(e.arity) +
                     " input(s), box has " + std::to_string(box.arity()));
  }
  if (e.arity == 1) {
    const bool open = e.id == FunctionId::kLogShift;
    const double lo = box.lower()[0];
    if (open ? !(lo > e.natural_lower) : !(lo >= e.natural_lower)) {
      throw DomainError(std::string(e.name) + " is not defined and monotone below " +
                        std::to_string(e.natural_lower));
    }
  }
}

std::optional<Point> minimizer(FunctionId fn) {
  switch (fn) {
    case FunctionId::kAckley:
      return Point{0.0, 0.0};
    case FunctionId::kBulkin:
      return Point{-10.0, 1.0};
    case FunctionId::kBooth:
      return Point{1.0, 3.0};
    default:
      return std::nullopt;
  }
}

double eval(FunctionId fn, std::span<const double> x) {
  return eval(fn, x, default_box(fn));
}

double eval(FunctionId fn, std::span<const double> x, const DomainBox& box) {
  if (x.size() != arity(fn) || box.arity() != arity(fn)) {
    throw UsageError(std::string(name(fn)) + " takes " + std::to_string(arity(fn)) +
                     " input(s), got " + std::to_string(x.size()));
  }
  if (!box.contains(x)) {
    throw DomainError(std::string(name(fn)) + ": point " + describe(x) +
                      " outside the domain box");
  }
  return formula(fn, x);
}

void validate(const Dataset& d) {
  if (d.xs.size() != d.ys.size()) throw UsageError("dataset xs and ys differ in length");
  if (d.ys.size() < 2) throw UsageError("dataset needs at least 2 samples");
  for (std::size_t i = 0; i < d.xs.size(); ++i) {
    if (d.xs[i].size() != d.box.arity()) {
      throw UsageError("dataset row " + std::to_string(i + 1) + " has wrong arity");
    }
    if (!d.box.contains(d.xs[i])) {
      throw DomainError("dataset row " + std::to_string(i + 1) + " lies outside the box");
    }
  }
}

std::optional<SampleMode> parse_sample_mode(std::string_view text) {
  if (text == "grid") return SampleMode::kGrid;
  if (text == "uniform") return SampleMode::kUniform;
  return std::nullopt;
}

std::string_view name(SampleMode mode) {
  return mode == SampleMode::kGrid ? "grid" : "uniform";
}

Dataset sample(FunctionId fn, std::size_t n, SampleMode mode, std::uint64_t seed) {
  return sample(fn, n, mode, seed, default_box(fn));
}

Dataset sample(FunctionId fn, std::size_t n, SampleMode mode, std::uint64_t seed,
               const DomainBox& box) {
  if (n < 2) throw UsageError("sample count must be at least 2");
  validate_box(fn, box);
  Dataset d{{}, {}, box};
  const std::size_t dim = box.arity();
  const auto& lo = box.lower();
  const auto& hi = box.upper();

  // Endpoints are assigned exactly so the grid hits the box corners.
  auto grid_coord = [&](std::size_t axis, std::size_t k, std::size_t count) {
    if (k + 1 == count) return hi[axis];
    return lo[axis] + (hi[axis] - lo[axis]) * static_cast<double>(k) /
                          static_cast<double>(count - 1);
  };

  if (mode == SampleMode::kGrid) {
    if (dim == 1) {
      for (std::size_t k = 0; k < n; ++k) d.xs.push_back({grid_coord(0, k, n)});
    } else {
      const auto side = std::max<std::size_t>(
          2, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n)))));
      for (std::size_t i = 0; i < side; ++i) {
        for (std::size_t j = 0; j < side; ++j) {
          d.xs.push_back({grid_coord(0, i, side), grid_coord(1, j, side)});
        }
      }
    }
  } else {
    Rng rng(seed);
    d.xs.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      Point x(dim);
      for (std::size_t a = 0; a < dim; ++a) x[a] = rng.uniform(lo[a], hi[a]);
      d.xs.push_back(std::move(x));
    }
  }
  d.ys.reserve(d.xs.size());
  for (const Point& x : d.xs) d.ys.push_back(eval(fn, x, box));
  return d;
}

}  // namespace obl
