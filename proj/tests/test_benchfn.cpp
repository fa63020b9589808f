#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "obl/benchfn.hpp"
#include "obl/error.hpp"

using namespace obl;

TEST(BenchFn, PublishedAndDerivedOptima) {
  EXPECT_EQ(eval(FunctionId::kBooth, std::array{1.0, 3.0}), 0.0);
  EXPECT_NEAR(eval(FunctionId::kAckley, std::array{0.0, 0.0}), 0.0, 1e-12);
  EXPECT_NEAR(eval(FunctionId::kBulkin, std::array{-10.0, 1.0}), 0.0, 1e-12);
  for (FunctionId fn : {FunctionId::kAckley, FunctionId::kBulkin, FunctionId::kBooth}) {
    const auto x = minimizer(fn);
    ASSERT_TRUE(x.has_value()) << name(fn);
    EXPECT_NEAR(eval(fn, *x), 0.0, 1e-12) << name(fn);
  }
  EXPECT_FALSE(minimizer(FunctionId::kSquare).has_value());
}

TEST(BenchFn, FormulaSpotValues) {
  EXPECT_EQ(eval(FunctionId::kLinear2x, std::array{5.0}), 10.0);
  EXPECT_EQ(eval(FunctionId::kCubicShift, std::array{1.0}), 1000.0);
  EXPECT_DOUBLE_EQ(eval(FunctionId::kLogShift, std::array{0.0}), std::log(3.0));
  EXPECT_EQ(eval(FunctionId::kSquare, std::array{3.0}), 9.0);
  EXPECT_EQ(eval(FunctionId::kSqrt, std::array{9.0}), 3.0);
  EXPECT_EQ(eval(FunctionId::kPow32, std::array{4.0}), 8.0);
  EXPECT_EQ(eval(FunctionId::kCubicPoly, std::array{2.0}), 13.0);
  EXPECT_DOUBLE_EQ(eval(FunctionId::kSqrtShiftThird, std::array{8.0}), 1.0);
  // (2 + 2*2 - 7)^2 + (2*2 + 2 - 5)^2 = 1 + 1
  EXPECT_EQ(eval(FunctionId::kBooth, std::array{2.0, 2.0}), 2.0);
  // 100 * sqrt(|1 - 0.25|) + 0.01 * 5
  EXPECT_NEAR(eval(FunctionId::kBulkin, std::array{-5.0, 1.0}), 100.0 * std::sqrt(0.75) + 0.05,
              1e-12);
}

TEST(BenchFn, EvalErrors) {
  EXPECT_THROW(eval(FunctionId::kBooth, std::array{1.0}), UsageError);
  EXPECT_THROW(eval(FunctionId::kSquare, std::array{1.0, 2.0}), UsageError);
  EXPECT_THROW(eval(FunctionId::kSquare, std::array{10.5}), DomainError);
  EXPECT_THROW(eval(FunctionId::kBulkin, std::array{-16.0, 0.0}), DomainError);
  EXPECT_THROW(eval(FunctionId::kAckley, std::array{0.0, std::nan("")}), DomainError);
}

TEST(BenchFn, RegistryNames) {
  for (FunctionId fn : all_functions()) {
    EXPECT_EQ(parse_function(name(fn)), fn);
    EXPECT_TRUE(default_box(fn).arity() == arity(fn));
  }
  EXPECT_FALSE(parse_function("rosenbrock").has_value());
  EXPECT_EQ(monotone_functions().size(), 8u);
  EXPECT_NE(function_names().find("sqrt_shift_third"), std::string::npos);
}

TEST(BenchFn, DomainBoxInvariants) {
  EXPECT_THROW(DomainBox({1.0}, {1.0}), UsageError);
  EXPECT_THROW(DomainBox({0.0, 0.0}, {1.0}), UsageError);
  EXPECT_THROW(DomainBox({}, {}), UsageError);
  const DomainBox box({-1.0, 0.0}, {1.0, 4.0});
  EXPECT_TRUE(box.contains(std::array{-1.0, 4.0}));
  EXPECT_FALSE(box.contains(std::array{0.0}));
  EXPECT_EQ(box.midpoint(), (Point{0.0, 2.0}));
}

TEST(BenchFn, BoxOverrideValidation) {
  EXPECT_THROW(validate_box(FunctionId::kSqrt, DomainBox({-1.0}, {10.0})), DomainError);
  EXPECT_THROW(validate_box(FunctionId::kLogShift, DomainBox({-3.0}, {10.0})), DomainError);
  EXPECT_NO_THROW(validate_box(FunctionId::kLogShift, DomainBox({-2.5}, {10.0})));
  EXPECT_THROW(validate_box(FunctionId::kBooth, DomainBox({0.0}, {1.0})), UsageError);
  const Dataset d = sample(FunctionId::kSquare, 5, SampleMode::kGrid, 0, DomainBox({2.0}, {6.0}));
  EXPECT_EQ(d.xs.front()[0], 2.0);
  EXPECT_EQ(d.ys.back(), 36.0);
}

TEST(BenchFn, GridSampleIncludesEndpoints) {
  const Dataset d = sample(FunctionId::kLinear2x, 3, SampleMode::kGrid, 0);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.xs[0][0], 0.0);
  EXPECT_EQ(d.xs[1][0], 5.0);
  EXPECT_EQ(d.xs[2][0], 10.0);
  EXPECT_EQ(d.ys, (std::vector<double>{0.0, 10.0, 20.0}));
  EXPECT_EQ(d.box, default_box(FunctionId::kLinear2x));
}

TEST(BenchFn, TwoDimensionalGridIsSquare) {
  const Dataset d = sample(FunctionId::kBooth, 100, SampleMode::kGrid, 0);
  ASSERT_EQ(d.size(), 100u);
  EXPECT_EQ(d.xs.front(), (Point{-10.0, -10.0}));
  EXPECT_EQ(d.xs.back(), (Point{10.0, 10.0}));
  EXPECT_EQ(sample(FunctionId::kBooth, 2, SampleMode::kGrid, 0).size(), 4u);
}

TEST(BenchFn, UniformSampleDeterministicAndInBox) {
  const Dataset a = sample(FunctionId::kSquare, 1000, SampleMode::kUniform, 7);
  const Dataset b = sample(FunctionId::kSquare, 1000, SampleMode::kUniform, 7);
  EXPECT_EQ(a.xs, b.xs);
  EXPECT_EQ(a.ys, b.ys);
  const Dataset c = sample(FunctionId::kSquare, 1000, SampleMode::kUniform, 8);
  EXPECT_NE(a.xs, c.xs);

  const Dataset ack = sample(FunctionId::kAckley, 1000, SampleMode::kUniform, 1);
  ASSERT_EQ(ack.size(), 1000u);
  for (const Point& x : ack.xs) {
    ASSERT_GE(x[0], -35.0);
    ASSERT_LE(x[0], 35.0);
    ASSERT_GE(x[1], -35.0);
    ASSERT_LE(x[1], 35.0);
  }
  EXPECT_NO_THROW(validate(ack));
}

TEST(BenchFn, SampleCountTooSmall) {
  EXPECT_THROW(sample(FunctionId::kSquare, 1, SampleMode::kGrid, 0), UsageError);
  EXPECT_THROW(sample(FunctionId::kSquare, 0, SampleMode::kUniform, 0), UsageError);
}

TEST(BenchFn, OneDimensionalBenchmarksStrictlyMonotone) {
  for (FunctionId fn : monotone_functions()) {
    const Dataset d = sample(fn, 10000, SampleMode::kGrid, 0);
    for (std::size_t i = 1; i < d.size(); ++i) {
      ASSERT_LT(d.ys[i - 1], d.ys[i]) << name(fn) << " at x=" << d.xs[i][0];
    }
  }
}

TEST(BenchFn, ValidateRejectsBadDatasets) {
  Dataset d = sample(FunctionId::kSquare, 4, SampleMode::kGrid, 0);
  d.ys.pop_back();
  EXPECT_THROW(validate(d), UsageError);
  Dataset e = sample(FunctionId::kSquare, 4, SampleMode::kGrid, 0);
  e.xs[2][0] = 11.0;
  EXPECT_THROW(validate(e), DomainError);
}
