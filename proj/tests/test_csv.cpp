#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "obl/csv.hpp"
#include "obl/error.hpp"

using namespace obl;

namespace {

template <typename Fn>
void expect_message(Fn&& fn, const std::string& fragment) {
  try {
    fn();
    ADD_FAILURE() << "no exception, expected '" << fragment << "'";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Csv, FormatDoubleRoundTrips) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(10.0), "10");
  EXPECT_EQ(format_double(-2.5e-7), "-2.5e-07");
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 5000; ++i) {
    const double v = u(gen) / std::pow(10.0, i % 12);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Csv, DatasetRoundTrip) {
  for (FunctionId fn : {FunctionId::kSqrt, FunctionId::kBulkin}) {
    const Dataset d = sample(fn, 64, SampleMode::kUniform, 4);
    std::stringstream s;
    write_dataset_csv(s, d);
    const Dataset back = read_dataset_csv(s, d.box);
    EXPECT_EQ(back.xs, d.xs);
    EXPECT_EQ(back.ys, d.ys);
    EXPECT_EQ(back.box, d.box);
  }
}

TEST(Csv, DatasetHeaderAndBoundingBox) {
  std::stringstream s;
  write_dataset_csv(s, sample(FunctionId::kLinear2x, 3, SampleMode::kGrid, 0));
  EXPECT_EQ(s.str(), "x1,y\n0,0\n5,10\n10,20\n");
  std::istringstream in("# comment\nx1,x2,y\n1,2,3\n\n4,-1,5\n");
  const Dataset d = read_dataset_csv(in);
  EXPECT_EQ(d.box, DomainBox({1.0, -1.0}, {4.0, 2.0}));
  EXPECT_EQ(d.ys, (std::vector<double>{3.0, 5.0}));
}

TEST(Csv, MinedRoundTrip) {
  const MinedSet m =
      mine(sample(FunctionId::kCubicShift, 100, SampleMode::kGrid, 0), OppositionScheme::kT3);
  std::stringstream s;
  write_mined_csv(s, m);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "x1,ox1,y,target_y,achieved_y,fallback");
  const MinedSet back = read_mined_csv(s, m.box, OppositionScheme::kT3);
  EXPECT_EQ(back.inputs, m.inputs);
  EXPECT_EQ(back.opposites, m.opposites);
  EXPECT_EQ(back.outputs, m.outputs);
  EXPECT_EQ(back.targets, m.targets);
  EXPECT_EQ(back.achieved, m.achieved);
  EXPECT_EQ(back.fallback, m.fallback);
  EXPECT_EQ(back.stats.y_max, m.stats.y_max);
}

TEST(Csv, MinedWithoutFallbackColumn) {
  std::istringstream in("x1,ox1,y,target_y,achieved_y\n0,10,0,20,20\n10,0,20,0,0\n");
  const MinedSet m = read_mined_csv(in);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.fallback, (std::vector<bool>{false, false}));
}

TEST(Csv, MalformedInputsNameTheLine) {
  expect_message(
      [] {
        std::istringstream in("x1,y\n1,2\n3,abc\n");
        read_dataset_csv(in);
      },
      "line 3");
  expect_message(
      [] {
        std::istringstream in("x1,y\n1,2\n3,4,5\n");
        read_dataset_csv(in);
      },
      "line 3: expected 2 columns");
  expect_message(
      [] {
        std::istringstream in("a,b\n1,2\n");
        read_dataset_csv(in);
      },
      "line 1");
  expect_message(
      [] {
        std::istringstream in("x1,y\n1,2\n20,4\n");
        read_dataset_csv(in, DomainBox({0.0}, {10.0}));
      },
      "line 3");
  expect_message(
      [] {
        std::istringstream in("x1,ox1,y,target_y,achieved_y,fallback\n0,1,0,1,1,0\n1,0,1,0,0,2\n");
        read_mined_csv(in);
      },
      "line 3: column 'fallback'");
  EXPECT_THROW(
      [] {
        std::istringstream in("");
        read_dataset_csv(in);
      }(),
      UsageError);
  EXPECT_THROW(
      [] {
        std::istringstream in("x1,y\n1,2\n");
        read_dataset_csv(in);
      }(),
      UsageError);
}

TEST(Csv, BoundingBoxRejectsFlatAxis) {
  const std::vector<Point> xs{{1.0, 2.0}, {1.0, 3.0}};
  EXPECT_THROW(bounding_box(xs), UsageError);
}
