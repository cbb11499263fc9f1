#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "disimpact/error.hpp"
#include "disimpact/impact_index.hpp"
#include "disimpact/time.hpp"

using namespace disimpact;
using boost::multiprecision::cpp_rational;

namespace {

constexpr double kPi = std::numbers::pi;

// atan(x) + pi/2 in extended precision, written independently of shifted_arctan.
long double reference_weight(long double x) { return std::atan2(x, 1.0L) + std::numbers::pi_v<long double> / 2; }

CountSeries series_from_rows(const std::vector<std::array<std::int64_t, 11>>& rows) {
  CountSeries s;
  s.start = parse_date("2024-09-02");
  s.counts.resize(static_cast<Eigen::Index>(rows.size()), kCategoryCount);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (int c = 0; c < kCategoryCount; ++c) s.counts(static_cast<Eigen::Index>(t), c) = rows[t][c];
  }
  return s;
}

CountSeries random_series(std::mt19937_64& rng, int windows, std::int64_t max_count) {
  std::uniform_int_distribution<std::int64_t> count(0, max_count);
  std::bernoulli_distribution zero_window(0.15);
  std::vector<std::array<std::int64_t, 11>> rows(static_cast<std::size_t>(windows));
  for (auto& row : rows) {
    const bool empty = zero_window(rng);
    for (auto& n : row) n = empty ? 0 : count(rng);
  }
  return series_from_rows(rows);
}

SeriesStats<double> stats_of(double n_mean, double iqr) {
  SeriesStats<double> s;
  s.n_mean = n_mean;
  s.iqr = iqr;
  s.raw_iqr = iqr;
  s.t_count = 1;
  return s;
}

}  // namespace

TEST(SmoothedProportion, EmptyWindowUniformPrior) {
  EXPECT_NEAR(smoothed_proportion(0, 0, IndexConfig{}), 0.5 / 5.5, 1e-15);
}

TEST(SmoothedProportion, SymmetricCounts) {
  EXPECT_NEAR(smoothed_proportion(5, 55, IndexConfig{}), 1.0 / 11.0, 1e-15);
}

TEST(SmoothedProportion, MatchesExactRationalOnTableThreeInfr) {
  const cpp_rational exact = (cpp_rational(1720) + cpp_rational(1, 2)) / (cpp_rational(9666) + cpp_rational(11, 2));
  EXPECT_EQ(exact, cpp_rational(3441, 19343));
  const double p = smoothed_proportion(1720, 9666, IndexConfig{});
  EXPECT_NEAR(p, static_cast<double>(exact), 1e-15);
  EXPECT_NEAR(p, 0.177894, 1e-6);
}

TEST(SmoothedProportion, MatchesExactRationalOnRandomCounts) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::int64_t> total_dist(0, 1'000'000);
  for (int i = 0; i < 500; ++i) {
    const auto total = total_dist(rng);
    const auto n = std::uniform_int_distribution<std::int64_t>(0, total)(rng);
    const cpp_rational exact = (cpp_rational(n) + cpp_rational(1, 2)) / (cpp_rational(total) + cpp_rational(11, 2));
    EXPECT_NEAR(smoothed_proportion(n, total, IndexConfig{}), static_cast<double>(exact), 1e-15);
  }
}

TEST(SmoothedProportion, Errors) {
  try {
    (void)smoothed_proportion(6, 5, IndexConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidCounts);
  }
  IndexConfig bad;
  bad.alpha = -1;
  EXPECT_THROW((void)smoothed_proportion(1, 5, bad), Error);
}

TEST(SmoothedProportion, StrictlyIncreasingInCountAndFloored) {
  const IndexConfig c;
  for (std::int64_t total : {0, 1, 10, 9666}) {
    double prev = -1;
    for (std::int64_t n = 0; n <= total; n += std::max<std::int64_t>(1, total / 50)) {
      const double p = smoothed_proportion(n, total, c);
      EXPECT_GT(p, prev);
      EXPECT_GE(p, c.alpha / (static_cast<double>(total) + c.alpha * 11) - 1e-18);
      prev = p;
    }
  }
}

TEST(SmoothedProportion, ApproachesRawShareForLargeTotals) {
  const std::int64_t total = 1'000'000'000;
  EXPECT_NEAR(smoothed_proportion(total / 4, total, IndexConfig{}), 0.25, 1e-8);
}

TEST(ComputeIqr, ConstantSeries) {
  EXPECT_EQ(compute_iqr(Eigen::Vector4d(5, 5, 5, 5)), 0.0);
}

TEST(ComputeIqr, LinearInterpolation) {
  EXPECT_NEAR(compute_iqr(Eigen::Vector4d(4, 2, 3, 1)), 1.5, 1e-15);
}

TEST(ComputeIqr, OutlierMovesIqrModestly) {
  Eigen::VectorXd v(5);
  v << 1, 2, 3, 4, 100;
  const double iqr = compute_iqr(v);
  EXPECT_NEAR(iqr, 2.0, 1e-15);  // Q1 = 2, Q3 = 4
  EXPECT_LT(iqr, 0.05 * 99);
}

TEST(ComputeIqr, AlternativeMethods) {
  const Eigen::Vector4d v(1, 2, 3, 4);
  EXPECT_NEAR(compute_iqr(v, QuantileMethod::Hazen), 2.0, 1e-15);    // h = 0.5, 2.5
  EXPECT_NEAR(compute_iqr(v, QuantileMethod::Weibull), 2.5, 1e-15);  // h = 0.25, 2.75
  EXPECT_THROW((void)compute_iqr(Eigen::VectorXd()), Error);
}

TEST(IntensityWeight, AnchorPoints) {
  const auto s = stats_of(100.0, 20.0);
  EXPECT_NEAR(intensity_weight(100, s), kPi / 2, 1e-12);
  EXPECT_NEAR(intensity_weight(120, s), 3 * kPi / 4, 1e-12);
  EXPECT_NEAR(intensity_weight(-100, stats_of(100.0, 20.0)), static_cast<double>(reference_weight(-10)), 1e-12);
  EXPECT_NEAR(static_cast<double>(reference_weight(-10)), 0.0996687, 1e-7);
}

TEST(IntensityWeight, MatchesArctanOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mean(0, 5000), iqr(0.5, 800);
  std::uniform_int_distribution<std::int64_t> total(0, 20000);
  for (int i = 0; i < 2000; ++i) {
    const auto s = stats_of(mean(rng), iqr(rng));
    const auto n = total(rng);
    const long double x = (static_cast<long double>(n) - s.n_mean) / s.iqr;
    EXPECT_NEAR(intensity_weight(n, s), static_cast<double>(reference_weight(x)), 1e-12);
  }
}

TEST(IntensityWeight, LimitsAndBounds) {
  EXPECT_NEAR(shifted_arctan(1e3), kPi, 1e-3);
  EXPECT_NEAR(shifted_arctan(-1e3), 0.0, 1e-3);
  for (double x : {1e300, 1e20, -1e20, -1e300}) {
    const double w = shifted_arctan(x);
    EXPECT_GT(w, 0.0) << x;
    EXPECT_LT(w, kPi) << x;
  }
}

TEST(IntensityWeight, StrictlyIncreasingInTotal) {
  const auto s = stats_of(500.0, 120.0);
  double prev = 0;
  for (std::int64_t n = 0; n <= 3000; n += 7) {
    const double w = intensity_weight(n, s);
    EXPECT_GT(w, prev);
    prev = w;
  }
}

TEST(ImpactIndex, DirectMultiplication) {
  EXPECT_NEAR(impact_index(1.0 / 11, kPi / 2), 0.1427996661, 1e-10);
  const double p = 1720.5 / 9671.5;
  EXPECT_NEAR(impact_index(p, kPi / 2), p * kPi / 2, 1e-15);
  // 0.177894 * pi/2 = 0.279435 to six places.
  EXPECT_NEAR(impact_index(0.177894, kPi / 2), 0.279435, 1e-6);
}

TEST(ImpactIndex, StaysBelowPiNearBounds) {
  const double p = std::nextafter(1.0, 0.0);
  const double w = std::nextafter(kPi, 0.0);
  EXPECT_LT(impact_index(p, w), kPi);
  for (auto [p0, w0] : {std::pair{0.0, 1.0}, {1.0, 1.0}, {0.5, 0.0}, {0.5, kPi}}) {
    try {
      (void)impact_index(p0, w0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
    }
  }
}

TEST(ComputeImpactSeries, SingleEmptyWindowUsesFallback) {
  const auto series = compute_impact_series(series_from_rows({{}}), IndexConfig{});
  EXPECT_TRUE(series.stats.iqr_fallback);
  EXPECT_EQ(series.stats.iqr, 1.0);
  EXPECT_NEAR(series.weight(0), kPi / 2, 1e-15);
  for (int c = 0; c < kCategoryCount; ++c) EXPECT_NEAR(series.index(0, c), kPi / 22, 1e-15);
  EXPECT_NEAR(series.physical(0), 0.713998, 1e-6);
  EXPECT_NEAR(series.social(0), 5 * kPi / 22, 1e-15);
}

TEST(ComputeImpactSeries, FallbackScalesWithLargeMean) {
  std::array<std::int64_t, 11> row{};
  row[0] = 4'000'000'000;
  const auto series = compute_impact_series(series_from_rows({row, row}), IndexConfig{});
  EXPECT_TRUE(series.stats.iqr_fallback);
  EXPECT_NEAR(series.stats.iqr, 4000.0, 1e-9);
  EXPECT_NEAR(series.weight(1), kPi / 2, 1e-15);
}

TEST(ComputeImpactSeries, BusyWindowOutweighsEmptyWindow) {
  std::array<std::int64_t, 11> busy;
  busy.fill(10);
  const auto series = compute_impact_series(series_from_rows({busy, {}}), IndexConfig{});
  EXPECT_GT(series.weight(0), kPi / 2);
  EXPECT_LT(series.weight(1), kPi / 2);
  for (int c = 0; c < kCategoryCount; ++c) {
    EXPECT_GT(series.index(0, c), (1.0 / 11) * (kPi / 2));
    EXPECT_GT(series.index(0, c), series.index(1, c));
  }
}

TEST(ComputeImpactSeries, TableThreeInFlatSeries) {
  const std::array<std::int64_t, 11> reddit = {332, 368, 1720, 738, 174, 155, 623, 504, 866, 1603, 2583};
  const auto series = compute_impact_series(series_from_rows({reddit, reddit, reddit, reddit}), IndexConfig{});
  for (Eigen::Index t = 0; t < 4; ++t) {
    EXPECT_NEAR(series.proportion(t, column(ImpactCategory::INFR)), 1720.5 / 9671.5, 1e-15);
    EXPECT_NEAR(series.weight(t), kPi / 2, 1e-15);
  }
}

TEST(ComputeImpactSeries, MeanCompositeIsFifthOfSum) {
  std::mt19937_64 rng(9);
  const auto counts = random_series(rng, 12, 40);
  IndexConfig mean_config;
  mean_config.composite_operator = CompositeOperator::Mean;
  const auto sum = compute_impact_series(counts, IndexConfig{});
  const auto mean = compute_impact_series(counts, mean_config);
  EXPECT_TRUE(mean.physical.isApprox(sum.physical / 5, 1e-15));
  EXPECT_TRUE(mean.social.isApprox(sum.social / 5, 1e-15));
  EXPECT_THROW((void)sum.domain_series(Domain::None), Error);
}

TEST(ComputeImpactSeries, Errors) {
  EXPECT_THROW((void)compute_impact_series(CountSeries{}, IndexConfig{}), Error);
  std::array<std::int64_t, 11> row{};
  row[2] = -1;
  try {
    (void)compute_impact_series(series_from_rows({row}), IndexConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidCounts);
  }
}

TEST(ImpactSeriesProperties, NormalizationBoundsAndAdditivity) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto counts = random_series(rng, 1 + trial % 40, trial % 2 ? 50 : 5000);
    const auto s = compute_impact_series(counts, IndexConfig{});
    for (Eigen::Index t = 0; t < s.size(); ++t) {
      EXPECT_NEAR(s.proportion.row(t).sum(), 1.0, 1e-9);
      EXPECT_NEAR(s.index.row(t).sum(), s.weight(t), 1e-9);
      EXPECT_NEAR(s.physical(t) + s.social(t) + s.index(t, column(ImpactCategory::OTHER)), s.weight(t), 1e-9);
      EXPECT_GT(s.weight(t), 0.0);
      EXPECT_LT(s.weight(t), kPi);
      const double floor = 0.5 / (static_cast<double>(counts.counts.row(t).sum()) + 5.5);
      for (int c = 0; c < kCategoryCount; ++c) {
        EXPECT_GT(s.proportion(t, c), 0.0);
        EXPECT_LT(s.proportion(t, c), 1.0);
        EXPECT_GE(s.proportion(t, c), floor * (1 - 1e-12));
        EXPECT_GT(s.index(t, c), 0.0);
        EXPECT_LT(s.index(t, c), kPi);
      }
    }
  }
}

TEST(ImpactSeriesProperties, BatchStatisticsIncludeEmptyWindows) {
  std::array<std::int64_t, 11> row{};
  row[0] = 30;
  const auto s = compute_impact_series(series_from_rows({row, {}, {}, row}), IndexConfig{});
  EXPECT_NEAR(s.stats.n_mean, 15.0, 1e-15);
  EXPECT_EQ(s.stats.t_count, 4);
}

TEST(ImpactSeries, FloatInstantiation) {
  std::mt19937_64 rng(3);
  const auto counts = random_series(rng, 8, 100);
  const auto f = compute_impact_series<float>(counts, IndexConfig{});
  const auto d = compute_impact_series<double>(counts, IndexConfig{});
  EXPECT_TRUE(f.index.cast<double>().isApprox(d.index, 1e-5));
}
