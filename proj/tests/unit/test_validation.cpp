#include <gtest/gtest.h>

#include <random>

#include "disimpact/error.hpp"
#include "disimpact/time.hpp"
#include "disimpact/validation.hpp"

using namespace disimpact;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

// Rank of v[i] = #(v < v[i]) + (#(v == v[i]) + 1) / 2, then Pearson in long double.
double brute_force_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<long double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      long double less = 0, equal = 0;
      for (double u : v) {
        less += u < v[i];
        equal += u == v[i];
      }
      r[i] = less + (equal + 1) / 2;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const long double n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

WeeklySeries weekly(const char* start, const Eigen::VectorXd& values) {
  return WeeklySeries{parse_date(start), values};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::OutOfRange;
}

}  // namespace

TEST(Midranks, TiesShareMeanPosition) {
  const auto r = midranks(vec({10, 20, 20, 5, 20}));
  EXPECT_EQ(r, vec({2, 4, 4, 1, 4}));
}

TEST(Spearman, Examples) {
  EXPECT_NEAR(spearman_rho(vec({1, 2, 3, 4, 5}), vec({2, 4, 6, 8, 10})), 1.0, 1e-15);
  EXPECT_NEAR(spearman_rho(vec({1, 2, 3, 4, 5}), vec({5, 4, 3, 2, 1})), -1.0, 1e-15);
  // Monotone but nonlinear.
  EXPECT_NEAR(spearman_rho(vec({1, 2, 3, 4}), vec({1, 8, 27, 64})), 1.0, 1e-15);
  // No ties: 1 - 6 * sum d^2 / (n (n^2 - 1)) with d = (0, 1, -1, 0, 0): 1 - 12/120 = 0.9
  EXPECT_NEAR(spearman_rho(vec({1, 2, 3, 4, 5}), vec({1, 3, 2, 4, 5})), 0.9, 1e-15);
}

TEST(Spearman, Errors) {
  EXPECT_EQ(code_of([] { (void)spearman_rho(vec({1, 2, 3}), vec({1, 2})); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([] { (void)spearman_rho(vec({1, 2}), vec({1, 2})); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([] { (void)spearman_rho(vec({1, 1, 1}), vec({1, 2, 3})); }), ErrorCode::ConstantInput);
}

TEST(Spearman, MatchesBruteForceOracleWithTies) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> small(0, 6);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + trial % 30;
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] = small(rng);
      y[static_cast<std::size_t>(i)] = small(rng) + 0.5 * x[static_cast<std::size_t>(i)];
    }
    const Eigen::Map<const Eigen::VectorXd> ex(x.data(), n), ey(y.data(), n);
    if ((ex.array() == ex(0)).all() || (ey.array() == ey(0)).all()) continue;
    EXPECT_NEAR(spearman_rho(ex, ey), brute_force_spearman(x, y), 1e-12) << "trial " << trial;
  }
}

TEST(Spearman, SymmetricAndMonotoneInvariant) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(20), y(20);
    for (int i = 0; i < 20; ++i) {
      x(i) = g(rng);
      y(i) = x(i) + g(rng);
    }
    const double rho = spearman_rho(x, y);
    EXPECT_NEAR(spearman_rho(y, x), rho, 1e-14);
    const Eigen::VectorXd ex = x.array().exp();
    const Eigen::VectorXd cy = y.array().cube() * 3.0 + 1.0;
    EXPECT_NEAR(spearman_rho(ex, cy), rho, 1e-14);
    EXPECT_NEAR(spearman_rho(-x, y), -rho, 1e-14);
  }
}

TEST(LeadLag, ShiftedTruthPeaksAtPlusThree) {
  Eigen::VectorXd idx(12);
  idx << 0.3, 1.9, 2.4, 1.1, 0.8, 2.9, 0.2, 1.5, 2.2, 0.6, 1.3, 2.6;
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(12);
  for (int t = 3; t < 12; ++t) truth(t) = idx(t - 3) * 1000;
  const auto profile = lead_lag_profile(weekly("2024-09-23", idx), weekly("2024-09-23", truth), 3);
  EXPECT_EQ(profile.lags, (std::vector<int>{-3, -2, -1, 0, 1, 2, 3}));
  ASSERT_TRUE(profile.rho_at(3).has_value());
  EXPECT_NEAR(*profile.rho_at(3), 1.0, 1e-12);
  EXPECT_EQ(profile.overlap_at(3), 9u);
  const auto reading = interpret_profile(profile);
  EXPECT_EQ(reading.best_lag, 3);
  EXPECT_EQ(reading.strength, "above meaningful range");
  EXPECT_EQ(reading.label_reading, "ground truth leads by 3 weeks");
}

TEST(LeadLag, ReversedShiftPeaksAtMinusThree) {
  Eigen::VectorXd truth(12);
  truth << 5, 1, 9, 4, 7, 2, 8, 3, 6, 10, 0, 11;
  Eigen::VectorXd idx = Eigen::VectorXd::Zero(12);
  for (int t = 3; t < 12; ++t) idx(t) = truth(t - 3) / 4.0;
  const auto profile = lead_lag_profile(weekly("2024-09-23", idx), weekly("2024-09-23", truth), 3);
  EXPECT_NEAR(*profile.rho_at(-3), 1.0, 1e-12);
  EXPECT_EQ(interpret_profile(profile).best_lag, -3);
}

TEST(LeadLag, OverlapArithmetic) {
  // Truth starts two weeks after the index and is 8 weeks long; index is 10 weeks.
  Eigen::VectorXd idx = Eigen::VectorXd::LinSpaced(10, 0, 9);
  Eigen::VectorXd truth = Eigen::VectorXd::LinSpaced(8, 0, 7).array().square();
  const auto profile = lead_lag_profile(weekly("2024-01-01", idx), weekly("2024-01-15", truth), 3);
  for (int lag = -3; lag <= 3; ++lag) {
    std::size_t expected = 0;
    for (int t = 0; t < 10; ++t) {
      const int u = t - 2 + lag;
      expected += u >= 0 && u < 8;
    }
    EXPECT_EQ(profile.overlap_at(lag), expected) << "lag " << lag;
  }
}

TEST(LeadLag, Antisymmetry) {
  // Swapping the roles of the two series mirrors the lag axis.
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd a(14), b(14);
    for (int i = 0; i < 14; ++i) {
      a(i) = g(rng);
      b(i) = g(rng);
    }
    const auto ab = lead_lag_profile(weekly("2024-03-04", a), weekly("2024-03-04", b), 4);
    const auto ba = lead_lag_profile(weekly("2024-03-04", b), weekly("2024-03-04", a), 4);
    for (int lag = -4; lag <= 4; ++lag) {
      ASSERT_EQ(ab.rho_at(lag).has_value(), ba.rho_at(-lag).has_value());
      if (ab.rho_at(lag)) EXPECT_NEAR(*ab.rho_at(lag), *ba.rho_at(-lag), 1e-14);
      EXPECT_EQ(ab.overlap_at(lag), ba.overlap_at(-lag));
    }
  }
}

TEST(LeadLag, IndependentSeriesStayNearZero) {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> g;
  Eigen::VectorXd a(2000), b(2000);
  for (int i = 0; i < 2000; ++i) {
    a(i) = g(rng);
    b(i) = g(rng);
  }
  const auto profile = lead_lag_profile(weekly("2000-01-03", a), weekly("2000-01-03", b), 3);
  for (const auto& rho : profile.rho) EXPECT_LT(std::abs(*rho), 0.2);
}

TEST(LeadLag, ShortOverlapIsUndefined) {
  const auto profile =
      lead_lag_profile(weekly("2024-01-01", vec({1, 2, 3, 4})), weekly("2024-01-01", vec({4, 1, 3, 2})), 2);
  EXPECT_FALSE(profile.rho_at(-2).has_value());
  EXPECT_FALSE(profile.rho_at(2).has_value());
  EXPECT_TRUE(profile.rho_at(1).has_value());
  EXPECT_EQ(profile.overlap_at(2), 2u);
}

TEST(LeadLag, Errors) {
  EXPECT_EQ(code_of([] {
              (void)lead_lag_profile(weekly("2024-01-01", vec({1, 2, 3, 4})),
                                     weekly("2024-01-03", vec({1, 2, 3, 4})), 1);
            }),
            ErrorCode::MisalignedGrids);
  EXPECT_EQ(code_of([] {
              (void)lead_lag_profile(weekly("2024-01-01", vec({1, 2, 3, 4})),
                                     weekly("2024-01-01", vec({2, 2, 2, 2})), 1);
            }),
            ErrorCode::AllLagsUndefined);
  EXPECT_EQ(code_of([] {
              (void)lead_lag_profile(weekly("2024-01-01", vec({1, 2})), weekly("2024-01-01", vec({1, 2})), 1);
            }),
            ErrorCode::AllLagsUndefined);
}

TEST(LeadLag, AcceptsGroundTruthSeries) {
  const auto truth = make_ground_truth({{parse_date("2024-01-15"), 3}, {parse_date("2024-01-01"), 1},
                                        {parse_date("2024-01-08"), 2}, {parse_date("2024-01-22"), 5}});
  const auto profile = lead_lag_profile(weekly("2024-01-01", vec({1, 2, 3, 4})), truth, 0);
  EXPECT_NEAR(*profile.rho_at(0), 1.0, 1e-15);
}

TEST(InterpretProfile, MeaningfulNegativeLag) {
  LagCorrelationProfile profile;
  profile.lags = {-3, -2, -1, 0, 1, 2, 3};
  profile.rho = {0.440, 0.31, 0.12, std::nullopt, -0.05, 0.2, 0.1};
  profile.overlap = {9, 10, 11, 12, 11, 10, 9};
  const auto r = interpret_profile(profile);
  EXPECT_EQ(r.best_lag, -3);
  EXPECT_EQ(r.strength, "meaningful range");
  EXPECT_EQ(r.label_reading, "social media leads by 3 weeks");
  EXPECT_EQ(r.summary.rfind("strongest association at -3 weeks (rho=0.440), meaningful range", 0), 0u) << r.summary;
}

TEST(InterpretProfile, TiesPreferSmallerLagThenNegative) {
  LagCorrelationProfile profile;
  profile.lags = {-2, -1, 0, 1, 2};
  profile.rho = {0.6, -0.5, 0.1, 0.5, -0.6};
  profile.overlap = {5, 5, 5, 5, 5};
  EXPECT_EQ(interpret_profile(profile).best_lag, -2);
  profile.rho = {0.1, -0.5, 0.1, 0.5, 0.2};
  EXPECT_EQ(interpret_profile(profile).best_lag, -1);
  profile.rho = {0.1, 0.1, 0.29, 0.1, 0.1};
  EXPECT_EQ(interpret_profile(profile).strength, "below meaningful range");
  profile.rho.assign(5, std::nullopt);
  EXPECT_THROW((void)interpret_profile(profile), Error);
}
