#pragma once

// Stage two: smoothed category proportions, volume-driven intensity weights
// and the resulting per-category impact index on the (0, pi) scale.
//
//   P_t(c) = (n_t(c) + alpha) / (N_t + alpha * C)
//   w_t    = atan((N_t - N_mean) / IQR) + pi / 2
//   I_t(c) = P_t(c) * w_t

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "disimpact/core.hpp"
#include "disimpact/error.hpp"
#include "disimpact/windowing.hpp"

namespace disimpact {

/// Substitute scale used when the IQR of window totals is zero:
/// max(1, N_mean * kIqrFallbackEpsilon).
inline constexpr double kIqrFallbackEpsilon = 1e-6;

template <std::floating_point Scalar>
using CategoryMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, kCategoryCount, Eigen::RowMajor>;

template <std::floating_point Scalar>
using SeriesVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <std::floating_point Scalar = double>
Scalar smoothed_proportion(std::int64_t n, std::int64_t total, const IndexConfig& config) {
  if (n < 0 || total < 0 || n > total) {
    throw Error(ErrorCode::InvalidCounts,
                "invalid counts n=" + std::to_string(n) + ", total=" + std::to_string(total));
  }
  config.validate();
  const auto alpha = static_cast<Scalar>(config.alpha);
  return (static_cast<Scalar>(n) + alpha) /
         (static_cast<Scalar>(total) + alpha * static_cast<Scalar>(config.category_count));
}

/// Q3 - Q1 of `values` under `method`. Throws Error(EmptyInput).
template <typename Derived>
typename Derived::Scalar compute_iqr(const Eigen::DenseBase<Derived>& values,
                                     QuantileMethod method = QuantileMethod::Linear) {
  using Scalar = typename Derived::Scalar;
  static_assert(std::is_floating_point_v<Scalar>, "compute_iqr needs a floating-point vector");
  if (values.size() == 0) throw Error(ErrorCode::EmptyInput, "IQR of an empty series");

  std::vector<Scalar> sorted;
  sorted.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) sorted.push_back(values.derived()(i));
  std::sort(sorted.begin(), sorted.end());

  const auto n = static_cast<Scalar>(sorted.size());
  const auto quantile = [&](Scalar p) {
    Scalar h{};
    switch (method) {
      case QuantileMethod::Linear: h = (n - 1) * p; break;
      case QuantileMethod::Hazen: h = n * p - Scalar(0.5); break;
      case QuantileMethod::Weibull: h = (n + 1) * p - 1; break;
    }
    h = std::clamp(h, Scalar{0}, n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<Scalar>(lo)) * (sorted[hi] - sorted[lo]);
  };
  return quantile(Scalar(0.75)) - quantile(Scalar(0.25));
}

template <std::floating_point Scalar = double>
struct SeriesStats {
  Scalar n_mean{0};
  /// IQR actually used for normalisation (after any fallback).
  Scalar iqr{1};
  /// IQR measured on the window totals.
  Scalar raw_iqr{0};
  Eigen::Index t_count{0};
  bool iqr_fallback{false};
};

/// N_mean and IQR over every window total, empty windows included.
template <std::floating_point Scalar = double>
SeriesStats<Scalar> compute_series_stats(const Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>& totals,
                                         QuantileMethod method = QuantileMethod::Linear) {
  if (totals.size() == 0) throw Error(ErrorCode::EmptyInput, "series has no windows");
  const SeriesVector<Scalar> values = totals.cast<Scalar>();
  SeriesStats<Scalar> stats;
  stats.t_count = values.size();
  stats.n_mean = values.mean();
  stats.raw_iqr = compute_iqr(values, method);
  stats.iqr = stats.raw_iqr;
  if (!(stats.raw_iqr > 0)) {
    stats.iqr = std::max(Scalar{1}, stats.n_mean * static_cast<Scalar>(kIqrFallbackEpsilon));
    stats.iqr_fallback = true;
  }
  return stats;
}

/// atan(x) + pi/2, evaluated without cancellation for negative x and kept
/// strictly inside (0, pi).
template <std::floating_point Scalar>
Scalar shifted_arctan(Scalar x) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar w = x < 0 ? std::atan(-1 / x) : std::atan(x) + pi / 2;
  return std::clamp(w, std::numeric_limits<Scalar>::denorm_min(), std::nextafter(pi, Scalar{0}));
}

template <std::floating_point Scalar = double>
Scalar intensity_weight(std::int64_t total, const SeriesStats<Scalar>& stats) {
  return shifted_arctan<Scalar>((static_cast<Scalar>(total) - stats.n_mean) / stats.iqr);
}

/// p * w; throws Error(OutOfDomain) unless 0 < p < 1 and 0 < w < pi.
template <std::floating_point Scalar = double>
Scalar impact_index(Scalar p, Scalar w) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (!(p > 0 && p < 1) || !(w > 0 && w < pi)) {
    throw Error(ErrorCode::OutOfDomain, "impact index needs 0 < p < 1 and 0 < w < pi");
  }
  return p * w;
}

template <std::floating_point Scalar = double>
struct ImpactSeries {
  Date start{};
  int window_days{7};
  CountMatrix counts;
  SeriesStats<Scalar> stats;
  /// Smoothed proportions, one row per window.
  CategoryMatrix<Scalar> proportion;
  /// Intensity weight per window.
  SeriesVector<Scalar> weight;
  /// Impact index, one row per window.
  CategoryMatrix<Scalar> index;
  SeriesVector<Scalar> physical;
  SeriesVector<Scalar> social;
  CompositeOperator composite_operator{CompositeOperator::Sum};

  Eigen::Index size() const noexcept { return index.rows(); }
  Date window_start(Eigen::Index t) const { return start + std::chrono::days{window_days * t}; }

  auto category_series(ImpactCategory c) const { return index.col(column(c)); }
  const SeriesVector<Scalar>& domain_series(Domain d) const {
    if (d == Domain::Physical) return physical;
    if (d == Domain::Social) return social;
    throw Error(ErrorCode::OutOfDomain, "OTHER has no domain composite");
  }
};

/// Combines the five member-category columns of `index` per window.
template <typename Derived>
SeriesVector<typename Derived::Scalar> domain_composite(const Eigen::MatrixBase<Derived>& index, Domain domain,
                                                        CompositeOperator op) {
  using Scalar = typename Derived::Scalar;
  if (domain == Domain::None) throw Error(ErrorCode::OutOfDomain, "OTHER has no domain composite");
  const Eigen::Index first = domain == Domain::Physical ? 0 : 5;
  SeriesVector<Scalar> out = index.middleCols(first, 5).rowwise().sum();
  if (op == CompositeOperator::Mean) out /= Scalar(5);
  return out;
}

/// Applies the three formulas to every window of `counts`. N_mean and IQR
/// are batch quantities over the whole series. Throws Error(EmptyInput).
template <std::floating_point Scalar = double>
ImpactSeries<Scalar> compute_impact_series(const CountSeries& counts, const IndexConfig& config) {
  config.validate();
  if (counts.empty()) throw Error(ErrorCode::EmptyInput, "count series has no windows");
  if ((counts.counts.array() < 0).any()) throw Error(ErrorCode::InvalidCounts, "negative category count");

  ImpactSeries<Scalar> out;
  out.start = counts.start;
  out.window_days = counts.window_days;
  out.counts = counts.counts;
  out.composite_operator = config.composite_operator;

  const Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> totals = counts.totals();
  out.stats = compute_series_stats<Scalar>(totals, config.quantile_method);

  const auto alpha = static_cast<Scalar>(config.alpha);
  const SeriesVector<Scalar> denom =
      totals.cast<Scalar>().array() + alpha * static_cast<Scalar>(config.category_count);
  out.proportion = (counts.counts.cast<Scalar>().array() + alpha).colwise() / denom.array();

  out.weight.resize(totals.size());
  for (Eigen::Index t = 0; t < totals.size(); ++t) out.weight(t) = intensity_weight<Scalar>(totals(t), out.stats);

  out.index = out.proportion.array().colwise() * out.weight.array();
  out.physical = domain_composite(out.index, Domain::Physical, config.composite_operator);
  out.social = domain_composite(out.index, Domain::Social, config.composite_operator);
  return out;
}

}  // namespace disimpact
