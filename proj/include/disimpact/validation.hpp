#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "disimpact/core.hpp"
#include "disimpact/error.hpp"
#include "disimpact/ingestion.hpp"

namespace disimpact {

/// Pairs need at least this many overlapping weeks for a defined rho.
inline constexpr std::size_t kMinLagOverlap = 3;

/// Average ranks (1-based); tied values share the mean of their positions.
template <typename Derived>
Eigen::VectorXd midranks(const Eigen::DenseBase<Derived>& values) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values.derived()(a) < values.derived()(b); });
  Eigen::VectorXd ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i + 1;
    while (j < n && values.derived()(order[static_cast<std::size_t>(j)]) ==
                        values.derived()(order[static_cast<std::size_t>(i)])) {
      ++j;
    }
    const double rank = 0.5 * static_cast<double>(i + j + 1);  // mean of i+1 .. j
    for (Eigen::Index k = i; k < j; ++k) ranks(order[static_cast<std::size_t>(k)]) = rank;
    i = j;
  }
  return ranks;
}

/// Pearson correlation of midranks. Throws Error(LengthMismatch),
/// Error(EmptyInput) below three points, Error(ConstantInput) if either
/// vector is constant.
template <typename DerivedX, typename DerivedY>
double spearman_rho(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "spearman_rho on vectors of length " + std::to_string(x.size()) +
                                               " and " + std::to_string(y.size()));
  }
  if (x.size() < 3) throw Error(ErrorCode::EmptyInput, "spearman_rho needs at least 3 pairs");
  const Eigen::VectorXd rx = midranks(x);
  const Eigen::VectorXd ry = midranks(y);
  const Eigen::VectorXd dx = rx.array() - rx.mean();
  const Eigen::VectorXd dy = ry.array() - ry.mean();
  const double sxx = dx.squaredNorm();
  const double syy = dy.squaredNorm();
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ConstantInput, "spearman_rho on a constant vector");
  return std::clamp(dx.dot(dy) / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// A real-valued series on a 7-day grid.
struct WeeklySeries {
  Date start{};
  Eigen::VectorXd values;

  Eigen::Index size() const noexcept { return values.size(); }
};

WeeklySeries to_weekly(const GroundTruthSeries& truth);

struct LagCorrelationProfile {
  std::vector<int> lags;
  /// nullopt where overlap < 3 or either paired vector is constant.
  std::vector<std::optional<double>> rho;
  std::vector<std::size_t> overlap;

  std::size_t position(int lag) const;
  const std::optional<double>& rho_at(int lag) const { return rho[position(lag)]; }
  std::size_t overlap_at(int lag) const { return overlap[position(lag)]; }
};

/// For every lag l in [-max_lag, max_lag], correlates index_t with
/// truth_{t+l} over all weeks t where both exist. Throws
/// Error(MisalignedGrids) when the two grids are not 7-day aligned and
/// Error(AllLagsUndefined) when no lag yields a defined rho.
LagCorrelationProfile lead_lag_profile(const WeeklySeries& index, const WeeklySeries& truth, int max_lag);
LagCorrelationProfile lead_lag_profile(const WeeklySeries& index, const GroundTruthSeries& truth, int max_lag);

struct ProfileInterpretation {
  int best_lag{0};
  double rho{0.0};
  /// "below meaningful range", "meaningful range" (0.3 <= |rho| <= 0.5) or "above meaningful range".
  std::string strength;
  /// Literal reading of the pairing: which series the paired ground truth precedes.
  std::string pairing_reading;
  /// Reading under the lag-sign labels (negative: social media leads).
  std::string label_reading;
  std::string summary;
};

/// Picks the defined lag with the largest |rho| (ties: smaller |lag|, then
/// the negative lag). Throws Error(AllLagsUndefined).
ProfileInterpretation interpret_profile(const LagCorrelationProfile& profile);

}  // namespace disimpact
