#include "disimpact/validation.hpp"

#include <cstdio>

#include "disimpact/time.hpp"

namespace disimpact {

WeeklySeries to_weekly(const GroundTruthSeries& truth) {
  WeeklySeries out;
  if (truth.entries.empty()) return out;
  out.start = truth.start();
  out.values.resize(static_cast<Eigen::Index>(truth.size()));
  for (std::size_t i = 0; i < truth.size(); ++i) out.values(static_cast<Eigen::Index>(i)) = truth.entries[i].value;
  return out;
}

std::size_t LagCorrelationProfile::position(int lag) const {
  const auto it = std::find(lags.begin(), lags.end(), lag);
  if (it == lags.end()) throw Error(ErrorCode::OutOfRange, "lag " + std::to_string(lag) + " not in profile");
  return static_cast<std::size_t>(it - lags.begin());
}

LagCorrelationProfile lead_lag_profile(const WeeklySeries& index, const WeeklySeries& truth, int max_lag) {
  if (max_lag < 0) throw Error(ErrorCode::OutOfRange, "max_lag must be >= 0");
  const auto offset_days = (truth.start - index.start).count();
  if (offset_days % 7 != 0) {
    throw Error(ErrorCode::MisalignedGrids, "index grid starting " + format_date(index.start) +
                                                " and ground-truth grid starting " + format_date(truth.start) +
                                                " are not 7-day aligned");
  }
  // truth position of the week that index position t falls on.
  const Eigen::Index shift = offset_days / 7;

  LagCorrelationProfile profile;
  bool any_defined = false;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (Eigen::Index t = 0; t < index.size(); ++t) {
      const Eigen::Index u = t - shift + lag;
      if (u < 0 || u >= truth.size()) continue;
      xs.push_back(index.values(t));
      ys.push_back(truth.values(u));
    }
    std::optional<double> rho;
    if (xs.size() >= kMinLagOverlap) {
      const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
      const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
      try {
        rho = spearman_rho(x, y);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ConstantInput) throw;
      }
    }
    any_defined = any_defined || rho.has_value();
    profile.lags.push_back(lag);
    profile.rho.push_back(rho);
    profile.overlap.push_back(xs.size());
  }
  if (!any_defined) throw Error(ErrorCode::AllLagsUndefined, "no lag has a defined rank correlation");
  return profile;
}

LagCorrelationProfile lead_lag_profile(const WeeklySeries& index, const GroundTruthSeries& truth, int max_lag) {
  return lead_lag_profile(index, to_weekly(truth), max_lag);
}

ProfileInterpretation interpret_profile(const LagCorrelationProfile& profile) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < profile.lags.size(); ++i) {
    if (!profile.rho[i]) continue;
    if (!best) {
      best = i;
      continue;
    }
    const double a = std::abs(*profile.rho[i]);
    const double b = std::abs(*profile.rho[*best]);
    const int la = profile.lags[i];
    const int lb = profile.lags[*best];
    if (a > b + 1e-12 || (std::abs(a - b) <= 1e-12 &&
                          (std::abs(la) < std::abs(lb) || (std::abs(la) == std::abs(lb) && la < lb)))) {
      best = i;
    }
  }
  if (!best) throw Error(ErrorCode::AllLagsUndefined, "no lag has a defined rank correlation");

  ProfileInterpretation out;
  out.best_lag = profile.lags[*best];
  out.rho = *profile.rho[*best];
  const double mag = std::abs(out.rho);
  out.strength = mag < 0.3 ? "below meaningful range" : (mag <= 0.5 ? "meaningful range" : "above meaningful range");

  const int weeks = std::abs(out.best_lag);
  const std::string w = std::to_string(weeks) + (weeks == 1 ? " week" : " weeks");
  if (out.best_lag == 0) {
    out.pairing_reading = "index and ground truth paired in the same week";
    out.label_reading = "contemporaneous";
  } else if (out.best_lag < 0) {
    out.pairing_reading = "index in week t paired with ground truth in week t-" + std::to_string(weeks) +
                          " (ground truth precedes the index by " + w + ")";
    out.label_reading = "social media leads by " + w;
  } else {
    out.pairing_reading = "index in week t paired with ground truth in week t+" + std::to_string(weeks) +
                          " (index precedes the ground truth by " + w + ")";
    out.label_reading = "ground truth leads by " + w;
  }

  char rho_text[32];
  std::snprintf(rho_text, sizeof rho_text, "%.3f", out.rho);
  out.summary = "strongest association at " + std::to_string(out.best_lag) + " weeks (rho=" + rho_text + "), " +
                out.strength + "; " + out.label_reading + "; " + out.pairing_reading;
  return out;
}

}  // namespace disimpact
