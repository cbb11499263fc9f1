#include "disimpact/windowing.hpp"

#include <algorithm>

#include "disimpact/error.hpp"
#include "disimpact/time.hpp"

namespace disimpact {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const auto q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

Date require_anchor(const IndexConfig& config) {
  if (!config.window_anchor) throw Error(ErrorCode::InvalidConfig, "window anchor is not set");
  return *config.window_anchor;
}

}  // namespace

TimeWindow CountSeries::window(Eigen::Index t) const {
  return {static_cast<std::int64_t>(t), start + std::chrono::days{window_days * t}, window_days};
}

WindowCounts CountSeries::at(Eigen::Index t) const {
  WindowCounts wc;
  wc.window = window(t);
  wc.n = counts.row(t);
  wc.total = wc.n.sum();
  return wc;
}

std::int64_t assign_window(Timestamp created_at, const IndexConfig& config) {
  const Date anchor = require_anchor(config);
  const Date day = date_of(created_at);
  if (day < anchor) {
    throw Error(ErrorCode::BeforeAnchor,
                format_timestamp(created_at) + " precedes window anchor " + format_date(anchor));
  }
  return (day - anchor).count() / config.window_days;
}

Date resolve_anchor(const IndexConfig& config, std::span<const AnnotatedPost> posts) {
  if (config.window_anchor) return *config.window_anchor;
  if (posts.empty()) throw Error(ErrorCode::EmptyInput, "cannot derive a window anchor without posts");
  const auto earliest = std::min_element(posts.begin(), posts.end(), [](const auto& a, const auto& b) {
    return a.post.created_at < b.post.created_at;
  });
  return monday_on_or_before(date_of(earliest->post.created_at));
}

DateRange covering_range(std::span<const AnnotatedPost> posts, Date anchor, int window_days) {
  if (posts.empty()) return {anchor, anchor};
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool first = true;
  for (const auto& p : posts) {
    const auto w = floor_div((date_of(p.post.created_at) - anchor).count(), window_days);
    lo = first ? w : std::min(lo, w);
    hi = first ? w : std::max(hi, w);
    first = false;
  }
  return {anchor + std::chrono::days{lo * window_days}, anchor + std::chrono::days{(hi + 1) * window_days}};
}

CountBuild build_count_series(std::span<const AnnotatedPost> posts, const IndexConfig& config,
                              DateRange range) {
  config.validate();
  const Date anchor = require_anchor(config);
  const auto width = config.window_days;
  const auto start_offset = (range.start - anchor).count();
  const auto span_days = (range.end - range.start).count();
  if (span_days < 0 || start_offset % width != 0 || span_days % width != 0) {
    throw Error(ErrorCode::MisalignedRange,
                "range [" + format_date(range.start) + ", " + format_date(range.end) +
                    ") is not aligned to " + std::to_string(width) + "-day windows anchored at " +
                    format_date(anchor));
  }

  CountBuild build;
  build.series.start = range.start;
  build.series.window_days = width;
  build.series.counts = CountMatrix::Zero(span_days / width, kCategoryCount);

  for (const auto& p : posts) {
    if (!p.relevant) {
      ++build.irrelevant_skipped;
      continue;
    }
    const Date day = date_of(p.post.created_at);
    if (day < range.start || day >= range.end) {
      ++build.outside_range;
      continue;
    }
    const auto t = (day - range.start).count() / width;
    ++build.series.counts(t, column(p.category));
    ++build.counted;
  }
  return build;
}

}  // namespace disimpact
