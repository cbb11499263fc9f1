#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "disimpact/core.hpp"

namespace disimpact {

/// Row t holds n_t(c) for every category, columns ordered by category code.
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, kCategoryCount, Eigen::RowMajor>;
using CountRow = Eigen::Matrix<std::int64_t, 1, kCategoryCount>;

struct WindowCounts {
  TimeWindow window;
  CountRow n{CountRow::Zero()};
  std::int64_t total{0};
};

/// Contiguous, zero-filled sequence of windows starting at `start`.
struct CountSeries {
  Date start{};
  int window_days{7};
  CountMatrix counts;

  Eigen::Index size() const noexcept { return counts.rows(); }
  bool empty() const noexcept { return counts.rows() == 0; }
  Date end() const { return start + std::chrono::days{window_days * counts.rows()}; }
  TimeWindow window(Eigen::Index t) const;
  WindowCounts at(Eigen::Index t) const;
  /// N_t for every window.
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> totals() const { return counts.rowwise().sum(); }
};

/// Half-open date range [start, end).
struct DateRange {
  Date start{};
  Date end{};
};

/// floor((date(created_at) - anchor) / window_days). Throws
/// Error(BeforeAnchor) for timestamps before the anchor and
/// Error(InvalidConfig) when the config carries no anchor.
std::int64_t assign_window(Timestamp created_at, const IndexConfig& config);

/// The configured anchor, or the Monday on or before the earliest post.
/// Throws Error(EmptyInput) if neither is available.
Date resolve_anchor(const IndexConfig& config, std::span<const AnnotatedPost> posts);

/// Smallest window-aligned range covering every post, given an anchor.
DateRange covering_range(std::span<const AnnotatedPost> posts, Date anchor, int window_days);

struct CountBuild {
  CountSeries series;
  std::size_t counted{0};
  std::size_t outside_range{0};
  std::size_t irrelevant_skipped{0};
};

/// Counts posts per (window, category) over `range`. The config must carry
/// an anchor; `range` must start and end on window boundaries of that anchor
/// or Error(MisalignedRange) is thrown. Posts outside the range and posts
/// flagged irrelevant are reported, not counted.
CountBuild build_count_series(std::span<const AnnotatedPost> posts, const IndexConfig& config,
                              DateRange range);

}  // namespace disimpact
