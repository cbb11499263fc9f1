#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "disimpact/impact_index.hpp"
#include "disimpact/spatial.hpp"
#include "disimpact/validation.hpp"
#include "disimpact/windowing.hpp"

namespace disimpact {

// counts.csv: window_start,category,count,total (one row per window and category)
void write_counts_csv(std::ostream& out, const CountSeries& series);
/// Reads counts.csv back into a contiguous series. Throws Error(MalformedCsv)
/// for gaps, duplicates or a total that disagrees with the category counts.
CountSeries read_counts_csv(const std::filesystem::path& path, int window_days = 7);

// index.csv: window_start,category,n,total,p,w,index
void write_index_csv(std::ostream& out, const ImpactSeries<double>& series);

// domain.csv: window_start,domain,composite
void write_domain_csv(std::ostream& out, const ImpactSeries<double>& series);

// leadlag.csv: lag_weeks,rho,overlap; undefined rho is an empty field
void write_leadlag_csv(std::ostream& out, const LagCorrelationProfile& profile);

// spatial.csv: state,month,source,physical,social,post_count
void write_spatial_csv(std::ostream& out, const SpatialAggregation& aggregation);

/// Weekly series keyed by name, as read back from index.csv or domain.csv.
struct NamedSeries {
  std::string name;
  std::vector<double> values;
};

struct SeriesTable {
  std::vector<Date> weeks;
  /// In first-appearance order.
  std::vector<NamedSeries> series;

  const NamedSeries* find(std::string_view name) const;
};

/// Reads a long-format table, grouping `value_column` by `key_column` over
/// `window_start`. With no columns given, index.csv (category/index) and
/// domain.csv (domain/composite) are recognised from the header. Throws
/// Error(UnknownColumn) when a column is absent and Error(MalformedCsv) when a
/// series misses a week.
SeriesTable read_series_table(const std::filesystem::path& path, std::optional<std::string> key_column = {},
                              std::optional<std::string> value_column = {});

/// The named series as a weekly series for lead_lag_profile. Throws
/// Error(UnknownColumn) if absent.
WeeklySeries weekly_from_table(const SeriesTable& table, std::string_view name);

}  // namespace disimpact
