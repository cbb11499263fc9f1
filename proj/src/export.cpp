#include "disimpact/export.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "disimpact/csv.hpp"
#include "disimpact/time.hpp"

namespace disimpact {

namespace {

std::int64_t parse_count(const std::string& field, std::size_t line) {
  std::int64_t v = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": '" + field + "' is not an integer");
  }
  return v;
}

double parse_real(const std::string& field, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used == field.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": '" + field + "' is not a number");
}

std::size_t column_of(const csv::Table& table, std::string_view name, const std::filesystem::path& path) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) {
    throw Error(ErrorCode::UnknownColumn, path.string() + " has no column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - table.header.begin());
}

bool has_column(const csv::Table& table, std::string_view name) {
  return std::find(table.header.begin(), table.header.end(), name) != table.header.end();
}

}  // namespace

void write_counts_csv(std::ostream& out, const CountSeries& series) {
  out << "window_start,category,count,total\n";
  for (Eigen::Index t = 0; t < series.size(); ++t) {
    const auto w = series.at(t);
    const auto start = format_date(w.window.start);
    for (auto c : kAllCategories) {
      out << start << ',' << short_name(c) << ',' << w.n(column(c)) << ',' << w.total << '\n';
    }
  }
}

CountSeries read_counts_csv(const std::filesystem::path& path, int window_days) {
  const auto table = csv::read_file(path);
  csv::require_header(table, {"window_start", "category", "count", "total"}, path.string());

  std::map<Date, std::pair<CountRow, std::int64_t>> rows;
  std::map<Date, std::vector<bool>> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = table.line_numbers[r];
    const Date start = parse_date(row[0]);
    const auto cat = category_from_short_name(row[1]);
    if (!cat) throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": unknown category '" + row[1] + "'");
    const auto count = parse_count(row[2], line);
    const auto total = parse_count(row[3], line);
    if (count < 0 || total < 0) throw Error(ErrorCode::InvalidCounts, "line " + std::to_string(line) + ": negative count");
    auto [it, inserted] = rows.try_emplace(start, CountRow::Zero(), total);
    auto& flags = seen[start];
    if (inserted) flags.assign(kCategoryCount, false);
    if (flags[column(*cat)]) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": duplicate " + row[0] + "/" + row[1]);
    }
    if (it->second.second != total) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": inconsistent total for " + row[0]);
    }
    flags[column(*cat)] = true;
    it->second.first(column(*cat)) = count;
  }

  CountSeries series;
  series.window_days = window_days;
  series.counts.resize(static_cast<Eigen::Index>(rows.size()), kCategoryCount);
  if (rows.empty()) return series;
  series.start = rows.begin()->first;
  Eigen::Index t = 0;
  for (const auto& [start, entry] : rows) {
    if (start != series.start + std::chrono::days{window_days * t}) {
      throw Error(ErrorCode::MalformedCsv, path.string() + ": window " + format_date(start) + " is off the " +
                                               std::to_string(window_days) + "-day grid or leaves a gap");
    }
    if (entry.first.sum() != entry.second) {
      throw Error(ErrorCode::MalformedCsv, path.string() + ": total for " + format_date(start) +
                                               " does not match its category counts");
    }
    series.counts.row(t++) = entry.first;
  }
  return series;
}

void write_index_csv(std::ostream& out, const ImpactSeries<double>& series) {
  out << "window_start,category,n,total,p,w,index\n";
  const auto totals = series.counts.rowwise().sum();
  for (Eigen::Index t = 0; t < series.size(); ++t) {
    const auto start = format_date(series.window_start(t));
    const auto w = csv::format_real(series.weight(t));
    for (auto c : kAllCategories) {
      const auto k = column(c);
      out << start << ',' << short_name(c) << ',' << series.counts(t, k) << ',' << totals(t) << ','
          << csv::format_real(series.proportion(t, k)) << ',' << w << ',' << csv::format_real(series.index(t, k))
          << '\n';
    }
  }
}

void write_domain_csv(std::ostream& out, const ImpactSeries<double>& series) {
  out << "window_start,domain,composite\n";
  for (Eigen::Index t = 0; t < series.size(); ++t) {
    const auto start = format_date(series.window_start(t));
    out << start << ",physical," << csv::format_real(series.physical(t)) << '\n';
    out << start << ",social," << csv::format_real(series.social(t)) << '\n';
  }
}

void write_leadlag_csv(std::ostream& out, const LagCorrelationProfile& profile) {
  out << "lag_weeks,rho,overlap\n";
  for (std::size_t i = 0; i < profile.lags.size(); ++i) {
    out << profile.lags[i] << ',' << (profile.rho[i] ? csv::format_real(*profile.rho[i]) : std::string{}) << ','
        << profile.overlap[i] << '\n';
  }
}

void write_spatial_csv(std::ostream& out, const SpatialAggregation& aggregation) {
  out << "state,month,source,physical,social,post_count\n";
  for (const auto& r : aggregation.rows) {
    out << csv::escape(r.state) << ',' << r.month << ',' << to_string(r.source) << ',' << csv::format_real(r.physical)
        << ',' << csv::format_real(r.social) << ',' << r.post_count << '\n';
  }
}

const NamedSeries* SeriesTable::find(std::string_view name) const {
  const auto it = std::find_if(series.begin(), series.end(), [&](const NamedSeries& s) { return s.name == name; });
  return it == series.end() ? nullptr : &*it;
}

SeriesTable read_series_table(const std::filesystem::path& path, std::optional<std::string> key_column,
                              std::optional<std::string> value_column) {
  const auto table = csv::read_file(path);
  if (!key_column) {
    if (has_column(table, "category")) {
      key_column = "category";
    } else if (has_column(table, "domain")) {
      key_column = "domain";
    } else {
      throw Error(ErrorCode::UnknownColumn, path.string() + " has neither a 'category' nor a 'domain' column");
    }
  }
  if (!value_column) value_column = *key_column == "category" ? "index" : "composite";

  const auto week_col = column_of(table, "window_start", path);
  const auto key_col = column_of(table, *key_column, path);
  const auto value_col = column_of(table, *value_column, path);

  std::map<Date, std::size_t> week_pos;
  for (const auto& row : table.rows) week_pos.emplace(parse_date(row[week_col]), 0);
  SeriesTable out;
  for (auto& [week, pos] : week_pos) {
    pos = out.weeks.size();
    out.weeks.push_back(week);
  }

  std::vector<std::vector<bool>> filled;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = table.line_numbers[r];
    const auto& key = row[key_col];
    auto it = std::find_if(out.series.begin(), out.series.end(), [&](const NamedSeries& s) { return s.name == key; });
    if (it == out.series.end()) {
      out.series.push_back({key, std::vector<double>(out.weeks.size(), 0.0)});
      filled.emplace_back(out.weeks.size(), false);
      it = out.series.end() - 1;
    }
    const auto s = static_cast<std::size_t>(it - out.series.begin());
    const auto w = week_pos.at(parse_date(row[week_col]));
    if (filled[s][w]) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": duplicate row for " + key);
    }
    filled[s][w] = true;
    it->values[w] = parse_real(row[value_col], line);
  }
  for (std::size_t s = 0; s < filled.size(); ++s) {
    const auto missing = std::find(filled[s].begin(), filled[s].end(), false);
    if (missing != filled[s].end()) {
      throw Error(ErrorCode::MalformedCsv, path.string() + ": series '" + out.series[s].name + "' has no row for " +
                                               format_date(out.weeks[static_cast<std::size_t>(missing - filled[s].begin())]));
    }
  }
  return out;
}

WeeklySeries weekly_from_table(const SeriesTable& table, std::string_view name) {
  const auto* s = table.find(name);
  if (s == nullptr) throw Error(ErrorCode::UnknownColumn, "no series named '" + std::string(name) + "'");
  WeeklySeries out;
  if (table.weeks.empty()) return out;
  out.start = table.weeks.front();
  for (std::size_t i = 0; i < table.weeks.size(); ++i) {
    if (table.weeks[i] != out.start + std::chrono::days{7 * static_cast<std::int64_t>(i)}) {
      throw Error(ErrorCode::MisalignedGrids, "series '" + std::string(name) + "' is not on a contiguous weekly grid");
    }
  }
  out.values = Eigen::Map<const Eigen::VectorXd>(s->values.data(), static_cast<Eigen::Index>(s->values.size()));
  return out;
}

}  // namespace disimpact
