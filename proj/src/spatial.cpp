#include "disimpact/spatial.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#include "disimpact/csv.hpp"
#include "disimpact/error.hpp"
#include "disimpact/impact_index.hpp"
#include "disimpact/time.hpp"
#include "disimpact/windowing.hpp"

namespace disimpact {

namespace {

constexpr std::array<std::string_view, 18> kAmbiguousCodes = {
    "AL", "AR", "CO", "DE", "HI", "ID", "IN", "LA", "MA", "MD", "ME", "MO", "MS", "NE", "OH", "OK", "OR", "PA"};

bool is_alnum(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) != 0; }
bool is_upper(char ch) { return ch >= 'A' && ch <= 'Z'; }
bool is_lower(char ch) { return ch >= 'a' && ch <= 'z'; }
bool is_alpha(char ch) { return is_upper(ch) || is_lower(ch); }

std::string lowered(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

bool on_word_boundary(std::string_view text, std::size_t pos, std::size_t len) {
  const bool left = pos == 0 || !is_alnum(text[pos - 1]);
  const bool right = pos + len >= text.size() || !is_alnum(text[pos + len]);
  return left && right;
}

// True when the token at `pos` follows a capitalised word, separated by
// spaces and at most one comma.
bool after_capitalised_word(std::string_view text, std::size_t pos) {
  std::size_t i = pos;
  std::size_t separators = 0;
  bool comma = false;
  while (i > 0 && (text[i - 1] == ' ' || (text[i - 1] == ',' && !comma))) {
    comma = comma || text[i - 1] == ',';
    --i;
    ++separators;
  }
  if (separators == 0) return false;
  const std::size_t end = i;
  while (i > 0 && is_alpha(text[i - 1])) --i;
  if (i == end) return false;
  const std::string_view word = text.substr(i, end - i);
  return is_upper(word.front()) && std::any_of(word.begin() + 1, word.end(), is_lower);
}

PlaceKind kind_from_string(std::string_view s) {
  if (s == "state") return PlaceKind::State;
  if (s == "abbrev") return PlaceKind::Abbrev;
  if (s == "city") return PlaceKind::City;
  throw Error(ErrorCode::MalformedCsv, "unknown gazetteer kind '" + std::string(s) + "'");
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const auto q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace

bool is_ambiguous_abbrev(std::string_view code) noexcept {
  return std::find(kAmbiguousCodes.begin(), kAmbiguousCodes.end(), code) != kAmbiguousCodes.end();
}

Gazetteer::Gazetteer(std::vector<GazetteerEntry> entries) : entries_(std::move(entries)) {
  lowered_names_.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (e.name.empty()) throw Error(ErrorCode::MalformedCsv, "empty gazetteer name");
    if (e.kind == PlaceKind::Abbrev &&
        (e.name.size() != 2 || !is_upper(e.name[0]) || !is_upper(e.name[1]))) {
      throw Error(ErrorCode::MalformedCsv, "abbreviation '" + e.name + "' is not two uppercase letters");
    }
    lowered_names_.push_back(lowered(e.name));
  }
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  csv::require_header(table, {"name", "state_code", "kind"}, path.string());
  std::vector<GazetteerEntry> entries;
  entries.reserve(table.rows.size());
  for (const auto& row : table.rows) entries.push_back({row[0], row[1], kind_from_string(row[2])});
  return Gazetteer(std::move(entries));
}

std::optional<PlaceMatch> Gazetteer::find(std::string_view text, bool strict_codes) const {
  const std::string lower_text = lowered(text);
  std::optional<PlaceMatch> best;
  const auto consider = [&](const GazetteerEntry& e, std::size_t pos) {
    const std::size_t len = e.name.size();
    if (!best || len > best->length || (len == best->length && pos < best->position)) {
      best = PlaceMatch{e.state_code, pos, len, e.kind};
    }
  };

  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.kind == PlaceKind::Abbrev) {
      for (auto pos = text.find(e.name); pos != std::string_view::npos; pos = text.find(e.name, pos + 1)) {
        if (!on_word_boundary(text, pos, 2)) continue;
        if (strict_codes && is_ambiguous_abbrev(e.name) && !after_capitalised_word(text, pos)) continue;
        consider(e, pos);
        break;
      }
    } else {
      const auto& name = lowered_names_[k];
      for (auto pos = lower_text.find(name); pos != std::string::npos; pos = lower_text.find(name, pos + 1)) {
        if (!on_word_boundary(lower_text, pos, name.size())) continue;
        consider(e, pos);
        break;
      }
    }
  }
  return best;
}

std::optional<PlaceMatch> Gazetteer::find_in_text(std::string_view text) const { return find(text, true); }

std::optional<PlaceMatch> Gazetteer::find_in_metadata(std::string_view metadata) const {
  return find(metadata, false);
}

std::string_view to_string(LocationSource s) noexcept {
  switch (s) {
    case LocationSource::Metadata: return "metadata";
    case LocationSource::TextualContent: return "text";
    case LocationSource::None: return "none";
  }
  return "none";
}

std::string_view to_string(SourceFilter f) noexcept {
  switch (f) {
    case SourceFilter::Metadata: return "metadata";
    case SourceFilter::TextualContent: return "text";
    case SourceFilter::Both: return "both";
  }
  return "both";
}

std::optional<SourceFilter> source_filter_from_string(std::string_view s) noexcept {
  if (s == "metadata") return SourceFilter::Metadata;
  if (s == "text") return SourceFilter::TextualContent;
  if (s == "both") return SourceFilter::Both;
  return std::nullopt;
}

ResolvedLocation resolve_location(const Post& post, const Gazetteer& gazetteer) {
  if (post.location_metadata) {
    if (auto m = gazetteer.find_in_metadata(*post.location_metadata)) {
      return {std::move(m->state_code), LocationSource::Metadata};
    }
  }
  if (auto m = gazetteer.find_in_text(post.text)) return {std::move(m->state_code), LocationSource::TextualContent};
  return {};
}

std::vector<LocatedPost> locate_posts(std::span<const AnnotatedPost> posts, const Gazetteer& gazetteer) {
  std::vector<LocatedPost> out;
  out.reserve(posts.size());
  for (const auto& p : posts) {
    auto loc = resolve_location(p.post, gazetteer);
    out.push_back({p, std::move(loc.state), loc.source});
  }
  return out;
}

SpatialAggregation aggregate_state_month(std::span<const LocatedPost> located, const IndexConfig& config,
                                         SourceFilter filter, std::size_t min_group_size) {
  config.validate();
  SpatialAggregation result;

  // Every filter shares one grid: anchor and study range come from all relevant posts.
  std::vector<AnnotatedPost> relevant;
  for (const auto& lp : located) {
    if (lp.annotated.relevant) relevant.push_back(lp.annotated);
  }

  std::vector<AnnotatedPost> selected;
  std::vector<std::string> states;
  for (const auto& lp : located) {
    if (!lp.state || lp.source == LocationSource::None) {
      ++result.unlocated;
      continue;
    }
    const bool keep = filter == SourceFilter::Both ||
                      (filter == SourceFilter::Metadata && lp.source == LocationSource::Metadata) ||
                      (filter == SourceFilter::TextualContent && lp.source == LocationSource::TextualContent);
    if (!keep || !lp.annotated.relevant) {
      ++result.filtered_out;
      continue;
    }
    selected.push_back(lp.annotated);
    states.push_back(*lp.state);
  }
  if (selected.empty()) return result;

  IndexConfig cfg = config;
  cfg.window_anchor = resolve_anchor(config, relevant);
  const Date anchor = *cfg.window_anchor;
  const int width = cfg.window_days;
  const DateRange study = covering_range(relevant, anchor, width);
  const auto study_k0 = floor_div((study.start - anchor).count(), width);
  const auto study_k1 = floor_div((study.end - anchor).count(), width);

  // (state, month) -> indices into `selected`
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
  std::map<std::string, Date> month_start;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const auto w = floor_div((date_of(selected[i].post.created_at) - anchor).count(), width);
    const Date window_start = anchor + std::chrono::days{w * width};
    const auto month = format_month(window_start);
    const std::chrono::year_month_day ymd{window_start};
    month_start.emplace(month, std::chrono::sys_days{ymd.year() / ymd.month() / 1});
    groups[{states[i], month}].push_back(i);
  }

  for (const auto& [key, members] : groups) {
    const auto& [state, month] = key;
    if (members.size() < min_group_size) {
      result.suppressed.push_back({state, month, members.size()});
      continue;
    }
    const Date first_day = month_start.at(month);
    const std::chrono::year_month_day ymd{first_day};
    const Date next_month = std::chrono::sys_days{(ymd.year() / ymd.month() + std::chrono::months{1}) / 1};
    const auto k0 = std::max(study_k0, ceil_div((first_day - anchor).count(), width));
    const auto k1 = std::min(study_k1, ceil_div((next_month - anchor).count(), width));
    const DateRange range{anchor + std::chrono::days{k0 * width}, anchor + std::chrono::days{k1 * width}};

    std::vector<AnnotatedPost> group_posts;
    group_posts.reserve(members.size());
    for (auto i : members) group_posts.push_back(selected[i]);
    const auto counts = build_count_series(group_posts, cfg, range);
    const auto impact = compute_impact_series<double>(counts.series, cfg);

    StateMonthIndex row;
    row.state = state;
    row.month = month;
    row.source = filter;
    row.physical = impact.physical.mean();
    row.social = impact.social.mean();
    row.post_count = members.size();
    for (auto i : members) row.post_ids.push_back(selected[i].post.id);
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace disimpact
