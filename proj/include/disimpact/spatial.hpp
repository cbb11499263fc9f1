#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "disimpact/core.hpp"

namespace disimpact {

enum class PlaceKind : std::uint8_t { State, Abbrev, City };

struct GazetteerEntry {
  std::string name;
  std::string state_code;
  PlaceKind kind{PlaceKind::State};
};

struct PlaceMatch {
  std::string state_code;
  std::size_t position{0};
  std::size_t length{0};
  PlaceKind kind{PlaceKind::State};
};

/// Two-letter codes that double as common English words or abbreviations.
/// In free text they count only when uppercase and written right after a
/// capitalised word, optionally with a comma between ("Portland, OR").
bool is_ambiguous_abbrev(std::string_view code) noexcept;

/// Place-name index mapping U.S. state names, postal codes and major cities
/// to state codes.
class Gazetteer {
 public:
  explicit Gazetteer(std::vector<GazetteerEntry> entries);

  /// Reads a CSV with header name,state_code,kind (kind: state|abbrev|city).
  static Gazetteer load(const std::filesystem::path& path);

  /// Longest match anywhere in `text`; earliest position breaks ties.
  /// Names match case-insensitively on word boundaries, codes only in
  /// uppercase, ambiguous codes only in the capitalised-word context.
  std::optional<PlaceMatch> find_in_text(std::string_view text) const;

  /// Same as find_in_text but every uppercase code counts, since metadata
  /// fields are structured location strings.
  std::optional<PlaceMatch> find_in_metadata(std::string_view metadata) const;

  const std::vector<GazetteerEntry>& entries() const noexcept { return entries_; }

 private:
  std::optional<PlaceMatch> find(std::string_view text, bool strict_codes) const;

  std::vector<GazetteerEntry> entries_;
  std::vector<std::string> lowered_names_;
};

enum class LocationSource : std::uint8_t { Metadata, TextualContent, None };
enum class SourceFilter : std::uint8_t { Metadata, TextualContent, Both };

std::string_view to_string(LocationSource s) noexcept;
std::string_view to_string(SourceFilter f) noexcept;
std::optional<SourceFilter> source_filter_from_string(std::string_view s) noexcept;

struct ResolvedLocation {
  std::optional<std::string> state;
  LocationSource source{LocationSource::None};
};

/// Metadata first; text only when the metadata is absent or unresolvable.
ResolvedLocation resolve_location(const Post& post, const Gazetteer& gazetteer);

struct LocatedPost {
  AnnotatedPost annotated;
  std::optional<std::string> state;
  LocationSource source{LocationSource::None};
};

std::vector<LocatedPost> locate_posts(std::span<const AnnotatedPost> posts, const Gazetteer& gazetteer);

struct StateMonthIndex {
  std::string state;
  /// "YYYY-MM"
  std::string month;
  SourceFilter source{SourceFilter::Both};
  double physical{0.0};
  double social{0.0};
  std::size_t post_count{0};
  /// Ids of the posts behind this row, in input order.
  std::vector<std::string> post_ids;
};

struct SuppressedGroup {
  std::string state;
  std::string month;
  std::size_t post_count{0};
};

struct SpatialAggregation {
  std::vector<StateMonthIndex> rows;
  std::vector<SuppressedGroup> suppressed;
  std::size_t unlocated{0};
  std::size_t filtered_out{0};
};

/// Groups located posts by (state, month of their window start), runs the
/// weekly impact pipeline on each group over the windows starting in that
/// month, and averages the weekly domain composites. Windows are limited to
/// the study range covering all relevant posts, whatever the filter. Rows are ordered by
/// state, then month. Groups with fewer than `min_group_size` posts are
/// suppressed and reported.
SpatialAggregation aggregate_state_month(std::span<const LocatedPost> located, const IndexConfig& config,
                                         SourceFilter filter, std::size_t min_group_size = 1);

}  // namespace disimpact
