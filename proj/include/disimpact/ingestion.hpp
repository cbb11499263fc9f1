#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "disimpact/core.hpp"

namespace disimpact {

enum class DisasterTag : std::uint8_t { Hurricane, Wildfire, Other };

std::optional<DisasterTag> disaster_from_string(std::string_view s) noexcept;
std::string_view to_string(DisasterTag d) noexcept;

struct Dataset {
  std::vector<Post> posts;
  std::string source_path;
  DisasterTag disaster_tag{DisasterTag::Other};
};

struct MalformedLine {
  std::size_t line_number{0};
  std::string message;
};

struct LoadReport {
  std::size_t lines_read{0};
  std::size_t kept{0};
  std::size_t dropped_duplicate{0};
  std::size_t dropped_malformed{0};
  std::vector<MalformedLine> malformed;
};

struct PostLoad {
  Dataset dataset;
  LoadReport report;
};

/// Replaces every "@" followed by one or more of [A-Za-z0-9_.] (taken
/// maximally) with "@user". Everything else is left byte-identical.
std::string scrub_handles(std::string_view text);

/// Parses one posts.jsonl record. Text is scrubbed. Throws Error(MalformedInput).
Post parse_post_json(std::string_view line);

/// Serialises a post as one posts.jsonl record (no trailing newline).
std::string post_to_json(const Post& post);

/// Loads a JSONL post file. Duplicate ids keep the first occurrence.
/// Malformed lines are collected in the report; the load aborts with
/// Error(MalformedInput) only when more than half of the non-blank lines are
/// malformed. Throws Error(FileNotFound) if the file cannot be opened.
PostLoad load_posts(const std::filesystem::path& path,
                    DisasterTag disaster = DisasterTag::Other);

void write_posts(std::ostream& out, const std::vector<Post>& posts);

struct GroundTruthEntry {
  Date week_start{};
  double value{0.0};
};

/// Weekly external signal on a contiguous 7-day grid.
struct GroundTruthSeries {
  std::vector<GroundTruthEntry> entries;
  /// Weeks absent from the source file and zero-filled by the loader.
  std::vector<Date> filled_weeks;

  std::size_t size() const noexcept { return entries.size(); }
  Date start() const { return entries.front().week_start; }
};

/// Builds a contiguous series from arbitrary-order (week, value) rows,
/// zero-filling gaps. Throws Error(NegativeValue) for values < 0 and
/// Error(MalformedCsv) for duplicate or off-grid weeks.
GroundTruthSeries make_ground_truth(std::vector<GroundTruthEntry> rows);

/// Reads groundtruth.csv (header week_start,value).
GroundTruthSeries load_ground_truth(const std::filesystem::path& path);

struct LabelJoin {
  /// Labelled posts in dataset order.
  std::vector<AnnotatedPost> annotated;
  /// Dataset posts with no label row, in dataset order.
  std::vector<std::string> unlabeled;
};

/// Joins labels.csv (header post_id,category_code) onto `dataset`.
/// Throws Error(UnknownPostId) for ids missing from the dataset,
/// Error(OutOfRange) for codes outside 1..11 and Error(MalformedCsv) for
/// duplicate or unparsable rows.
LabelJoin load_labels(const std::filesystem::path& path, const Dataset& dataset);

}  // namespace disimpact
