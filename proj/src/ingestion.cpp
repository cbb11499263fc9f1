#include "disimpact/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "disimpact/csv.hpp"
#include "disimpact/error.hpp"
#include "disimpact/time.hpp"

namespace disimpact {

using json = nlohmann::json;

namespace {

bool is_handle_char(unsigned char ch) {
  return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') ||
         ch == '_' || ch == '.';
}

const std::string& required_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::MalformedInput, std::string("missing or non-string field '") + key + "'");
  }
  return it->get_ref<const std::string&>();
}

double parse_real(std::string_view s, std::string_view what) {
  double value = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw Error(ErrorCode::MalformedCsv, std::string(what) + ": not a number: '" + std::string(s) + "'");
  }
  return value;
}

int parse_int(std::string_view s, std::string_view what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::MalformedCsv, std::string(what) + ": not an integer: '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

std::optional<DisasterTag> disaster_from_string(std::string_view s) noexcept {
  if (s == "hurricane") return DisasterTag::Hurricane;
  if (s == "wildfire") return DisasterTag::Wildfire;
  if (s == "other") return DisasterTag::Other;
  return std::nullopt;
}

std::string_view to_string(DisasterTag d) noexcept {
  switch (d) {
    case DisasterTag::Hurricane: return "hurricane";
    case DisasterTag::Wildfire: return "wildfire";
    case DisasterTag::Other: return "other";
  }
  return "other";
}

std::string scrub_handles(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '@') {
      std::size_t j = i + 1;
      while (j < text.size() && is_handle_char(static_cast<unsigned char>(text[j]))) ++j;
      if (j > i + 1) {
        out += "@user";
        i = j;
        continue;
      }
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

Post parse_post_json(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedInput, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw Error(ErrorCode::MalformedInput, "record is not a JSON object");

  Post post;
  post.id = required_string(obj, "id");
  if (post.id.empty()) throw Error(ErrorCode::MalformedInput, "empty post id");
  post.platform = platform_from_string(required_string(obj, "platform"));
  post.text = scrub_handles(required_string(obj, "text"));
  post.created_at = parse_timestamp(required_string(obj, "created_at"));

  if (const auto it = obj.find("media_refs"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::MalformedInput, "media_refs must be an array");
    for (const auto& ref : *it) {
      if (!ref.is_string()) throw Error(ErrorCode::MalformedInput, "media_refs entries must be strings");
      post.media_refs.push_back(ref.get<std::string>());
    }
  }
  if (const auto it = obj.find("location_metadata"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::MalformedInput, "location_metadata must be a string");
    post.location_metadata = it->get<std::string>();
  }
  return post;
}

std::string post_to_json(const Post& post) {
  json obj;
  obj["id"] = post.id;
  obj["platform"] = to_string(post.platform);
  obj["text"] = post.text;
  obj["media_refs"] = post.media_refs;
  obj["created_at"] = format_timestamp(post.created_at);
  obj["location_metadata"] = post.location_metadata ? json(*post.location_metadata) : json(nullptr);
  return obj.dump();
}

void write_posts(std::ostream& out, const std::vector<Post>& posts) {
  for (const auto& p : posts) out << post_to_json(p) << '\n';
}

PostLoad load_posts(const std::filesystem::path& path, DisasterTag disaster) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());

  PostLoad result;
  result.dataset.source_path = path.string();
  result.dataset.disaster_tag = disaster;
  auto& report = result.report;

  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++report.lines_read;
    try {
      Post post = parse_post_json(line);
      if (!seen.insert(post.id).second) {
        ++report.dropped_duplicate;
        continue;
      }
      result.dataset.posts.push_back(std::move(post));
    } catch (const Error& e) {
      ++report.dropped_malformed;
      report.malformed.push_back({line_no, e.what()});
    }
  }
  report.kept = result.dataset.posts.size();

  if (report.dropped_malformed * 2 > report.lines_read) {
    throw Error(ErrorCode::MalformedInput,
                path.string() + ": " + std::to_string(report.dropped_malformed) + " of " +
                    std::to_string(report.lines_read) + " lines malformed (first at line " +
                    std::to_string(report.malformed.front().line_number) +
                    ": " + report.malformed.front().message + ")");
  }
  return result;
}

GroundTruthSeries make_ground_truth(std::vector<GroundTruthEntry> rows) {
  GroundTruthSeries series;
  if (rows.empty()) return series;
  for (const auto& r : rows) {
    if (r.value < 0.0) {
      throw Error(ErrorCode::NegativeValue,
                  "ground truth value " + csv::format_real(r.value) + " at " + format_date(r.week_start) +
                      " is negative");
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.week_start < b.week_start; });
  const Date first = rows.front().week_start;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto offset = (rows[i].week_start - first).count();
    if (offset % 7 != 0) {
      throw Error(ErrorCode::MalformedCsv,
                  "week " + format_date(rows[i].week_start) + " is not on the 7-day grid starting " +
                      format_date(first));
    }
    if (i > 0 && rows[i].week_start == rows[i - 1].week_start) {
      throw Error(ErrorCode::MalformedCsv, "duplicate week " + format_date(rows[i].week_start));
    }
  }
  Date expected = first;
  for (const auto& r : rows) {
    while (expected < r.week_start) {
      series.entries.push_back({expected, 0.0});
      series.filled_weeks.push_back(expected);
      expected += std::chrono::days{7};
    }
    series.entries.push_back(r);
    expected += std::chrono::days{7};
  }
  return series;
}

GroundTruthSeries load_ground_truth(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  csv::require_header(table, {"week_start", "value"}, path.string());
  std::vector<GroundTruthEntry> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto where = path.string() + ":" + std::to_string(table.line_numbers[i]);
    Date week{};
    try {
      week = parse_date(row[0]);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedCsv, where + ": " + e.what());
    }
    rows.push_back({week, parse_real(row[1], where)});
  }
  return make_ground_truth(std::move(rows));
}

LabelJoin load_labels(const std::filesystem::path& path, const Dataset& dataset) {
  const auto table = csv::read_file(path);
  csv::require_header(table, {"post_id", "category_code"}, path.string());

  std::unordered_map<std::string_view, std::size_t> position;
  for (std::size_t i = 0; i < dataset.posts.size(); ++i) position.emplace(dataset.posts[i].id, i);

  std::vector<std::optional<ImpactCategory>> labels(dataset.posts.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto where = path.string() + ":" + std::to_string(table.line_numbers[r]);
    const auto it = position.find(row[0]);
    if (it == position.end()) {
      throw Error(ErrorCode::UnknownPostId, where + ": post id '" + row[0] + "' not in dataset");
    }
    const ImpactCategory category = category_from_code(parse_int(row[1], where));
    auto& slot = labels[it->second];
    if (slot) throw Error(ErrorCode::MalformedCsv, where + ": duplicate label for '" + row[0] + "'");
    slot = category;
  }

  LabelJoin join;
  for (std::size_t i = 0; i < dataset.posts.size(); ++i) {
    if (labels[i]) {
      join.annotated.push_back({dataset.posts[i], *labels[i], true});
    } else {
      join.unlabeled.push_back(dataset.posts[i].id);
    }
  }
  return join;
}

}  // namespace disimpact
