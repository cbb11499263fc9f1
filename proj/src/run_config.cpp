#include "disimpact/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "disimpact/error.hpp"
#include "disimpact/time.hpp"

namespace disimpact {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::InvalidConfig, "config " + std::string(key) + ": '" + std::string(value) + "' is not a number");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string s(value);
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidConfig, "config " + std::string(key) + ": '" + std::string(value) + "' is not a number");
}

std::string real_text(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void RunConfig::validate() const {
  index.validate();
  if (max_lag < 0) throw Error(ErrorCode::InvalidConfig, "config max_lag must be >= 0");
  if (min_group_size < 1) throw Error(ErrorCode::InvalidConfig, "config min_group_size must be >= 1");
}

void RunConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "alpha") {
    index.alpha = parse_double(key, value);
  } else if (key == "category_count") {
    index.category_count = parse_number<int>(key, value);
  } else if (key == "window_days") {
    index.window_days = parse_number<int>(key, value);
  } else if (key == "window_anchor") {
    if (value.empty() || value == "auto") {
      index.window_anchor.reset();
    } else {
      try {
        index.window_anchor = parse_date(value);
      } catch (const Error&) {
        throw Error(ErrorCode::InvalidConfig, "config window_anchor: '" + std::string(value) + "' is not YYYY-MM-DD");
      }
    }
  } else if (key == "max_lag") {
    max_lag = parse_number<int>(key, value);
  } else if (key == "quantile_method") {
    const auto m = quantile_method_from_string(value);
    if (!m) throw Error(ErrorCode::InvalidConfig, "config quantile_method: unknown '" + std::string(value) + "'");
    index.quantile_method = *m;
  } else if (key == "composite_operator") {
    const auto op = composite_operator_from_string(value);
    if (!op) throw Error(ErrorCode::InvalidConfig, "config composite_operator: unknown '" + std::string(value) + "'");
    index.composite_operator = *op;
  } else if (key == "min_group_size") {
    min_group_size = parse_number<std::size_t>(key, value);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown config key '" + std::string(key) + "'");
  }
}

std::map<std::string, std::string> RunConfig::snapshot() const {
  return {
      {"alpha", real_text(index.alpha)},
      {"category_count", std::to_string(index.category_count)},
      {"window_days", std::to_string(index.window_days)},
      {"window_anchor", index.window_anchor ? format_date(*index.window_anchor) : "auto"},
      {"max_lag", std::to_string(max_lag)},
      {"quantile_method", std::string(to_string(index.quantile_method))},
      {"composite_operator", std::string(to_string(index.composite_operator))},
      {"min_group_size", std::to_string(min_group_size)},
  };
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(line_no) + " has no '='");
    }
    out[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig config;
  for (const auto& [key, value] : parse_key_values(text.str())) config.set(key, value);
  return config;
}

}  // namespace disimpact
