#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace disimpact {

/// Number of impact categories including OTHER.
inline constexpr int kCategoryCount = 11;

enum class Domain : std::uint8_t { Physical, Social, None };

/// The ten physi-social impact categories plus OTHER. Underlying values are
/// the 1-based codes used by the classification prompt.
enum class ImpactCategory : std::uint8_t {
  CINJ = 1,
  EVAC = 2,
  INFR = 3,
  ENVD = 4,
  RSRC = 5,
  PUBH = 6,
  EMOT = 7,
  BIAS = 8,
  ASST = 9,
  SECO = 10,
  OTHER = 11,
};

inline constexpr std::array<ImpactCategory, kCategoryCount> kAllCategories = {
    ImpactCategory::CINJ, ImpactCategory::EVAC, ImpactCategory::INFR, ImpactCategory::ENVD,
    ImpactCategory::RSRC, ImpactCategory::PUBH, ImpactCategory::EMOT, ImpactCategory::BIAS,
    ImpactCategory::ASST, ImpactCategory::SECO, ImpactCategory::OTHER};

constexpr int code(ImpactCategory c) noexcept { return static_cast<int>(c); }

/// Zero-based column index used by count and index matrices.
constexpr int column(ImpactCategory c) noexcept { return static_cast<int>(c) - 1; }

/// Throws Error(OutOfRange) for codes outside 1..11.
ImpactCategory category_from_code(int code);

constexpr Domain domain_of(ImpactCategory c) noexcept {
  const int k = code(c);
  if (k <= 5) return Domain::Physical;
  if (k <= 10) return Domain::Social;
  return Domain::None;
}

std::string_view short_name(ImpactCategory c) noexcept;
std::string_view display_name(ImpactCategory c) noexcept;
std::optional<ImpactCategory> category_from_short_name(std::string_view name) noexcept;

std::string_view to_string(Domain d) noexcept;

enum class Platform : std::uint8_t { Reddit, TikTok, YouTube, Other };

/// Case-insensitive; unrecognised names map to Platform::Other.
Platform platform_from_string(std::string_view s) noexcept;
std::string_view to_string(Platform p) noexcept;

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

struct Post {
  std::string id;
  Platform platform{Platform::Other};
  std::string text;
  std::vector<std::string> media_refs;
  Timestamp created_at{};
  std::optional<std::string> location_metadata;

  bool operator==(const Post&) const = default;
};

struct AnnotatedPost {
  Post post;
  ImpactCategory category{ImpactCategory::OTHER};
  bool relevant{true};

  bool operator==(const AnnotatedPost&) const = default;
};

struct TimeWindow {
  std::int64_t index{0};
  Date start{};
  int length_days{7};

  Date end() const { return start + std::chrono::days{length_days}; }
};

enum class QuantileMethod : std::uint8_t {
  Linear,   // type 7: h = (n - 1) p
  Hazen,    // type 5: h = n p - 1/2
  Weibull,  // type 6: h = (n + 1) p - 1
};

enum class CompositeOperator : std::uint8_t { Sum, Mean };

std::optional<QuantileMethod> quantile_method_from_string(std::string_view s) noexcept;
std::string_view to_string(QuantileMethod m) noexcept;
std::optional<CompositeOperator> composite_operator_from_string(std::string_view s) noexcept;
std::string_view to_string(CompositeOperator op) noexcept;

struct IndexConfig {
  double alpha{0.5};
  int category_count{kCategoryCount};
  int window_days{7};
  /// When unset, derived as the Monday on or before the earliest post.
  std::optional<Date> window_anchor;
  QuantileMethod quantile_method{QuantileMethod::Linear};
  CompositeOperator composite_operator{CompositeOperator::Sum};

  /// Throws Error(InvalidConfig) if alpha <= 0, category_count < 2 or window_days < 1.
  void validate() const;
};

}  // namespace disimpact
