#include "disimpact/core.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "disimpact/error.hpp"

namespace disimpact {

namespace {

struct CategoryInfo {
  std::string_view short_name;
  std::string_view display_name;
};

constexpr std::array<CategoryInfo, kCategoryCount> kCategoryInfo = {{
    {"CINJ", "Casualties & Injuries"},
    {"EVAC", "Evacuations & Displacement"},
    {"INFR", "Infrastructure & Utility Damage"},
    {"ENVD", "Environmental Damage"},
    {"RSRC", "Resource Shortages"},
    {"PUBH", "Public Health"},
    {"EMOT", "Emotional and Psychological Distress"},
    {"BIAS", "Bias Narratives"},
    {"ASST", "Assistance & Recovery"},
    {"SECO", "Socioeconomic Disruption"},
    {"OTHER", "Other / Not Relevant"},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::UnknownPostId: return "UnknownPostId";
    case ErrorCode::BeforeAnchor: return "BeforeAnchor";
    case ErrorCode::MisalignedRange: return "MisalignedRange";
    case ErrorCode::InvalidCounts: return "InvalidCounts";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::DegenerateExpected: return "DegenerateExpected";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EvenRaterCount: return "EvenRaterCount";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::MisalignedGrids: return "MisalignedGrids";
    case ErrorCode::AllLagsUndefined: return "AllLagsUndefined";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
  }
  return "Unknown";
}

ImpactCategory category_from_code(int code) {
  if (code < 1 || code > kCategoryCount) {
    throw Error(ErrorCode::OutOfRange,
                "impact category code " + std::to_string(code) + " outside 1.." +
                    std::to_string(kCategoryCount));
  }
  return static_cast<ImpactCategory>(code);
}

std::string_view short_name(ImpactCategory c) noexcept {
  return kCategoryInfo[static_cast<std::size_t>(column(c))].short_name;
}

std::string_view display_name(ImpactCategory c) noexcept {
  return kCategoryInfo[static_cast<std::size_t>(column(c))].display_name;
}

std::optional<ImpactCategory> category_from_short_name(std::string_view name) noexcept {
  for (auto c : kAllCategories) {
    if (short_name(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Domain d) noexcept {
  switch (d) {
    case Domain::Physical: return "physical";
    case Domain::Social: return "social";
    case Domain::None: return "none";
  }
  return "none";
}

Platform platform_from_string(std::string_view s) noexcept {
  const auto l = lower(s);
  if (l == "reddit") return Platform::Reddit;
  if (l == "tiktok") return Platform::TikTok;
  if (l == "youtube") return Platform::YouTube;
  return Platform::Other;
}

std::string_view to_string(Platform p) noexcept {
  switch (p) {
    case Platform::Reddit: return "reddit";
    case Platform::TikTok: return "tiktok";
    case Platform::YouTube: return "youtube";
    case Platform::Other: return "other";
  }
  return "other";
}

std::optional<QuantileMethod> quantile_method_from_string(std::string_view s) noexcept {
  const auto l = lower(s);
  if (l == "linear" || l == "type7") return QuantileMethod::Linear;
  if (l == "hazen" || l == "type5") return QuantileMethod::Hazen;
  if (l == "weibull" || l == "type6") return QuantileMethod::Weibull;
  return std::nullopt;
}

std::string_view to_string(QuantileMethod m) noexcept {
  switch (m) {
    case QuantileMethod::Linear: return "linear";
    case QuantileMethod::Hazen: return "hazen";
    case QuantileMethod::Weibull: return "weibull";
  }
  return "linear";
}

std::optional<CompositeOperator> composite_operator_from_string(std::string_view s) noexcept {
  const auto l = lower(s);
  if (l == "sum") return CompositeOperator::Sum;
  if (l == "mean") return CompositeOperator::Mean;
  return std::nullopt;
}

std::string_view to_string(CompositeOperator op) noexcept {
  return op == CompositeOperator::Sum ? "sum" : "mean";
}

void IndexConfig::validate() const {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidConfig, "alpha must be > 0");
  if (category_count < 2) throw Error(ErrorCode::InvalidConfig, "category_count must be >= 2");
  if (window_days < 1) throw Error(ErrorCode::InvalidConfig, "window_days must be >= 1");
}

}  // namespace disimpact
