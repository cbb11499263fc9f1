#pragma once

#include <string>
#include <string_view>

#include "disimpact/core.hpp"

namespace disimpact {

/// Parses an RFC 3339 timestamp ("2024-09-02T13:45:00Z", "...+02:00",
/// optional fractional seconds) and returns the UTC instant truncated to
/// whole seconds. Throws Error(MalformedInput).
Timestamp parse_timestamp(std::string_view s);

/// Parses YYYY-MM-DD. Throws Error(MalformedInput).
Date parse_date(std::string_view s);

std::string format_date(Date d);
std::string format_timestamp(Timestamp t);

/// "YYYY-MM" of the given date.
std::string format_month(Date d);

Date date_of(Timestamp t);

/// Monday on or before `d`.
Date monday_on_or_before(Date d);

}  // namespace disimpact
