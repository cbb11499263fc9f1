#include "disimpact/time.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "disimpact/error.hpp"

namespace disimpact {

namespace {

using namespace std::chrono;

[[noreturn]] void bad(std::string_view what, std::string_view s) {
  throw Error(ErrorCode::MalformedInput, std::string(what) + ": '" + std::string(s) + "'");
}

int digits(std::string_view s, std::size_t pos, std::size_t n, std::string_view whole) {
  if (pos + n > s.size()) bad("truncated date/time", whole);
  int value = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) bad("expected digit", whole);
    value = value * 10 + (s[i] - '0');
  }
  return value;
}

Date checked_date(int y, int m, int d, std::string_view whole) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) bad("invalid calendar date", whole);
  return sys_days{ymd};
}

}  // namespace

Date parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') bad("expected YYYY-MM-DD", s);
  return checked_date(digits(s, 0, 4, s), digits(s, 5, 2, s), digits(s, 8, 2, s), s);
}

Timestamp parse_timestamp(std::string_view s) {
  if (s.size() < 20 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':') {
    bad("expected RFC 3339 timestamp", s);
  }
  const Date date = checked_date(digits(s, 0, 4, s), digits(s, 5, 2, s), digits(s, 8, 2, s), s);
  const int hh = digits(s, 11, 2, s);
  const int mm = digits(s, 14, 2, s);
  const int ss = digits(s, 17, 2, s);
  if (hh > 23 || mm > 59 || ss > 60) bad("time of day out of range", s);

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) bad("empty fractional seconds", s);
  }
  if (pos >= s.size()) bad("missing UTC offset", s);

  seconds offset{0};
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '+' ? 1 : -1;
    if (pos + 6 != s.size() || s[pos + 3] != ':') bad("malformed UTC offset", s);
    const int oh = digits(s, pos + 1, 2, s);
    const int om = digits(s, pos + 4, 2, s);
    if (oh > 23 || om > 59) bad("UTC offset out of range", s);
    offset = seconds{sign * (oh * 3600 + om * 60)};
    pos += 6;
  } else {
    bad("malformed UTC offset", s);
  }
  if (pos != s.size()) bad("trailing characters", s);

  return Timestamp{date} + hours{hh} + minutes{mm} + seconds{ss} - offset;
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_timestamp(Timestamp t) {
  const Date d = floor<days>(t);
  const hh_mm_ss hms{t - d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()));
  return format_date(d) + buf;
}

std::string format_month(Date d) { return format_date(d).substr(0, 7); }

Date date_of(Timestamp t) { return floor<days>(t); }

Date monday_on_or_before(Date d) { return d - (weekday{d} - Monday); }

}  // namespace disimpact
