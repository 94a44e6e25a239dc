#pragma once

// Small CSV and timestamp helpers shared by the IO-facing modules.
// Timestamps are epoch seconds, UTC only.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bess {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, long line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(trim(line.substr(start)));
      break;
    }
    out.emplace_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_long(std::string_view s, long long& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

// Shortest representation that round-trips the exact double.
inline std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// ---- civil time <-> epoch seconds (proleptic Gregorian, UTC) ----

inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yc = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yc + (m <= 2));
}

// Accepts YYYY-MM-DDTHH:MM:SS with optional trailing 'Z' or '+00:00';
// a space may stand in for the 'T'. Returns false on anything else.
inline bool parse_iso8601(std::string_view s, std::int64_t& epoch) {
  s = detail::trim(s);
  if (s.size() < 19) return false;
  auto digits = [&](std::size_t pos, std::size_t n, long long& v) {
    v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      char c = s[pos + i];
      if (c < '0' || c > '9') return false;
      v = v * 10 + (c - '0');
    }
    return true;
  };
  long long Y, Mo, D, H, Mi, S;
  if (!digits(0, 4, Y) || s[4] != '-' || !digits(5, 2, Mo) || s[7] != '-' ||
      !digits(8, 2, D) || (s[10] != 'T' && s[10] != ' ') || !digits(11, 2, H) ||
      s[13] != ':' || !digits(14, 2, Mi) || s[16] != ':' || !digits(17, 2, S))
    return false;
  std::string_view rest = s.substr(19);
  if (!rest.empty() && rest != "Z" && rest != "+00:00") return false;
  if (Mo < 1 || Mo > 12 || D < 1 || D > 31 || H > 23 || Mi > 59 || S > 60)
    return false;
  epoch = days_from_civil(static_cast<int>(Y), static_cast<unsigned>(Mo),
                          static_cast<unsigned>(D)) *
              86400 +
          H * 3600 + Mi * 60 + S;
  return true;
}

inline std::string format_iso8601(std::int64_t epoch) {
  std::int64_t days = epoch / 86400;
  std::int64_t sod = epoch % 86400;
  if (sod < 0) {
    sod += 86400;
    days -= 1;
  }
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m,
                d, static_cast<long long>(sod / 3600),
                static_cast<long long>((sod % 3600) / 60),
                static_cast<long long>(sod % 60));
  return buf;
}

// Timestamp column that is either ISO-8601 or a plain hour count.
inline bool parse_time_or_hours(std::string_view s, std::int64_t& epoch) {
  if (parse_iso8601(s, epoch)) return true;
  double hours;
  if (detail::parse_double(s, hours)) {
    epoch = static_cast<std::int64_t>(hours * 3600.0);
    return true;
  }
  return false;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<long> row_lines;  // source line of each row, for error messages

  int column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable t;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = detail::split_csv_line(trimmed);
    if (t.header.empty()) {
      t.header = std::move(fields);
    } else {
      if (fields.size() != t.header.size())
        throw ParseError(path, lineno,
                         "expected " + std::to_string(t.header.size()) +
                             " fields, got " + std::to_string(fields.size()));
      t.rows.push_back(std::move(fields));
      t.row_lines.push_back(lineno);
    }
  }
  if (t.header.empty()) throw std::runtime_error(path + ": empty file");
  return t;
}

}  // namespace bess
