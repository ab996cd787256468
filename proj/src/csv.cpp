#include "mb/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

#include "mb/config.hpp"

namespace mb {

namespace {

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& origin, int line) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size())
    fail(origin, line, "bad number '" + s + "'");
  return v;
}

long long parse_ll(const std::string& s, const std::string& origin, int line) {
  const char* begin = s.c_str();
  char* end = nullptr;
  long long v = std::strtoll(begin, &end, 10);
  if (s.empty() || end != begin + s.size())
    fail(origin, line, "bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string serialize_regret_csv(std::vector<RegretRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const RegretRow& a, const RegretRow& b) {
    return std::tie(a.algorithm, a.seed, a.t) < std::tie(b.algorithm, b.seed, b.t);
  });
  std::string out = kRegretHeader;
  out += '\n';
  for (const RegretRow& r : rows) {
    out += r.algorithm;
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.t);
    out += ',';
    out += format_g12(r.cum_expected_regret);
    out += ',';
    out += format_g12(r.cum_realized_regret);
    out += ',';
    out += format_g12(r.wall_time_ms);
    out += '\n';
  }
  return out;
}

void write_regret_csv(const std::string& path, std::vector<RegretRow> rows) {
  write_text_file(path, serialize_regret_csv(std::move(rows)));
}

std::vector<RegretRow> parse_regret_csv(const std::string& text,
                                        const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<RegretRow> rows;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != kRegretHeader)
        fail(origin, lineno, std::string("header mismatch; expected '") +
                                 kRegretHeader + "'");
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f = split_fields(line);
    if (f.size() != 6) fail(origin, lineno, "expected 6 fields");
    RegretRow r;
    r.algorithm = f[0];
    long long seed = parse_ll(f[1], origin, lineno);
    if (seed < 0) fail(origin, lineno, "negative seed");
    r.seed = static_cast<std::uint64_t>(seed);
    r.t = static_cast<int>(parse_ll(f[2], origin, lineno));
    r.cum_expected_regret = parse_double(f[3], origin, lineno);
    r.cum_realized_regret = parse_double(f[4], origin, lineno);
    r.wall_time_ms = parse_double(f[5], origin, lineno);
    rows.push_back(std::move(r));
  }
  if (!saw_header) fail(origin, 1, "empty file; expected the regret header");
  return rows;
}

std::vector<RegretRow> read_regret_csv(const std::string& path) {
  return parse_regret_csv(read_text_file(path), path);
}

std::string serialize_summary_csv(std::vector<SummaryRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return std::tie(a.algorithm, a.horizon, a.t) <
           std::tie(b.algorithm, b.horizon, b.t);
  });
  std::string out = kSummaryHeader;
  out += '\n';
  for (const SummaryRow& r : rows) {
    out += r.algorithm;
    out += ',';
    out += std::to_string(r.horizon);
    out += ',';
    out += std::to_string(r.t);
    out += ',';
    out += format_g12(r.mean);
    out += ',';
    out += format_g12(r.stderr_);
    out += ',';
    out += std::to_string(r.seeds);
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(path + ": cannot open file for writing");
  out << text;
  if (!out) throw ConfigError(path + ": write failed");
}

}  // namespace mb
