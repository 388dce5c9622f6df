#include "uimvdr/io/records.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "uimvdr/error.hpp"

namespace uimvdr::io {

namespace {

bool valid_token(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '=') return false;
  }
  return true;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  require(res.ec == std::errc() && res.ptr == text.data() + text.size(),
          ErrorKind::kFormat, "not a number: '" + std::string(text) + "'");
  return v;
}

std::string format_record(const Record& record) {
  std::string line;
  for (const auto& [key, value] : record) {
    require(valid_token(key) && valid_token(value), ErrorKind::kInvalidArgument,
            "record tokens may not be empty or contain whitespace or '=': " +
                key + "=" + value);
    if (!line.empty()) line += ' ';
    line += key;
    line += '=';
    line += value;
  }
  return line;
}

Record parse_record(std::string_view line) {
  Record record;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    const std::string_view token = line.substr(i, j - i);
    const std::size_t eq = token.find('=');
    require(eq != std::string_view::npos && eq > 0 && eq + 1 < token.size(),
            ErrorKind::kFormat, "malformed record token '" + std::string(token) + "'");
    record.emplace_back(std::string(token.substr(0, eq)),
                        std::string(token.substr(eq + 1)));
    i = j;
  }
  return record;
}

const std::string* find_field(const Record& record, std::string_view key) {
  for (const auto& [k, v] : record) {
    if (k == key) return &v;
  }
  return nullptr;
}

const std::string& field(const Record& record, std::string_view key) {
  const std::string* v = find_field(record, key);
  require(v != nullptr, ErrorKind::kFormat,
          "record is missing field '" + std::string(key) + "'");
  return *v;
}

double number_field(const Record& record, std::string_view key) {
  return parse_number(field(record, key));
}

std::string format_metric_record(const MetricReport& report) {
  Record r{{"scene_id", report.scene_id.empty() ? "-" : report.scene_id},
           {"si_sdr", format_number(report.si_sdr)}};
  if (report.si_sdri) r.emplace_back("si_sdri", format_number(*report.si_sdri));
  return format_record(r);
}

MetricReport parse_metric_record(std::string_view line) {
  const Record r = parse_record(line);
  MetricReport report;
  report.scene_id = field(r, "scene_id");
  report.si_sdr = number_field(r, "si_sdr");
  if (find_field(r, "si_sdri")) report.si_sdri = number_field(r, "si_sdri");
  return report;
}

}  // namespace uimvdr::io
