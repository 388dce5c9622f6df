#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uimvdr/metrics.hpp"

namespace uimvdr::io {

// One line of space-separated key=value pairs. Keys and values may not
// contain whitespace or '='.
using Record = std::vector<std::pair<std::string, std::string>>;

// Shortest decimal that parses back to the same double.
std::string format_number(double value);
double parse_number(std::string_view text);

std::string format_record(const Record& record);
Record parse_record(std::string_view line);

const std::string* find_field(const Record& record, std::string_view key);
const std::string& field(const Record& record, std::string_view key);
double number_field(const Record& record, std::string_view key);

// "scene_id=<id> si_sdr=<dB>[ si_sdri=<dB>]"
std::string format_metric_record(const MetricReport& report);
MetricReport parse_metric_record(std::string_view line);

}  // namespace uimvdr::io
