/* Copyright 2026 The Hemi Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef HEMI_REPORT_H_
#define HEMI_REPORT_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "hemi/experiment.h"

namespace hemi::runner {

enum class ReportFormat { kCsv, kJson };

// csv / json, case-insensitive.
ReportFormat parse_report_format(std::string_view name);
// From a path's extension; .json is JSON, anything else CSV.
ReportFormat format_for_path(const std::filesystem::path& path);

// The fixed CSV header line, without a trailing newline.
std::string_view report_header();

// Metrics use the shortest round-trip decimal form; a zero-denominator
// metric is written "0*". Seconds have two decimals. Failed cells leave the
// numeric cells empty.
std::string to_csv(const ResultTable& table);
ResultTable parse_csv(std::string_view text);

std::string to_json(const ResultTable& table);
ResultTable parse_json(std::string_view text);

// Throws ValidationError for an empty table and IoError when the file
// cannot be written.
void emit_report(const ResultTable& table, ReportFormat format,
                 const std::filesystem::path& path);
ResultTable read_report(const std::filesystem::path& path);

// Rounds the timing columns to the two decimals a report keeps.
void round_timings(ResultTable& table);

}  // namespace hemi::runner

#endif  // HEMI_REPORT_H_
