/*
 * Copyright 2026 The carbonsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace carbonsim::csv {

/// Header-mandatory, comma-delimited table. No quoting support; none of the
/// formats this project reads or writes need it.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or throws ParseError naming the file context.
  [[nodiscard]] std::size_t column(std::string_view name) const;
};

Table parse(std::string_view text, const std::string& context);
Table read_file(const std::filesystem::path& path);

/// Throws ParseError unless the header equals \p expected exactly (order included).
void require_header(const Table& table, const std::vector<std::string>& expected, const std::string& context);

double to_double(const std::string& cell, const std::string& context);
long long to_int(const std::string& cell, const std::string& context);

/// Shortest text that parses back to the same double.
std::string format_double(double value);

/// Write via a sibling temp file and rename, so a failed write never leaves a
/// partial artifact behind.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace carbonsim::csv
