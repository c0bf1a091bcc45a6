#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ipts::io {

/// Writes through a temporary sibling file and renames it into place, so
/// readers never observe a partially written output.
void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

std::string read_file(const std::filesystem::path& path);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(const std::string& value);

std::vector<std::string> parse_csv_line(const std::string& line);

/// Fixed six-decimal rendering used by every CSV writer; negative zero is
/// printed as 0.000000.
std::string format_real(double value);

}  // namespace ipts::io
