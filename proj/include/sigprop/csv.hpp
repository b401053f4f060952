#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sigprop::csv {

struct Table {
    std::vector<std::string> header;       // empty when the file had none
    std::vector<std::vector<double>> rows;
};

/// Parses a comma-separated numeric file. A single leading header row is
/// detected by a non-numeric first token. Ragged rows or non-numeric cells
/// raise std::runtime_error with 1-based row/column coordinates.
Table read_numeric(const std::string& path);

/// Writes rows with 17 significant digits (exact double round trip).
void write_numeric(const std::string& path,
                   const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

/// Formats one double the way write_numeric does.
std::string format_value(double x);

}  // namespace sigprop::csv
