#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace scraloha::csv {

/// printf("%.6g"), the precision used for every floating CSV column.
std::string sig6(double value);

/// Splits one line on commas. No quoting: none of our columns need it.
std::vector<std::string> split_line(std::string_view line);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws std::out_of_range if absent.
    [[nodiscard]] std::size_t column(std::string_view name) const;
};

/// Reads a header line and data rows; blank lines are skipped.
/// Throws std::runtime_error on ragged rows.
Table read(std::istream& in);

}  // namespace scraloha::csv
