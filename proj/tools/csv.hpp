#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace gafz::cli {

/// An empty cell, a real (17 significant digits), an integer, a string or a boolean.
using Cell = std::variant<std::monostate, double, std::int64_t, std::uint64_t, std::string, bool>;
using Row = std::vector<Cell>;

std::string format_cell(const Cell& cell);

/// Header plus rows, LF line endings. Throws std::invalid_argument when a row
/// width differs from the header, std::runtime_error on I/O failure.
void write_csv(const std::string& path, const std::vector<std::string>& header, const std::vector<Row>& rows);
std::string to_csv(const std::vector<std::string>& header, const std::vector<Row>& rows);

/// Splits CSV text (as produced by to_csv) into fields; the first row is the header.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace gafz::cli
