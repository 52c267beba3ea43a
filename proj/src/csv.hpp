#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace scanpath::csv {

// Splits one CSV record. Supports double-quoted fields with "" escapes;
// records never span lines in the formats used here.
std::vector<std::string> split_line(std::string_view line, std::size_t line_no);

std::string quote(std::string_view field);

// Reads the next non-empty line, stripping a trailing '\r'.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no);

void expect_header(std::istream& in, std::size_t& line_no, const std::vector<std::string>& columns,
                   const std::string& file_label);

int parse_int(const std::string& s, std::size_t line_no, const char* column);
double parse_double(const std::string& s, std::size_t line_no, const char* column);

}  // namespace scanpath::csv
