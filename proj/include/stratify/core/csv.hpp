#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stratify::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based line number of each data row in the source file.
    std::vector<std::size_t> line_numbers;
};

// RFC 4180 reader: comma separated, double-quote escaping, CRLF tolerated.
Table read(std::istream& in);
Table read_file(const std::string& path);

std::string escape(const std::string& field);

// Shortest round-trip representation of a double.
std::string format_double(double v);

}  // namespace stratify::csv
