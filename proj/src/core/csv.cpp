#include "stratify/core/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "stratify/core/error.hpp"

namespace stratify::csv {
namespace {

// Splits one logical record; a quoted field may span physical lines, in
// which case more input is pulled from the stream.
bool read_record(std::istream& in, std::vector<std::string>& out, std::size_t& line_no) {
    out.clear();
    std::string line;
    if (!std::getline(in, line)) return false;
    ++line_no;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    for (;;) {
        if (i >= line.size()) {
            if (quoted) {
                std::string more;
                if (!std::getline(in, more))
                    throw InputError("unterminated quoted field at line " + std::to_string(line_no));
                ++line_no;
                field.push_back('\n');
                line = std::move(more);
                i = 0;
                continue;
            }
            break;
        }
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c == '\r' && i + 1 == line.size()) {
            // CRLF
        } else {
            field.push_back(c);
        }
        ++i;
    }
    out.push_back(std::move(field));
    return true;
}

}  // namespace

Table read(std::istream& in) {
    Table t;
    std::size_t line_no = 0;
    if (!read_record(in, t.header, line_no)) return t;
    // Strip a UTF-8 byte order mark from the first header cell.
    if (!t.header.empty() && t.header[0].rfind("\xEF\xBB\xBF", 0) == 0) t.header[0].erase(0, 3);
    std::vector<std::string> rec;
    while (true) {
        std::size_t start = line_no + 1;
        if (!read_record(in, rec, line_no)) break;
        if (rec.size() == 1 && rec[0].empty()) continue;  // blank line
        if (rec.size() != t.header.size())
            throw InputError("line " + std::to_string(start) + ": expected " +
                             std::to_string(t.header.size()) + " fields, got " +
                             std::to_string(rec.size()));
        t.rows.push_back(rec);
        t.line_numbers.push_back(start);
    }
    return t;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    return read(in);
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace stratify::csv
