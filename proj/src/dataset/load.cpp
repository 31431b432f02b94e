#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "stratify/core/csv.hpp"
#include "stratify/core/error.hpp"
#include "stratify/dataset/dataset.hpp"

namespace stratify::dataset {
namespace {

bool is_missing_token(const std::string& s) {
    return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "null";
}

double parse_number(const std::string& s, std::size_t line, const std::string& column) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    if (first < last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw InputError("line " + std::to_string(line) + ": cannot parse '" + s + "' in column '" +
                         column + "' as a number");
    return v;
}

bool truthy(const std::string& s) {
    if (is_missing_token(s)) return false;
    return !(s == "0" || s == "0.0" || s == "false" || s == "FALSE" || s == "False");
}

RawCell read_cell(const FeatureDescriptor& f, const std::string& text, std::size_t line) {
    if (is_missing_token(text)) return std::monostate{};
    if (f.kind == FeatureKind::categorical || (f.kind == FeatureKind::binary && !f.levels.empty()))
        return text;
    double v = parse_number(text, line, f.column());
    if (f.transform) v = f.transform->reference - v;
    return v;
}

}  // namespace

RawTable load_person_course(std::istream& in, const FeatureSchema& schema) {
    schema.validate();
    csv::Table table = csv::read(in);
    if (table.header.empty()) throw InputError("no rows");

    auto find = [&](const std::string& name) -> std::size_t {
        for (std::size_t c = 0; c < table.header.size(); ++c)
            if (table.header[c] == name) return c;
        throw InputError("missing column '" + name + "'");
    };

    std::vector<std::size_t> cols;
    for (const auto& f : schema.features) cols.push_back(find(f.column()));
    cols.push_back(find(schema.outcome.column()));
    std::vector<std::size_t> flag_cols;
    for (const auto& name : schema.flag_columns) flag_cols.push_back(find(name));

    if (table.rows.empty()) throw InputError("no rows");

    RawTable raw;
    raw.schema = schema;
    raw.cells.resize(table.rows.size());
    raw.flagged.assign(table.rows.size(), false);
    raw.line_numbers = table.line_numbers;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& rec = table.rows[r];
        std::size_t line = table.line_numbers[r];
        auto& out = raw.cells[r];
        out.reserve(cols.size());
        for (std::size_t j = 0; j < schema.size(); ++j) out.push_back(read_cell(schema.features[j], rec[cols[j]], line));
        out.push_back(read_cell(schema.outcome, rec[cols.back()], line));
        for (std::size_t c : flag_cols)
            if (truthy(rec[c])) raw.flagged[r] = true;
    }
    return raw;
}

RawTable load_person_course(const std::string& path, const FeatureSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open data file: " + path);
    return load_person_course(in, schema);
}

}  // namespace stratify::dataset
