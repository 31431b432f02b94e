#include <algorithm>
#include <cmath>
#include <limits>

#include "stratify/core/error.hpp"
#include "stratify/dataset/dataset.hpp"

namespace stratify::dataset {
namespace {

bool text_feature(const FeatureDescriptor& f) {
    return f.kind == FeatureKind::categorical || (f.kind == FeatureKind::binary && !f.levels.empty());
}

// Value in the numeric matrix, or nullopt when the cell breaks the feature's domain.
std::optional<double> numeric_value(const FeatureDescriptor& f, const RawCell& cell) {
    if (const auto* s = std::get_if<std::string>(&cell)) {
        if (f.kind == FeatureKind::categorical) return std::numeric_limits<double>::quiet_NaN();
        auto it = std::find(f.levels.begin(), f.levels.end(), *s);
        if (it == f.levels.end()) return std::nullopt;
        return static_cast<double>(it - f.levels.begin());
    }
    const auto* v = std::get_if<double>(&cell);
    if (!v) return std::nullopt;
    switch (f.kind) {
        case FeatureKind::binary:
            if (*v != 0.0 && *v != 1.0) return std::nullopt;
            break;
        case FeatureKind::count:
            if (*v < 0.0) return std::nullopt;
            break;
        case FeatureKind::categorical:  // numeric codes are categories too
            return std::nullopt;
        case FeatureKind::continuous:
            break;
    }
    return *v;
}

}  // namespace

CleanRecords clean(const RawTable& raw) {
    const auto& schema = raw.schema;
    const std::size_t p = schema.size();
    CleanRecords out;
    out.schema = schema;
    out.text.resize(p);
    std::vector<double> row(p);

    FeatureDescriptor outcome = schema.outcome;
    outcome.kind = FeatureKind::binary;

    for (std::size_t r = 0; r < raw.rows(); ++r) {
        const auto& cells = raw.cells[r];
        bool ok = !(r < raw.flagged.size() && raw.flagged[r]) && cells.size() == p + 1;
        for (std::size_t j = 0; ok && j < p; ++j) {
            auto v = numeric_value(schema.features[j], cells[j]);
            if (!v) ok = false;
            else row[j] = *v;
        }
        std::optional<double> label;
        if (ok) label = numeric_value(outcome, cells[p]);
        if (!ok || !label) {
            ++out.dropped;
            continue;
        }
        for (std::size_t j = 0; j < p; ++j)
            if (text_feature(schema.features[j])) out.text[j].push_back(std::get<std::string>(cells[j]));
        out.numeric.append_row(row);
        out.labels.push_back(static_cast<int>(*label));
        ++out.kept;
    }
    if (out.kept == 0) throw InputError("cleaning removed every row");
    return out;
}

RawTable to_raw(const CleanRecords& records) {
    const auto& schema = records.schema;
    const std::size_t p = schema.size();
    RawTable raw;
    raw.schema = schema;
    raw.cells.resize(records.rows());
    raw.flagged.assign(records.rows(), false);
    for (std::size_t r = 0; r < records.rows(); ++r) {
        auto& cells = raw.cells[r];
        for (std::size_t j = 0; j < p; ++j) {
            if (text_feature(schema.features[j])) cells.emplace_back(records.text[j][r]);
            else cells.emplace_back(records.numeric(r, j));
        }
        if (!schema.outcome.levels.empty())
            cells.emplace_back(schema.outcome.levels[static_cast<std::size_t>(records.labels[r])]);
        else
            cells.emplace_back(static_cast<double>(records.labels[r]));
        raw.line_numbers.push_back(r + 2);
    }
    return raw;
}

}  // namespace stratify::dataset
