#include <fstream>

#include "stratify/core/csv.hpp"
#include "stratify/core/error.hpp"
#include "stratify/dataset/dataset.hpp"

namespace stratify::dataset {

void write_csv(const LabeledDataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    for (const auto& f : data.schema.features) out << csv::escape(f.name) << ',';
    out << csv::escape(data.schema.outcome.name) << '\n';
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t c = 0; c < data.X.cols(); ++c) out << csv::format_double(data.X(r, c)) << ',';
        out << data.y[r] << '\n';
    }
}

LabeledDataset read_encoded_csv(const std::string& path, const FeatureSchema& schema) {
    // Every column is numeric after encoding.
    FeatureSchema numeric = schema;
    for (auto& f : numeric.features) {
        f.source.clear();
        f.transform.reset();
        f.levels.clear();
        if (f.kind == FeatureKind::categorical) f.kind = FeatureKind::continuous;
    }
    numeric.outcome.source.clear();
    numeric.outcome.levels.clear();
    numeric.flag_columns.clear();
    RawTable raw = load_person_course(path, numeric);
    LabeledDataset out;
    out.schema = schema;
    const std::size_t p = schema.size();
    out.X = Matrix(raw.rows(), p);
    out.y.resize(raw.rows());
    for (std::size_t r = 0; r < raw.rows(); ++r) {
        for (std::size_t j = 0; j <= p; ++j) {
            const auto* v = std::get_if<double>(&raw.cells[r][j]);
            if (!v) throw InputError(path + ": missing value at line " + std::to_string(raw.line_numbers[r]));
            if (j < p) out.X(r, j) = *v;
            else out.y[r] = static_cast<int>(*v);
        }
    }
    out.validate();
    return out;
}

}  // namespace stratify::dataset
