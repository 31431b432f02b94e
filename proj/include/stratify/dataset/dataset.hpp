#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "stratify/core/matrix.hpp"
#include "stratify/dataset/schema.hpp"

namespace stratify::dataset {

// A cell as read from the file: missing, numeric, or text (levels/categories).
using RawCell = std::variant<std::monostate, double, std::string>;

struct RawTable {
    FeatureSchema schema;
    // cells[r][j]: schema feature j; the outcome is stored at index size().
    std::vector<std::vector<RawCell>> cells;
    std::vector<bool> flagged;
    std::vector<std::size_t> line_numbers;

    std::size_t rows() const { return cells.size(); }
};

// Rows that survived cleaning. Categorical and text-coded binary features are
// kept as strings until encode().
struct CleanRecords {
    FeatureSchema schema;
    Matrix numeric;  // NaN in text columns
    std::vector<std::vector<std::string>> text;  // per feature; empty for numeric features
    Labels labels;
    std::size_t kept = 0;
    std::size_t dropped = 0;

    std::size_t rows() const { return labels.size(); }
};

struct LabeledDataset {
    Matrix X;
    Labels y;
    FeatureSchema schema;

    std::size_t rows() const { return y.size(); }
    LabeledDataset subset(std::span<const std::size_t> idx) const;
    // Throws InputError when shapes, labels or values break the invariants.
    void validate() const;
};

RawTable load_person_course(const std::string& path, const FeatureSchema& schema);
RawTable load_person_course(std::istream& in, const FeatureSchema& schema);

CleanRecords clean(const RawTable& raw);
// Back to the raw representation, e.g. to re-clean.
RawTable to_raw(const CleanRecords& records);

struct EncodingMaps {
    // feature name -> category -> share of rows with that category
    std::map<std::string, std::map<std::string, double>> frequency;

    nlohmann::json to_json() const;
    static EncodingMaps from_json(const nlohmann::json& j);
};

EncodingMaps fit_encoder(const CleanRecords& records);
LabeledDataset encode(const EncodingMaps& maps, const CleanRecords& records);
inline LabeledDataset encode(const CleanRecords& records) { return encode(fit_encoder(records), records); }

struct NormalizationParams {
    std::vector<double> min;
    std::vector<double> max;

    nlohmann::json to_json() const;
    static NormalizationParams from_json(const nlohmann::json& j);
};

NormalizationParams fit_normalizer(const Matrix& train);
// (x - min) / (max - min); constant features map to 0.
Matrix apply_normalizer(const NormalizationParams& params, const Matrix& X);

struct StandardizationParams {
    std::vector<double> mean;
    std::vector<double> sd;

    nlohmann::json to_json() const;
};

StandardizationParams fit_standardizer(const Matrix& X);
// (x - mean) / sd with population sd; constant features map to 0.
Matrix apply_standardizer(const StandardizationParams& params, const Matrix& X);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
};

// Per-class shuffle; each class contributes floor(ratio * n_c) rows to train
// and the remainder needed to reach round(ratio * n) goes to the classes with
// the largest fractional parts. Indices are returned sorted.
SplitIndices stratified_split(const Labels& y, double ratio, std::uint64_t seed);

// Encoded dataset as CSV (header = feature names + outcome).
void write_csv(const LabeledDataset& data, const std::string& path);
LabeledDataset read_encoded_csv(const std::string& path, const FeatureSchema& schema);

}  // namespace stratify::dataset
