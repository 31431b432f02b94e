#include <cmath>

#include "stratify/core/error.hpp"
#include "stratify/dataset/dataset.hpp"

namespace stratify::dataset {

nlohmann::json EncodingMaps::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [feature, table] : frequency) {
        nlohmann::json t = nlohmann::json::object();
        for (const auto& [category, share] : table) t[category] = share;
        j[feature] = t;
    }
    return j;
}

EncodingMaps EncodingMaps::from_json(const nlohmann::json& j) {
    EncodingMaps m;
    for (auto it = j.begin(); it != j.end(); ++it)
        for (auto c = it.value().begin(); c != it.value().end(); ++c)
            m.frequency[it.key()][c.key()] = c.value().get<double>();
    return m;
}

EncodingMaps fit_encoder(const CleanRecords& records) {
    EncodingMaps maps;
    const auto n = static_cast<double>(records.rows());
    for (std::size_t j = 0; j < records.schema.size(); ++j) {
        const auto& f = records.schema.features[j];
        if (f.kind != FeatureKind::categorical) continue;
        std::map<std::string, std::size_t> counts;
        for (const auto& v : records.text[j]) ++counts[v];
        auto& table = maps.frequency[f.name];
        for (const auto& [category, count] : counts) table[category] = static_cast<double>(count) / n;
    }
    return maps;
}

LabeledDataset encode(const EncodingMaps& maps, const CleanRecords& records) {
    LabeledDataset out;
    out.schema = records.schema;
    out.y = records.labels;
    out.X = records.numeric;
    for (std::size_t j = 0; j < records.schema.size(); ++j) {
        const auto& f = records.schema.features[j];
        if (f.kind != FeatureKind::categorical) continue;
        auto table = maps.frequency.find(f.name);
        if (table == maps.frequency.end()) throw InputError("no encoding fitted for feature '" + f.name + "'");
        for (std::size_t r = 0; r < records.rows(); ++r) {
            auto hit = table->second.find(records.text[j][r]);
            if (hit == table->second.end())
                throw InputError("category '" + records.text[j][r] + "' of feature '" + f.name +
                                 "' was not seen when the encoder was fitted");
            out.X(r, j) = hit->second;
        }
    }
    return out;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> idx) const {
    LabeledDataset out;
    out.schema = schema;
    out.X = X.select_rows(idx);
    out.y.reserve(idx.size());
    for (auto i : idx) out.y.push_back(y[i]);
    return out;
}

void LabeledDataset::validate() const {
    if (X.rows() != y.size()) throw InputError("label count does not match row count");
    if (X.cols() != schema.size()) throw InputError("column count does not match schema");
    for (double v : X.values())
        if (!std::isfinite(v)) throw InputError("dataset contains a missing or non-finite value");
    for (int v : y)
        if (v != 0 && v != 1) throw InputError("labels must be 0 or 1");
}

}  // namespace stratify::dataset
