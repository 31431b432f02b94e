#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace stratify::dataset {

enum class FeatureKind { binary, count, continuous, categorical };
enum class FeatureRole { background, behavior };

// Optional derivation of a feature from a differently named source column.
// `years_until`: value = reference - source (age from year of birth).
struct SourceTransform {
    std::string type;
    double reference = 0.0;
};

struct FeatureDescriptor {
    std::string name;
    FeatureKind kind = FeatureKind::continuous;
    FeatureRole role = FeatureRole::behavior;
    // Column to read from; defaults to `name`.
    std::string source;
    // For binary features stored as text: levels[0] -> 0, levels[1] -> 1.
    std::vector<std::string> levels;
    std::optional<SourceTransform> transform;

    const std::string& column() const { return source.empty() ? name : source; }
};

struct FeatureSchema {
    std::vector<FeatureDescriptor> features;
    FeatureDescriptor outcome;
    // A truthy value in any of these columns marks the row as inconsistent.
    std::vector<std::string> flag_columns;

    std::size_t size() const { return features.size(); }
    std::vector<std::string> names() const;
    std::optional<std::size_t> index_of(const std::string& name) const;
    std::vector<std::size_t> indices_with_role(FeatureRole role) const;

    // Throws InputError on duplicate names or an outcome clash.
    void validate() const;
    // Three background and seven behavior features, outcome `certified`.
    bool is_canonical_edx() const;

    // The eleven person-course variables under their canonical names.
    static FeatureSchema edx_canonical();

    static FeatureSchema from_json(const nlohmann::json& j);
    static FeatureSchema load(const std::string& path);
    nlohmann::json to_json() const;
};

std::string to_string(FeatureKind k);
std::string to_string(FeatureRole r);

}  // namespace stratify::dataset
