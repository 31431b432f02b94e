#include "stratify/dataset/schema.hpp"

#include <fstream>
#include <set>

#include "stratify/core/error.hpp"

namespace stratify::dataset {
namespace {

FeatureKind parse_kind(const std::string& s) {
    if (s == "binary") return FeatureKind::binary;
    if (s == "count") return FeatureKind::count;
    if (s == "continuous") return FeatureKind::continuous;
    if (s == "categorical") return FeatureKind::categorical;
    throw InputError("schema: unknown feature kind '" + s + "'");
}

FeatureRole parse_role(const std::string& s) {
    if (s == "background") return FeatureRole::background;
    if (s == "behavior") return FeatureRole::behavior;
    throw InputError("schema: unknown feature role '" + s + "'");
}

FeatureDescriptor descriptor_from_json(const nlohmann::json& j) {
    FeatureDescriptor d;
    if (!j.contains("name")) throw InputError("schema: feature without a name");
    d.name = j.at("name").get<std::string>();
    d.kind = parse_kind(j.value("kind", std::string("continuous")));
    d.role = parse_role(j.value("role", std::string("behavior")));
    d.source = j.value("source", std::string());
    if (j.contains("levels")) d.levels = j.at("levels").get<std::vector<std::string>>();
    if (j.contains("transform")) {
        SourceTransform t;
        t.type = j.at("transform").at("type").get<std::string>();
        t.reference = j.at("transform").value("reference", 0.0);
        if (t.type != "years_until") throw InputError("schema: unknown transform '" + t.type + "'");
        d.transform = t;
    }
    if (!d.levels.empty() && d.levels.size() != 2)
        throw InputError("schema: feature '" + d.name + "' needs exactly two levels");
    return d;
}

nlohmann::json descriptor_to_json(const FeatureDescriptor& d, bool with_role) {
    nlohmann::json j;
    j["name"] = d.name;
    j["kind"] = to_string(d.kind);
    if (with_role) j["role"] = to_string(d.role);
    if (!d.source.empty()) j["source"] = d.source;
    if (!d.levels.empty()) j["levels"] = d.levels;
    if (d.transform) j["transform"] = {{"type", d.transform->type}, {"reference", d.transform->reference}};
    return j;
}

}  // namespace

std::string to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::binary: return "binary";
        case FeatureKind::count: return "count";
        case FeatureKind::continuous: return "continuous";
        case FeatureKind::categorical: return "categorical";
    }
    return "?";
}

std::string to_string(FeatureRole r) { return r == FeatureRole::background ? "background" : "behavior"; }

std::vector<std::string> FeatureSchema::names() const {
    std::vector<std::string> out;
    for (const auto& f : features) out.push_back(f.name);
    return out;
}

std::optional<std::size_t> FeatureSchema::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i].name == name) return i;
    return std::nullopt;
}

std::vector<std::size_t> FeatureSchema::indices_with_role(FeatureRole role) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i].role == role) out.push_back(i);
    return out;
}

void FeatureSchema::validate() const {
    if (features.empty()) throw InputError("schema: no features");
    if (outcome.name.empty()) throw InputError("schema: no outcome column");
    if (outcome.kind != FeatureKind::binary) throw InputError("schema: outcome must be binary");
    std::set<std::string> seen;
    for (const auto& f : features) {
        if (!seen.insert(f.name).second) throw InputError("schema: duplicate feature '" + f.name + "'");
    }
    if (seen.count(outcome.name)) throw InputError("schema: outcome '" + outcome.name + "' is also a feature");
}

bool FeatureSchema::is_canonical_edx() const {
    return features.size() == 10 && indices_with_role(FeatureRole::background).size() == 3 &&
           indices_with_role(FeatureRole::behavior).size() == 7 && outcome.name == "certified";
}

FeatureSchema FeatureSchema::edx_canonical() {
    using K = FeatureKind;
    using R = FeatureRole;
    FeatureSchema s;
    s.features = {
        {"age", K::continuous, R::background, "", {}, std::nullopt},
        {"gender", K::binary, R::background, "", {"f", "m"}, std::nullopt},
        {"country", K::categorical, R::background, "", {}, std::nullopt},
        {"viewed", K::binary, R::behavior, "", {}, std::nullopt},
        {"explored", K::binary, R::behavior, "", {}, std::nullopt},
        {"ndays_act", K::count, R::behavior, "", {}, std::nullopt},
        {"nevents", K::count, R::behavior, "", {}, std::nullopt},
        {"nplay_video", K::count, R::behavior, "", {}, std::nullopt},
        {"nchapters", K::count, R::behavior, "", {}, std::nullopt},
        {"nforum_posts", K::count, R::behavior, "", {}, std::nullopt},
    };
    s.outcome = {"certified", K::binary, R::behavior, "", {}, std::nullopt};
    return s;
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
    FeatureSchema s;
    if (!j.contains("features") || !j.at("features").is_array())
        throw InputError("schema: 'features' array is required");
    for (const auto& f : j.at("features")) s.features.push_back(descriptor_from_json(f));
    if (!j.contains("outcome")) throw InputError("schema: 'outcome' is required");
    const auto& o = j.at("outcome");
    if (o.is_string()) {
        s.outcome.name = o.get<std::string>();
        s.outcome.kind = FeatureKind::binary;
    } else {
        s.outcome = descriptor_from_json(o);
        s.outcome.kind = FeatureKind::binary;
    }
    if (j.contains("flag_columns")) s.flag_columns = j.at("flag_columns").get<std::vector<std::string>>();
    s.validate();
    return s;
}

FeatureSchema FeatureSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open schema: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("schema " + path + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json FeatureSchema::to_json() const {
    nlohmann::json j;
    j["features"] = nlohmann::json::array();
    for (const auto& f : features) j["features"].push_back(descriptor_to_json(f, true));
    j["outcome"] = descriptor_to_json(outcome, false);
    if (!flag_columns.empty()) j["flag_columns"] = flag_columns;
    return j;
}

}  // namespace stratify::dataset
