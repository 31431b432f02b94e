#include "stratify/synth/cohort.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "stratify/core/csv.hpp"
#include "stratify/core/error.hpp"
#include "stratify/core/parallel.hpp"
#include "stratify/core/random.hpp"

namespace stratify::synth {
namespace {

using dataset::FeatureKind;

constexpr std::size_t kBlock = 4096;

std::string distribution_name(Distribution d) {
    switch (d) {
        case Distribution::normal: return "normal";
        case Distribution::negative_binomial: return "negative_binomial";
        case Distribution::bernoulli: return "bernoulli";
        case Distribution::categorical: return "categorical";
    }
    return "?";
}

Distribution parse_distribution(const std::string& s) {
    for (auto d : {Distribution::normal, Distribution::negative_binomial, Distribution::bernoulli, Distribution::categorical})
        if (distribution_name(d) == s) return d;
    throw InputError("cohort spec: unknown distribution '" + s + "'");
}

// Numeric value, or index into `levels` for text features.
double draw(const FeatureModel& f, Rng& rng) {
    switch (f.distribution) {
        case Distribution::normal:
            return f.dispersion > 0 ? f.mean + f.dispersion * std::normal_distribution<double>(0.0, 1.0)(rng) : f.mean;
        case Distribution::negative_binomial: {
            if (f.mean <= 0) return 0.0;
            if (f.dispersion <= 0) return std::round(f.mean);
            double r = 1.0 / f.dispersion;
            double lambda = std::gamma_distribution<double>(r, f.mean / r)(rng);
            return static_cast<double>(std::poisson_distribution<long long>(lambda)(rng));
        }
        case Distribution::bernoulli:
            return uniform01(rng) < f.mean ? 1.0 : 0.0;
        case Distribution::categorical: {
            double u = uniform01(rng), acc = 0.0;
            for (std::size_t i = 0; i < f.probabilities.size(); ++i) {
                acc += f.probabilities[i];
                if (u < acc) return static_cast<double>(i);
            }
            return static_cast<double>(f.probabilities.size() - 1);
        }
    }
    return 0.0;
}

double linear_part(const dataset::FeatureSchema& schema, const PatternSpec& p, const std::vector<double>& row) {
    double s = 0.0;
    for (const auto& [name, w] : p.outcome.weights) {
        auto j = *schema.index_of(name);
        double v = row[j];
        s += w * (schema.features[j].kind == FeatureKind::count ? std::log1p(v) : v);
    }
    return s;
}

double logistic(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

std::vector<double> draw_row(const PatternSpec& p, Rng& rng) {
    std::vector<double> row(p.features.size());
    for (std::size_t j = 0; j < p.features.size(); ++j) row[j] = draw(p.features[j], rng);
    return row;
}

}  // namespace

void CohortSpec::validate() const {
    schema.validate();
    if (patterns.empty()) throw InputError("cohort spec: no patterns");
    double total = 0.0;
    for (const auto& p : patterns) {
        if (p.weight < 0) throw InputError("cohort spec: negative pattern weight");
        total += p.weight;
        if (p.features.size() != schema.size())
            throw InputError("cohort spec: pattern '" + p.name + "' needs one model per schema feature");
        for (std::size_t j = 0; j < p.features.size(); ++j) {
            const auto& f = p.features[j];
            if (f.name != schema.features[j].name)
                throw InputError("cohort spec: feature '" + f.name + "' out of schema order");
            if (f.dispersion < 0) throw InputError("cohort spec: negative dispersion for '" + f.name + "'");
            if (f.distribution == Distribution::categorical &&
                (f.levels.empty() || f.levels.size() != f.probabilities.size()))
                throw InputError("cohort spec: categorical '" + f.name + "' needs matching levels and probabilities");
            if (f.distribution == Distribution::bernoulli && (f.mean < 0 || f.mean > 1))
                throw InputError("cohort spec: bernoulli mean outside [0, 1] for '" + f.name + "'");
        }
        for (const auto& [name, w] : p.outcome.weights)
            if (!schema.index_of(name)) throw InputError("cohort spec: outcome weight on unknown feature '" + name + "'");
        if (p.outcome.target_rate && !(*p.outcome.target_rate > 0 && *p.outcome.target_rate < 1))
            throw InputError("cohort spec: target rate must lie in (0, 1)");
    }
    if (std::abs(total - 1.0) > 1e-9) throw InputError("cohort spec: pattern weights must sum to 1");
}

nlohmann::json CohortSpec::to_json() const {
    nlohmann::json j;
    j["schema"] = schema.to_json();
    j["patterns"] = nlohmann::json::array();
    for (const auto& p : patterns) {
        nlohmann::json pj;
        pj["name"] = p.name;
        pj["weight"] = p.weight;
        pj["features"] = nlohmann::json::array();
        for (const auto& f : p.features) {
            nlohmann::json fj = {{"name", f.name}, {"distribution", distribution_name(f.distribution)},
                                 {"mean", f.mean}, {"dispersion", f.dispersion}};
            if (!f.levels.empty()) fj["levels"] = f.levels;
            if (!f.probabilities.empty()) fj["probabilities"] = f.probabilities;
            pj["features"].push_back(fj);
        }
        nlohmann::json w = nlohmann::json::object();
        for (const auto& [name, v] : p.outcome.weights) w[name] = v;
        pj["outcome"] = {{"intercept", p.outcome.intercept}, {"weights", w}};
        if (p.outcome.target_rate) pj["outcome"]["target_rate"] = *p.outcome.target_rate;
        j["patterns"].push_back(pj);
    }
    return j;
}

CohortSpec CohortSpec::from_json(const nlohmann::json& j) {
    CohortSpec s;
    try {
        if (j.contains("schema")) s.schema = dataset::FeatureSchema::from_json(j.at("schema"));
        for (const auto& pj : j.at("patterns")) {
            PatternSpec p;
            p.name = pj.value("name", std::string("pattern"));
            p.weight = pj.at("weight").get<double>();
            for (const auto& fj : pj.at("features")) {
                FeatureModel f;
                f.name = fj.at("name").get<std::string>();
                f.distribution = parse_distribution(fj.at("distribution").get<std::string>());
                f.mean = fj.value("mean", 0.0);
                f.dispersion = fj.value("dispersion", 0.0);
                if (fj.contains("levels")) f.levels = fj.at("levels").get<std::vector<std::string>>();
                if (fj.contains("probabilities")) f.probabilities = fj.at("probabilities").get<std::vector<double>>();
                p.features.push_back(std::move(f));
            }
            if (pj.contains("outcome")) {
                const auto& o = pj.at("outcome");
                p.outcome.intercept = o.value("intercept", 0.0);
                if (o.contains("weights"))
                    for (auto it = o.at("weights").begin(); it != o.at("weights").end(); ++it)
                        p.outcome.weights.emplace_back(it.key(), it.value().get<double>());
                if (o.contains("target_rate")) p.outcome.target_rate = o.at("target_rate").get<double>();
            }
            s.patterns.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("cohort spec: ") + e.what());
    }
    s.validate();
    return s;
}

CohortSpec CohortSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open cohort spec: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("cohort spec " + path + ": " + e.what());
    }
    CohortSpec s = from_json(j);
    calibrate_intercepts(s);
    return s;
}

void calibrate_intercepts(CohortSpec& spec, std::size_t sample_size, std::uint64_t seed) {
    for (std::size_t k = 0; k < spec.patterns.size(); ++k) {
        auto& p = spec.patterns[k];
        if (!p.outcome.target_rate) continue;
        Rng rng(derive_seed(seed, "calibration", k));
        std::vector<double> s(sample_size);
        for (auto& v : s) v = linear_part(spec.schema, p, draw_row(p, rng));
        auto rate = [&](double b) {
            double m = 0.0;
            for (double v : s) m += logistic(b + v);
            return m / static_cast<double>(s.size());
        };
        double lo = -60.0, hi = 60.0;
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
            double mid = 0.5 * (lo + hi);
            (rate(mid) < *p.outcome.target_rate ? lo : hi) = mid;
        }
        p.outcome.intercept = 0.5 * (lo + hi);
    }
}

namespace {

CohortSpec build_table2() {
    CohortSpec spec;
    const double w2 = 0.0098;
    // Country shares follow a shifted power law over 65 categories: the most
    // common country holds ~27.9% of learners, the rarest ~340 times less.
    FeatureModel country{"country", Distribution::categorical, 0, 0, {}, {}};
    double z = 0.0;
    for (int k = 1; k <= 65; ++k) z += std::pow(k + 1.6327, -1.80396);
    for (int k = 1; k <= 65; ++k) {
        country.levels.push_back("C" + std::string(k < 10 ? "0" : "") + std::to_string(k));
        country.probabilities.push_back(std::pow(k + 1.6327, -1.80396) / z);
    }

    struct Count {
        const char* name;
        double low, motivated, sd;
    };
    const Count counts[] = {
        {"ndays_act", 3.28, 41.72, 6.83},      {"nevents", 94.61, 5855.63, 715.50},
        {"nplay_video", 23.06, 1022.94, 166.75}, {"nchapters", 2.89, 14.25, 3.72},
        {"nforum_posts", 0.01, 0.10, 0.14},
    };

    PatternSpec low{"low_autonomy", 1.0 - w2, {}, {}};
    PatternSpec mot{"motivated", w2, {}, {}};
    low.features = {{"age", Distribution::normal, 34.75, 7.97, {}, {}},
                    {"gender", Distribution::bernoulli, 0.6483, 0, {"f", "m"}, {}},
                    country,
                    {"viewed", Distribution::bernoulli, 0.4661, 0, {}, {}},
                    {"explored", Distribution::bernoulli, 0.0549, 0, {}, {}}};
    mot.features = {{"age", Distribution::normal, 36.38, 7.97, {}, {}},
                    {"gender", Distribution::bernoulli, 0.5093, 0, {"f", "m"}, {}},
                    country,
                    {"viewed", Distribution::bernoulli, 1.0, 0, {}, {}},
                    {"explored", Distribution::bernoulli, 0.9286, 0, {}, {}}};
    for (const auto& c : counts) {
        // Shared size r so the mixture matches the overall SD:
        // within-pattern variance = mean + (sum_k w_k m_k^2) / r.
        double mean = (1 - w2) * c.low + w2 * c.motivated;
        double between = w2 * (1 - w2) * (c.motivated - c.low) * (c.motivated - c.low);
        double within = c.sd * c.sd - between;
        double sq = (1 - w2) * c.low * c.low + w2 * c.motivated * c.motivated;
        double r = within > mean ? sq / (within - mean) : 1e6;
        r = std::max(r, 1.0);
        low.features.push_back({c.name, Distribution::negative_binomial, c.low, 1.0 / r, {}, {}});
        mot.features.push_back({c.name, Distribution::negative_binomial, c.motivated, 1.0 / std::max(r, 4.0), {}, {}});
    }
    low.outcome.weights = {{"nchapters", 3.0}, {"ndays_act", 1.5}, {"nevents", 1.0}, {"explored", 1.0}, {"nplay_video", -0.5}};
    low.outcome.target_rate = 0.0168;
    mot.outcome.weights = {{"nevents", 1.0}, {"ndays_act", 0.8}, {"nplay_video", 0.6}};
    mot.outcome.target_rate = 0.5324;
    spec.patterns = {low, mot};
    spec.validate();
    calibrate_intercepts(spec);
    return spec;
}

}  // namespace

// Calibration draws a few hundred thousand rows; do it once per process.
CohortSpec table2_spec() {
    static const CohortSpec spec = build_table2();
    return spec;
}

SyntheticCohort generate(const CohortSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (n == 0) throw InputError("generate: n must be positive");
    const auto& schema = spec.schema;
    const std::size_t p = schema.size();
    std::vector<double> cum;
    double acc = 0.0;
    for (const auto& pt : spec.patterns) cum.push_back(acc += pt.weight);

    std::vector<std::vector<double>> rows(n);
    Labels pattern(n), label(n);
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t b) {
        Rng rng(derive_seed(seed, "synth-block", b));
        for (std::size_t i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) {
            double u = uniform01(rng);
            std::size_t k = 0;
            while (k + 1 < cum.size() && u >= cum[k]) ++k;
            const auto& pt = spec.patterns[k];
            rows[i] = draw_row(pt, rng);
            double prob = logistic(pt.outcome.intercept + linear_part(schema, pt, rows[i]));
            pattern[i] = static_cast<int>(k);
            label[i] = uniform01(rng) < prob ? 1 : 0;
        }
    });

    SyntheticCohort out;
    out.true_pattern = pattern;
    auto& rec = out.records;
    rec.schema = schema;
    rec.text.resize(p);
    rec.labels = label;
    rec.kept = n;
    rec.numeric = Matrix(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& pt = spec.patterns[static_cast<std::size_t>(pattern[i])];
        for (std::size_t j = 0; j < p; ++j) {
            const auto& f = schema.features[j];
            const auto& model = pt.features[j];
            double v = rows[i][j];
            if (f.kind == FeatureKind::categorical) {
                rec.text[j].push_back(model.levels.at(static_cast<std::size_t>(v)));
                rec.numeric(i, j) = std::numeric_limits<double>::quiet_NaN();
            } else if (f.kind == FeatureKind::binary && !f.levels.empty()) {
                rec.text[j].push_back(f.levels.at(static_cast<std::size_t>(v)));
                rec.numeric(i, j) = v;
            } else {
                rec.numeric(i, j) = v;
            }
        }
    }
    std::vector<std::size_t> size(spec.patterns.size(), 0);
    for (int k : pattern) ++size[static_cast<std::size_t>(k)];
    for (std::size_t k = 0; k < size.size(); ++k)
        if (size[k] == 0) out.warnings.push_back("pattern '" + spec.patterns[k].name + "' received no rows");
    return out;
}

dataset::LabeledDataset SyntheticCohort::encoded() const { return dataset::encode(records); }

void write_cohort_csv(const SyntheticCohort& cohort, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    const auto& rec = cohort.records;
    const auto& schema = rec.schema;
    for (const auto& f : schema.features) out << csv::escape(f.name) << ',';
    out << csv::escape(schema.outcome.name) << ",true_pattern\n";
    for (std::size_t i = 0; i < rec.rows(); ++i) {
        for (std::size_t j = 0; j < schema.size(); ++j) {
            if (!rec.text[j].empty()) out << csv::escape(rec.text[j][i]);
            else out << csv::format_double(rec.numeric(i, j));
            out << ',';
        }
        out << rec.labels[i] << ',' << cohort.true_pattern[i] << '\n';
    }
}

}  // namespace stratify::synth
