#include "doctest.h"

#include <cmath>
#include <map>

#include "stratify/clustering/select_k.hpp"
#include "stratify/core/error.hpp"
#include "stratify/synth/cohort.hpp"

using namespace stratify;
using namespace stratify::synth;

namespace {

// Patterns differing only in age and counts; binaries fixed so they carry no noise.
CohortSpec planted(const std::vector<double>& weights, const std::vector<double>& centres, double spread) {
    CohortSpec spec;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        PatternSpec p;
        p.name = "p" + std::to_string(k);
        p.weight = weights[k];
        double c = centres[k];
        p.features = {{"age", Distribution::normal, c, spread, {}, {}},
                      {"gender", Distribution::bernoulli, 1.0, 0, {"f", "m"}, {}},
                      {"country", Distribution::categorical, 0, 0, {"US"}, {1.0}},
                      {"viewed", Distribution::bernoulli, 1.0, 0, {}, {}},
                      {"explored", Distribution::bernoulli, 0.0, 0, {}, {}},
                      {"ndays_act", Distribution::normal, c, spread, {}, {}},
                      {"nevents", Distribution::normal, 2 * c, spread, {}, {}},
                      {"nplay_video", Distribution::normal, c, spread, {}, {}},
                      {"nchapters", Distribution::normal, c, spread, {}, {}},
                      {"nforum_posts", Distribution::normal, c, spread, {}, {}}};
        p.outcome.intercept = -1.0;
        p.outcome.weights = {{"ndays_act", 0.2}};
        spec.patterns.push_back(p);
    }
    return spec;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("cohort spec validation") {
    auto ok = planted({0.5, 0.5}, {100, 200}, 5);
    ok.validate();
    auto bad = ok;
    bad.patterns[0].weight = 0.7;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = ok;
    bad.patterns[1].features[0].dispersion = -1;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = ok;
    bad.patterns[0].features.pop_back();
    CHECK_THROWS_AS(bad.validate(), InputError);
    auto round = CohortSpec::from_json(ok.to_json());
    CHECK(round.to_json() == ok.to_json());
}

TEST_CASE("generation is seed-deterministic") {
    auto spec = planted({0.5, 0.5}, {100, 200}, 5);
    auto a = generate(spec, 500, 3), b = generate(spec, 500, 3);
    CHECK(a.true_pattern == b.true_pattern);
    CHECK(a.encoded().X == b.encoded().X);
    CHECK(a.records.labels == b.records.labels);
    CHECK(generate(spec, 500, 4).encoded().X != a.encoded().X);
}

TEST_CASE("zero dispersion gives constant columns per pattern") {
    auto spec = planted({0.5, 0.5}, {100, 200}, 0);
    for (auto& p : spec.patterns) p.features[5] = {"ndays_act", Distribution::negative_binomial, 7.4, 0, {}, {}};
    auto c = generate(spec, 400, 1);
    auto d = c.encoded();
    for (std::size_t i = 0; i < d.rows(); ++i) {
        double centre = c.true_pattern[i] == 0 ? 100 : 200;
        CHECK(d.X(i, 0) == centre);
        CHECK(d.X(i, 5) == 7.0);
        CHECK(d.X(i, 6) == 2 * centre);
    }
}

TEST_CASE("mixture sizes within three standard deviations") {
    auto spec = planted({0.99, 0.01}, {100, 200}, 5);
    auto c = generate(spec, 10000, 2);
    double small = 0;
    for (int v : c.true_pattern) small += v == 1;
    CHECK(std::abs(small - 100) <= 3 * std::sqrt(10000 * 0.99 * 0.01));
}

TEST_CASE("an empty pattern is reported") {
    auto spec = planted({0.999999, 0.000001}, {100, 200}, 5);
    auto c = generate(spec, 50, 2);
    CHECK(!c.warnings.empty());
}

TEST_CASE("feature means converge to the cohort model") {
    auto base = table2_spec();
    auto spec = base;
    spec.patterns = {base.patterns[0]};
    spec.patterns[0].weight = 1.0;
    const std::size_t n = 20000;
    auto c = generate(spec, n, 5);
    const auto& pat = spec.patterns[0];
    for (std::size_t j = 0; j < pat.features.size(); ++j) {
        const auto& f = pat.features[j];
        CAPTURE(f.name);
        if (f.distribution == Distribution::categorical) {
            std::map<std::string, double> share;
            for (const auto& v : c.records.text[j]) share[v] += 1.0 / double(n);
            for (std::size_t l = 0; l < 5; ++l) {
                double q = f.probabilities[l];
                CHECK(std::abs(share[f.levels[l]] - q) <= 4 * std::sqrt(q * (1 - q) / double(n)));
            }
            continue;
        }
        double var = 0;
        switch (f.distribution) {
            case Distribution::normal: var = f.dispersion * f.dispersion; break;
            case Distribution::negative_binomial: var = f.mean + f.mean * f.mean * f.dispersion; break;
            case Distribution::bernoulli: var = f.mean * (1 - f.mean); break;
            default: break;
        }
        double mean = 0;
        for (std::size_t i = 0; i < n; ++i) mean += c.records.numeric(i, j) / double(n);
        CHECK(std::abs(mean - f.mean) <= 4 * std::sqrt(var / double(n)) + 1e-12);
    }
}

TEST_CASE("reference two-pattern cohort hits its targets") {
    auto spec = table2_spec();
    REQUIRE(spec.patterns.size() == 2);
    CHECK(spec.patterns[0].weight == doctest::Approx(0.9902));
    CHECK(spec.patterns[1].weight == doctest::Approx(0.0098));
    auto c = generate(spec, 92722, 1);
    double n1 = 0, pos[2] = {0, 0}, cnt[2] = {0, 0};
    for (std::size_t i = 0; i < c.true_pattern.size(); ++i) {
        int k = c.true_pattern[i];
        cnt[k] += 1;
        pos[k] += c.records.labels[i];
        n1 += k == 1;
    }
    CHECK(std::abs(n1 / 92722.0 - 0.0098) <= 0.003);
    CHECK(std::abs(pos[0] / cnt[0] - 0.0168) <= 0.005);
    CHECK(std::abs(pos[1] / cnt[1] - 0.5324) <= 0.05);
}

TEST_CASE("three planted patterns are recovered") {
    auto spec = planted({0.4, 0.35, 0.25}, {100, 200, 300}, 5);
    auto c = generate(spec, 1500, 9);
    auto d = c.encoded();
    auto Z = dataset::apply_standardizer(dataset::fit_standardizer(d.X), d.X);
    clustering::KSelectOptions o;
    o.k_min = 2;
    o.k_max = 6;
    auto rep = clustering::select_k(Z, o, 4);
    CHECK(rep.winner == 3);
    CHECK(rep.tally[3] >= 8);
    // Largest cluster first, like the planted weights: labels match up to that order.
    const auto& m = rep.model_for(3);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < d.rows(); ++i) agree += m.labels[i] == c.true_pattern[i];
    CHECK(double(agree) / double(d.rows()) >= 0.99);
}

}
