#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "stratify/core/error.hpp"
#include "stratify/core/random.hpp"
#include "stratify/evaluation/metrics.hpp"

using namespace stratify;
using namespace stratify::evaluation;

TEST_SUITE("evaluation") {

TEST_CASE("confusion counts") {
    Labels y{1, 1, 0, 0}, p{1, 0, 0, 1};
    auto cm = confusion(y, p);
    CHECK(cm.tp == 1);
    CHECK(cm.fn == 1);
    CHECK(cm.tn == 1);
    CHECK(cm.fp == 1);
    CHECK(confusion(y, y).fp == 0);
    CHECK_THROWS_AS(confusion(Labels{}, Labels{}), InputError);
    CHECK_THROWS_AS(confusion(Labels{1}, Labels{1, 0}), InputError);
    CHECK_THROWS_AS(confusion(Labels{2}, Labels{1}), InputError);
}

TEST_CASE("metric set by hand") {
    auto m = metric_set({3, 1, 2, 4});
    CHECK(m.accuracy == doctest::Approx(0.7));
    CHECK(m.precision == doctest::Approx(0.75));
    CHECK(m.recall == doctest::Approx(0.6));
    CHECK(m.f1 == doctest::Approx(2 * 0.45 / 1.35));

    auto none = metric_set({0, 0, 0, 5});
    CHECK(none.accuracy == 1.0);
    CHECK(none.precision_undefined);
    CHECK(none.recall_undefined);
    CHECK(none.precision == 0.0);

    auto perfect = metric_set({4, 0, 0, 6});
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);
    auto w = weighted_metric_set({4, 0, 0, 6});
    CHECK(w.precision == 1.0);
    CHECK(w.recall == 1.0);
    CHECK(w.f1 == 1.0);
}

TEST_CASE("symmetric matrix: weighted precision equals weighted recall") {
    auto w = weighted_metric_set({7, 3, 3, 7});
    CHECK(w.precision == doctest::Approx(w.recall).epsilon(1e-15));
}

TEST_CASE("random matrices match hand formulas; weighted recall is accuracy") {
    Rng rng(1);
    for (int t = 0; t < 10000; ++t) {
        ConfusionMatrix cm{uniform_index(rng, 50), uniform_index(rng, 50), uniform_index(rng, 50),
                           uniform_index(rng, 50) + 1};
        auto m = metric_set(cm);
        double tp = double(cm.tp), fp = double(cm.fp), fn = double(cm.fn), tn = double(cm.tn);
        REQUIRE(m.accuracy == (tp + tn) / (tp + fp + fn + tn));
        if (tp + fp > 0) REQUIRE(m.precision == tp / (tp + fp));
        if (tp + fn > 0) REQUIRE(m.recall == tp / (tp + fn));
        if (m.precision + m.recall > 0) REQUIRE(m.f1 == 2 * m.precision * m.recall / (m.precision + m.recall));
        REQUIRE(weighted_metric_set(cm).recall == m.accuracy);
    }
}

TEST_CASE("AUC examples") {
    CHECK(roc_auc(Labels{1, 0, 1, 0}, std::vector<double>{0.9, 0.8, 0.8, 0.1}).auc == 0.875);
    CHECK(roc_auc(Labels{1, 1, 0, 0}, std::vector<double>{0.9, 0.8, 0.2, 0.1}).auc == 1.0);
    CHECK(roc_auc(Labels{1, 1, 0, 0}, std::vector<double>{0.1, 0.2, 0.8, 0.9}).auc == 0.0);
    CHECK_THROWS_AS(roc_auc(Labels{1, 1}, std::vector<double>{0.1, 0.2}), DegenerateError);
}

TEST_CASE("AUC equals Mann-Whitney on random vectors; curve is monotone") {
    Rng rng(2);
    for (int t = 0; t < 1000; ++t) {
        std::size_t n = 2 + uniform_index(rng, 49);
        Labels y(n);
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = uniform01(rng) < 0.4 ? 1 : 0;
            s[i] = double(uniform_index(rng, 8)) / 8.0;  // plenty of ties
        }
        y[0] = 1;
        y[1] = 0;
        auto roc = roc_auc(y, s);
        REQUIRE(std::abs(roc.auc - oracle::mann_whitney_auc(y, s)) <= 1e-12);
        REQUIRE(roc.points.front().fpr == 0.0);
        REQUIRE(roc.points.front().tpr == 0.0);
        REQUIRE(roc.points.back().fpr == 1.0);
        REQUIRE(roc.points.back().tpr == 1.0);
        for (std::size_t i = 1; i < roc.points.size(); ++i) {
            REQUIRE(roc.points[i].fpr >= roc.points[i - 1].fpr);
            REQUIRE(roc.points[i].tpr >= roc.points[i - 1].tpr);
        }
        // strictly monotone transform
        std::vector<double> t2(n);
        for (std::size_t i = 0; i < n; ++i) t2[i] = std::exp(3 * s[i]) - 7;
        REQUIRE(roc_auc(y, t2).auc == roc.auc);
    }
}

TEST_CASE("bootstrap rates") {
    Labels y{1, 1, 0, 0, 1, 0};
    auto perfect = bootstrap_rate_distributions(y, y, 200, 4);
    for (double v : perfect.tpr) CHECK(v == 1.0);
    for (double v : perfect.fpr) CHECK(v == 0.0);
    auto none = bootstrap_rate_distributions(y, Labels(6, 0), 100, 4);
    for (double v : none.tpr) CHECK(v == 0.0);
    auto a = bootstrap_rate_distributions(y, Labels{1, 0, 0, 1, 1, 0}, 1, 5);
    auto b = bootstrap_rate_distributions(y, Labels{1, 0, 0, 1, 1, 0}, 1, 5);
    CHECK(a.tpr == b.tpr);
    CHECK(a.fpr == b.fpr);
    CHECK_THROWS_AS(bootstrap_rate_distributions(Labels{1, 1}, Labels{1, 0}, 10, 1), DegenerateError);
}

TEST_CASE("bootstrap TPR concentrates on the point estimate") {
    Rng rng(3);
    Labels y(400), p(400);
    for (std::size_t i = 0; i < 400; ++i) {
        y[i] = uniform01(rng) < 0.5;
        p[i] = uniform01(rng) < (y[i] ? 0.7 : 0.2);
    }
    auto cm = confusion(y, p);
    double tpr = double(cm.tp) / double(cm.tp + cm.fn);
    auto d = bootstrap_rate_distributions(y, p, 2000, 11);
    double mean = 0, var = 0;
    for (double v : d.tpr) mean += v / double(d.tpr.size());
    for (double v : d.tpr) var += (v - mean) * (v - mean) / double(d.tpr.size() - 1);
    double se = std::sqrt(var / double(d.tpr.size()));
    CHECK(std::abs(mean - tpr) <= 3 * se);
    CHECK(d.tpr_summary.q1 <= d.tpr_summary.median);
    CHECK(d.tpr_summary.median <= d.tpr_summary.q3);
}

TEST_CASE("chi-square and Cramer's V") {
    auto indep = chi_square_2x2({{{10, 10}, {10, 10}}});
    CHECK(indep.statistic == 0.0);
    CHECK(indep.p_value == doctest::Approx(1.0));
    auto r = chi_square_2x2({{{20, 10}, {10, 20}}});
    CHECK(r.statistic == doctest::Approx(oracle::chi2_2x2(20, 10, 10, 20)).epsilon(1e-12));
    CHECK(r.statistic == doctest::Approx(6.6667).epsilon(1e-4));
    CHECK(r.df == 1);
    CHECK(r.p_value == doctest::Approx(0.009823).epsilon(1e-3));
    CHECK_THROWS(chi_square_2x2({{{0, 0}, {10, 20}}}));

    CHECK(cramers_v(23.42, 92722, 2, 2) == doctest::Approx(0.016).epsilon(0.001 / 0.016));
    CHECK(std::abs(cramers_v(75.66, 92722, 2, 2) - 0.029) <= 0.001);
    CHECK(std::abs(cramers_v(23.42, 92722, 2, 2) - 0.016) <= 0.001);
    CHECK(cramers_v(0.0, 100, 2, 2) == 0.0);
}

TEST_CASE("random 2x2 chi-square matches the closed form") {
    Rng rng(4);
    for (int t = 0; t < 500; ++t) {
        double a = 1 + uniform_index(rng, 100), b = 1 + uniform_index(rng, 100), c = 1 + uniform_index(rng, 100),
               d = 1 + uniform_index(rng, 100);
        double got = chi_square_2x2({{{a, b}, {c, d}}}).statistic;
        double want = oracle::chi2_2x2(a, b, c, d);
        REQUIRE(std::abs(got - want) <= 1e-9 * std::max(1.0, want));
    }
}

TEST_CASE("evaluate flags a single-class test set instead of failing") {
    EvaluationOptions o;
    o.bootstrap_B = 50;
    auto rep = evaluate(Labels{0, 0, 0}, std::vector<double>{0.1, 0.7, 0.2}, o);
    CHECK(rep.n == 3);
    CHECK(!rep.roc);
    CHECK(!rep.flags.empty());
    CHECK(rep.cm.fp == 1);

    auto ok = evaluate(Labels{0, 1, 0, 1}, std::vector<double>{0.1, 0.7, 0.5, 0.9}, o);
    CHECK(ok.roc);
    CHECK(ok.cm.tp == 2);
    CHECK(ok.cm.fp == 0);  // 0.5 is not above the threshold
}

}
