#include "doctest.h"

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "stratify/core/error.hpp"
#include "stratify/core/random.hpp"
#include "stratify/explain/shap.hpp"

using namespace stratify;
using namespace stratify::classifiers;
using namespace stratify::explain;

namespace {

// Random full tree of the given depth over features [0, p).
Tree random_tree(Rng& rng, std::size_t p, std::size_t depth, std::set<std::size_t> skip = {}) {
    Tree t;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    t.nodes.emplace_back();
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        if (d == depth || uniform01(rng) < 0.15) {
            t.nodes[id].value = uniform01(rng) * 4 - 2;
            continue;
        }
        std::size_t f;
        do f = uniform_index(rng, p);
        while (skip.count(f));
        t.nodes[id].feature = static_cast<int>(f);
        t.nodes[id].threshold = uniform01(rng);
        t.nodes[id].gain = uniform01(rng);
        int l = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        t.nodes.emplace_back();
        t.nodes[id].left = l;
        t.nodes[id].right = l + 1;
        stack.push_back({l, d + 1});
        stack.push_back({l + 1, d + 1});
    }
    return t;
}

Matrix random_rows(Rng& rng, std::size_t n, std::size_t p) {
    Matrix X(n, p);
    for (std::size_t i = 0; i < n * p; ++i) X.data()[i] = uniform01(rng);
    return X;
}

Tree stump(int feature, double threshold, double left, double right, double gain = 1.0) {
    Tree t;
    t.nodes.resize(3);
    t.nodes[0].feature = feature;
    t.nodes[0].threshold = threshold;
    t.nodes[0].left = 1;
    t.nodes[0].right = 2;
    t.nodes[0].gain = gain;
    t.nodes[1].value = left;
    t.nodes[2].value = right;
    return t;
}

}  // namespace

TEST_SUITE("explain") {

TEST_CASE("constant model") {
    Matrix bg(3, 2, std::vector<double>{0, 1, 2, 3, 4, 5});
    std::vector<double> x{9, 9};
    auto r = shap_bruteforce([](std::span<const double>) { return 4.25; }, x, bg);
    CHECK(r.base == 4.25);
    for (double v : r.phi) CHECK(v == 0.0);
}

TEST_CASE("additive model recovers x - mean") {
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        std::size_t p = 2 + uniform_index(rng, 5);
        auto bg = random_rows(rng, 1 + uniform_index(rng, 10), p);
        auto x = random_rows(rng, 1, p);
        std::vector<double> coef(p);
        for (auto& c : coef) c = uniform01(rng) * 4 - 2;
        auto f = [&](std::span<const double> z) {
            double s = 0.3;
            for (std::size_t j = 0; j < p; ++j) s += coef[j] * z[j];
            return s;
        };
        auto r = shap_bruteforce(f, x.row(0), bg);
        for (std::size_t j = 0; j < p; ++j) {
            double mean = 0;
            for (std::size_t b = 0; b < bg.rows(); ++b) mean += bg(b, j) / double(bg.rows());
            REQUIRE(std::abs(r.phi[j] - coef[j] * (x(0, j) - mean)) <= 1e-9);
        }
    }
}

TEST_CASE("subset enumeration agrees with the permutation definition") {
    Rng rng(2);
    for (int t = 0; t < 40; ++t) {
        std::size_t p = 1 + uniform_index(rng, 6);
        auto bg = random_rows(rng, 1 + uniform_index(rng, 6), p);
        auto x = random_rows(rng, 1, p);
        auto f = [&](std::span<const double> z) {
            double s = 0;
            for (std::size_t j = 0; j < p; ++j) s += std::sin(3 * z[j]) * (1 + z[(j + 1) % p] * z[j]);
            return s * s;
        };
        auto r = shap_bruteforce(f, x.row(0), bg);
        auto want = oracle::shapley_permutations(f, x.row(0), bg);
        double sum = r.base;
        for (std::size_t j = 0; j < p; ++j) {
            REQUIRE(std::abs(r.phi[j] - want[j]) <= 1e-9);
            sum += r.phi[j];
        }
        REQUIRE(std::abs(sum - f(x.row(0))) <= 1e-9);
        REQUIRE(std::abs(r.output - f(x.row(0))) <= 1e-12);
    }
}

TEST_CASE("guard on the feature count") {
    Matrix bg(1, 4, 0.0);
    std::vector<double> x(4, 1.0);
    CHECK_THROWS_AS(shap_bruteforce([](std::span<const double>) { return 0.0; }, x, bg, 3), InputError);
}

TEST_CASE("tree fast path equals brute force on random ensembles") {
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        std::size_t p = 1 + uniform_index(rng, 7);
        TreeEnsemble e;
        e.n_features = p;
        e.base = uniform01(rng);
        e.scale = 0.1 + uniform01(rng);
        std::size_t trees = 1 + uniform_index(rng, 4);
        for (std::size_t k = 0; k < trees; ++k) e.trees.push_back(random_tree(rng, p, 1 + uniform_index(rng, 4)));
        auto bg = random_rows(rng, 1 + uniform_index(rng, 10), p);
        auto x = random_rows(rng, 1, p);
        auto fast = shap_tree_fast(e, x.row(0), bg);
        auto slow = shap_bruteforce([&](std::span<const double> z) { return e.predict(z); }, x.row(0), bg);
        REQUIRE(std::abs(fast.base - slow.base) <= 1e-9);
        double sum = fast.base;
        for (std::size_t j = 0; j < p; ++j) {
            REQUIRE(std::abs(fast.phi[j] - slow.phi[j]) <= 1e-9);
            sum += fast.phi[j];
        }
        REQUIRE(std::abs(sum - e.predict(x.row(0))) <= 1e-9);
    }
}

TEST_CASE("small trees: depth 1 over 2 features, depth 2 over 3") {
    TreeEnsemble one;
    one.n_features = 2;
    one.trees.push_back(stump(1, 0.5, -1.0, 2.0));
    Matrix bg(2, 2, std::vector<double>{0.0, 0.0, 0.0, 1.0});
    std::vector<double> x{0.3, 0.9};
    auto fast = shap_tree_fast(one, x, bg);
    // v({}) = 0.5, v({1}) = 2
    CHECK(fast.phi[0] == 0.0);
    CHECK(fast.phi[1] == 1.5);
    CHECK(fast.base == 0.5);

    Rng rng(4);
    TreeEnsemble two;
    two.n_features = 3;
    two.trees.push_back(random_tree(rng, 3, 2));
    auto bg3 = random_rows(rng, 5, 3);
    auto x3 = random_rows(rng, 1, 3);
    auto a = shap_tree_fast(two, x3.row(0), bg3);
    auto b = shap_bruteforce([&](std::span<const double> z) { return two.predict(z); }, x3.row(0), bg3);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(a.phi[j] - b.phi[j]) <= 1e-9);
}

TEST_CASE("leaf-only tree, dummy and symmetric features") {
    TreeEnsemble leaf;
    leaf.n_features = 2;
    Tree t;
    t.nodes.resize(1);
    t.nodes[0].value = 3.0;
    leaf.trees.push_back(t);
    Matrix bg(2, 2, std::vector<double>{0, 0, 1, 1});
    std::vector<double> x{0.5, 0.2};
    for (double v : shap_tree_fast(leaf, x, bg).phi) CHECK(v == 0.0);

    Rng rng(5);
    TreeEnsemble e;
    e.n_features = 4;
    for (int k = 0; k < 3; ++k) e.trees.push_back(random_tree(rng, 4, 3, {2}));
    auto bg4 = random_rows(rng, 6, 4);
    auto x4 = random_rows(rng, 1, 4);
    CHECK(shap_tree_fast(e, x4.row(0), bg4).phi[2] == 0.0);

    // f = [x0 > .5] + [x1 > .5], identical columns
    TreeEnsemble sym;
    sym.n_features = 2;
    sym.trees.push_back(stump(0, 0.5, 0, 1));
    sym.trees.push_back(stump(1, 0.5, 0, 1));
    Matrix bgs(3, 2, std::vector<double>{0.1, 0.1, 0.7, 0.7, 0.2, 0.2});
    std::vector<double> xs{0.9, 0.9};
    auto phi = shap_tree_fast(sym, xs, bgs).phi;
    CHECK(phi[0] == doctest::Approx(phi[1]).epsilon(1e-15));
}

TEST_CASE("split gain importance") {
    TreeEnsemble single;
    single.n_features = 5;
    single.trees.push_back(stump(3, 0.5, 0, 1, 2.5));
    auto r = split_gain_importance(single);
    CHECK(r.scores == std::vector<double>{0, 0, 0, 1, 0});
    CHECK(r.order.front() == 3);

    TreeEnsemble none;
    none.n_features = 3;
    Tree leaf;
    leaf.nodes.resize(1);
    none.trees.push_back(leaf);
    auto z = split_gain_importance(none);
    CHECK(z.scores == std::vector<double>{0, 0, 0});
    CHECK(std::set<std::size_t>(z.order.begin(), z.order.end()).size() == 3);

    TreeEnsemble pair;
    pair.n_features = 3;
    pair.trees.push_back(stump(1, 0.5, 0, 1, 0.7));
    pair.trees.push_back(stump(2, 0.5, 0, 1, 0.7));
    auto h = split_gain_importance(pair);
    CHECK(h.scores[1] == 0.5);
    CHECK(h.scores[2] == 0.5);

    TrainedModel lr;
    lr.hyperparameters.algorithm = Algorithm::LR;
    lr.parameters = LogisticModel{{0.0}, 0.0};
    lr.n_features = 1;
    CHECK_THROWS_AS(split_gain_importance(lr), InputError);
}

TEST_CASE("explain_rows and beeswarm export") {
    Rng rng(6);
    TreeEnsemble e;
    e.n_features = 3;
    for (int k = 0; k < 4; ++k) e.trees.push_back(random_tree(rng, 3, 3));
    auto bg = random_rows(rng, 8, 3);
    auto rows = random_rows(rng, 12, 3);
    auto shap = explain_rows(e, rows, bg, {"a", "b", "c"});
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        double s = shap.base;
        for (std::size_t j = 0; j < 3; ++j) s += shap.phi(i, j);
        CHECK(std::abs(s - shap.outputs[i]) <= 1e-9);
        CHECK(std::abs(shap.outputs[i] - e.predict(rows.row(i))) <= 1e-12);
    }
    auto bees = beeswarm_export(shap);
    CHECK(bees.size() == 36);
    std::vector<double> mean_abs;
    std::string current;
    for (const auto& b : bees) {
        CHECK((b.percentile >= 0.0 && b.percentile <= 1.0));
        if (b.feature != current) {
            current = b.feature;
            mean_abs.push_back(0);
        }
        mean_abs.back() += std::abs(b.shap) / 12.0;
    }
    CHECK(mean_abs.size() == 3);
    for (std::size_t i = 1; i < mean_abs.size(); ++i) CHECK(mean_abs[i - 1] >= mean_abs[i]);

    auto one = explain_rows(e, random_rows(rng, 1, 3), bg, {"a", "b", "c"});
    one.phi = Matrix(1, 2, std::vector<double>{0.1, -0.3});
    one.features = Matrix(1, 2, std::vector<double>{1, 2});
    one.names = {"a", "b"};
    auto two = beeswarm_export(one);
    CHECK(two.size() == 2);
    CHECK(two[0].feature == "b");
}

}
