#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "stratify/clustering/select_k.hpp"
#include "stratify/core/error.hpp"
#include "stratify/core/random.hpp"

using namespace stratify;
using namespace stratify::clustering;

namespace {

Matrix random_points(Rng& rng, std::size_t n, std::size_t p, double spread = 10.0) {
    Matrix X(n, p);
    for (std::size_t i = 0; i < n * p; ++i) X.data()[i] = uniform01(rng) * spread;
    return X;
}

// Labels covering every cluster in [0, k).
Labels random_labels(Rng& rng, std::size_t n, std::size_t k) {
    Labels l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = i < k ? static_cast<int>(i) : static_cast<int>(uniform_index(rng, k));
    shuffle(l.begin(), l.end(), rng);
    return l;
}

double oracle_index(ValidityIndex id, const Matrix& X, const Labels& l, std::size_t k, double wp, double wn) {
    switch (id) {
        case ValidityIndex::silhouette: return oracle::silhouette(X, l, k);
        case ValidityIndex::calinski_harabasz: return oracle::calinski_harabasz(X, l, k);
        case ValidityIndex::davies_bouldin: return oracle::davies_bouldin(X, l, k);
        case ValidityIndex::dunn: return oracle::dunn(X, l, k);
        case ValidityIndex::c_index: return oracle::c_index(X, l, k);
        case ValidityIndex::mcclain: return oracle::mcclain(X, l, k);
        case ValidityIndex::point_biserial: return oracle::point_biserial(X, l, k);
        case ValidityIndex::ball: return oracle::ball(X, l, k);
        case ValidityIndex::hartigan: return oracle::hartigan(X, l, k, wn);
        case ValidityIndex::krzanowski_lai: return oracle::krzanowski_lai(X, l, k, wp, wn);
    }
    return NAN;
}

}  // namespace

TEST_SUITE("clustering") {

TEST_CASE("four points, K = 2") {
    Matrix X(4, 2, std::vector<double>{0, 0, 0, 1, 10, 0, 10, 1});
    auto m = kmeans_fit(X, 2, 1);
    CHECK(m.inertia == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(oracle::best_two_partition_cost(X) == doctest::Approx(1.0).epsilon(1e-12));
    // Equal sizes keep both orders possible; check as a set.
    bool a = m.centroids(0, 0) == 0.0 && m.centroids(1, 0) == 10.0;
    bool b = m.centroids(0, 0) == 10.0 && m.centroids(1, 0) == 0.0;
    CHECK((a || b));
    CHECK(m.centroids(0, 1) == 0.5);
    CHECK(m.centroids(1, 1) == 0.5);
}

TEST_CASE("K = 1 and K = n") {
    Rng rng(3);
    auto X = random_points(rng, 12, 3);
    auto one = kmeans_fit(X, 1, 2);
    double total = 0;
    for (std::size_t j = 0; j < 3; ++j) {
        auto col = X.column(j);
        double mean = 0;
        for (double v : col) mean += v / 12.0;
        CHECK(one.centroids(0, j) == doctest::Approx(mean).epsilon(1e-12));
        for (double v : col) total += (v - mean) * (v - mean);
    }
    CHECK(one.inertia == doctest::Approx(total).epsilon(1e-12));
    CHECK(kmeans_fit(X, 12, 2).inertia == 0.0);
}

TEST_CASE("k-means errors") {
    Matrix X(3, 2, 1.0);
    CHECK_THROWS_AS(kmeans_fit(X, 4, 1), InputError);
    CHECK_THROWS_AS(kmeans_fit(Matrix(), 1, 1), InputError);
    auto m = kmeans_fit(X, 1, 1);
    CHECK_THROWS_AS(assign_patterns(m, Matrix(2, 3, 0.0)), InputError);
}

TEST_CASE("k-means is seed-deterministic and ordered by size") {
    Rng rng(5);
    auto X = random_points(rng, 200, 4);
    auto a = kmeans_fit(X, 4, 99), b = kmeans_fit(X, 4, 99);
    CHECK(a.centroids == b.centroids);
    CHECK(a.labels == b.labels);
    CHECK(a.inertia == b.inertia);
    auto asg = assign_patterns(a, X);
    for (std::size_t c = 1; c < asg.sizes.size(); ++c) CHECK(asg.sizes[c - 1] >= asg.sizes[c]);
}

TEST_CASE("assignment rules") {
    KMeansModel m;
    m.k = 2;
    m.centroids = Matrix(2, 1, std::vector<double>{0.0, 2.0});
    auto a = assign_patterns(m, Matrix(3, 1, std::vector<double>{0.0, 2.0, 1.0}));
    CHECK(a.labels == Labels{0, 1, 0});
    CHECK(a.sizes == std::vector<std::size_t>{2, 1});

    Rng rng(6);
    auto X = random_points(rng, 150, 3);
    auto fit = kmeans_fit(X, 3, 4);
    CHECK(assign_patterns(fit, X).labels == fit.labels);
}

TEST_CASE("k-means reaches the exhaustive optimum on small instances") {
    Rng rng(2024);
    KMeansOptions opts;
    opts.restarts = 50;
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 3 + uniform_index(rng, 6);
        auto X = random_points(rng, n, 1 + uniform_index(rng, 3));
        auto m = kmeans_fit(X, 2, rng(), opts);
        double best = oracle::best_two_partition_cost(X);
        // Same partition cost when recomputed from the labels.
        REQUIRE(oracle::partition_cost(X, m.labels, 2) == doctest::Approx(best).epsilon(1e-12));
    }
}

// Lloyd skips most distance evaluations once the bounds settle; the labels it
// ends with must still be the nearest centroid for every row.
TEST_CASE("bounded assignment agrees with an exhaustive scan") {
    Rng rng(31);
    KMeansOptions opts;
    opts.restarts = 1;
    for (int t = 0; t < 40; ++t) {
        std::size_t n = 200 + uniform_index(rng, 800), p = 2 + uniform_index(rng, 5), k = 2 + uniform_index(rng, 7);
        // Blobs around a few centres so the bounds actually prune.
        auto centres = random_points(rng, k, p, 20.0);
        Matrix X(n, p);
        for (std::size_t i = 0; i < n; ++i) {
            auto c = uniform_index(rng, k);
            for (std::size_t j = 0; j < p; ++j) X(i, j) = centres(c, j) + uniform01(rng) * 3.0;
        }
        auto m = kmeans_fit(X, k, 100 + t, opts);
        std::size_t wrong = 0;
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bd = oracle::euclid(X.row(i), m.centroids.row(0));
            for (std::size_t c = 1; c < k; ++c) {
                double d = oracle::euclid(X.row(i), m.centroids.row(c));
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            wrong += m.labels[i] != static_cast<int>(best);
            cost += bd * bd;
        }
        REQUIRE(wrong == 0);
        CHECK(m.inertia == doctest::Approx(cost).epsilon(1e-9));
    }
}

TEST_CASE("within-cluster sum of squares matches the oracle") {
    Rng rng(8);
    auto X = random_points(rng, 25, 3);
    auto l = random_labels(rng, 25, 4);
    CHECK(within_cluster_ss(X, l, 4) == doctest::Approx(oracle::partition_cost(X, l, 4)).epsilon(1e-12));
}

TEST_CASE("validity indices match brute-force formulas") {
    Rng rng(77);
    for (int t = 0; t < 60; ++t) {
        std::size_t n = 6 + uniform_index(rng, 25);
        std::size_t k = 2 + uniform_index(rng, std::min<std::size_t>(4, n - 3));
        auto X = random_points(rng, n, 1 + uniform_index(rng, 4));
        auto l = random_labels(rng, n, k);
        double wp = within_cluster_ss(X, random_labels(rng, n, k - 1), k - 1) + 5.0;
        double wn = within_cluster_ss(X, random_labels(rng, n, k + 1), k + 1) * 0.5;
        NeighbourDispersion nb{wp, wn};
        PairwiseDistances D(X);
        for (auto id : all_indices()) {
            CAPTURE(index_name(id));
            double expect = oracle_index(id, X, l, k, wp, wn);
            double got = validity_index(X, l, k, id, nb);
            double tol = 1e-9 * std::max(1.0, std::abs(expect));
            REQUIRE(std::abs(got - expect) <= tol);
            if (uses_pairwise_distances(id)) REQUIRE(std::abs(validity_index(X, l, k, id, nb, &D) - expect) <= tol);
        }
    }
}

TEST_CASE("singleton clusters score 0 in the silhouette") {
    Matrix X(3, 1, std::vector<double>{0.0, 0.1, 5.0});
    Labels l{0, 0, 1};
    double s = validity_index(X, l, 2, ValidityIndex::silhouette);
    CHECK(s == doctest::Approx(oracle::silhouette(X, l, 2)).epsilon(1e-12));
    // point 2 contributes 0, the other two about 0.98
    CHECK(s < 2.0 / 3.0);
}

TEST_CASE("two tight, far-apart clusters") {
    Rng rng(10);
    Matrix X(40, 2);
    Labels l(40);
    for (std::size_t i = 0; i < 40; ++i) {
        l[i] = i < 20 ? 0 : 1;
        X(i, 0) = (i < 20 ? 0.0 : 20.0) + uniform01(rng);
        X(i, 1) = uniform01(rng);
    }
    CHECK(validity_index(X, l, 2, ValidityIndex::silhouette) >= 0.95);
}

TEST_CASE("identical points in one cluster") {
    Matrix X(6, 1, std::vector<double>{0, 0, 0, 10, 11, 12});
    Labels l{0, 0, 0, 1, 1, 1};
    double db = validity_index(X, l, 2, ValidityIndex::davies_bouldin);
    double dunn = validity_index(X, l, 2, ValidityIndex::dunn);
    CHECK(db == doctest::Approx(oracle::davies_bouldin(X, l, 2)));
    CHECK(dunn == doctest::Approx(oracle::dunn(X, l, 2)));
    CHECK(db < 0.1);
    CHECK(dunn > 4.0);
}

TEST_CASE("majority vote breaks ties toward the smaller K") {
    std::map<ValidityIndex, std::optional<std::size_t>> votes{{ValidityIndex::silhouette, 3},
                                                              {ValidityIndex::dunn, 2},
                                                              {ValidityIndex::ball, 3},
                                                              {ValidityIndex::c_index, 2}};
    std::map<std::size_t, std::size_t> tally;
    CHECK(majority_vote(votes, &tally) == 2);
    CHECK(tally[2] == 2);
    CHECK(tally[3] == 2);
    votes[ValidityIndex::mcclain] = std::nullopt;
    CHECK(majority_vote(votes) == 2);
}

TEST_CASE("select_k report is complete and picks planted K") {
    Rng rng(12);
    Matrix X(300, 3);
    for (std::size_t i = 0; i < 300; ++i) {
        std::size_t c = i % 3;
        for (std::size_t j = 0; j < 3; ++j) X(i, j) = (j == c ? 30.0 : 0.0) + uniform01(rng);
    }
    KSelectOptions opts;
    opts.k_min = 2;
    opts.k_max = 6;
    auto rep = select_k(X, opts, 5);
    CHECK(rep.ks == std::vector<std::size_t>{2, 3, 4, 5, 6});
    CHECK(rep.values.size() == 10);
    for (const auto& [id, vals] : rep.values) CHECK(vals.size() == rep.ks.size());
    CHECK(rep.winner == 3);
    CHECK(rep.tally[3] >= 8);
    CHECK(rep.model_for(3).k == 3);
    CHECK_THROWS_AS(rep.model_for(9), InputError);

    opts.indices.clear();
    CHECK_THROWS_AS(select_k(X, opts, 5), InputError);
}

TEST_CASE("select_k is deterministic") {
    Rng rng(13);
    auto X = random_points(rng, 120, 2);
    KSelectOptions opts;
    opts.k_max = 4;
    auto a = select_k(X, opts, 3), b = select_k(X, opts, 3);
    CHECK(a.to_json().dump() == b.to_json().dump());
}

}
