#include "stratify/clustering/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "stratify/core/error.hpp"
#include "stratify/core/parallel.hpp"
#include "stratify/core/random.hpp"
#include "stratify/simd/kernels.hpp"

namespace stratify::clustering {
namespace {

constexpr std::size_t kChunk = 4096;

struct Assignment {
    Labels labels;
    std::vector<double> dist;  // squared distance to the assigned centroid
    double inertia = 0.0;
};

// `second`, when given, receives the distance (not squared) to the runner-up centroid.
void nearest(const Matrix& X, const Matrix& C, Assignment& a, std::vector<double>* second = nullptr) {
    const std::size_t n = X.rows();
    const std::size_t k = C.rows();
    const auto& kern = simd::active();
    a.labels.resize(n);
    a.dist.resize(n);
    if (second) second->resize(n);
    std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
    parallel_for(chunks, [&](std::size_t ch) {
        std::size_t lo = ch * kChunk, hi = std::min(n, lo + kChunk);
        double s = 0.0;
        std::vector<double> d(k);
        for (std::size_t i = lo; i < hi; ++i) {
            kern.squared_distance_rows(C.data(), k, X.cols(), X.row(i).data(), d.data());
            double best = std::numeric_limits<double>::infinity(), next = best;
            int arg = 0;
            for (std::size_t j = 0; j < k; ++j) {
                if (d[j] < best) {
                    next = best;
                    best = d[j];
                    arg = static_cast<int>(j);
                } else if (d[j] < next) {
                    next = d[j];
                }
            }
            a.labels[i] = arg;
            a.dist[i] = best;
            if (second) (*second)[i] = std::sqrt(next);
            s += best;
        }
        partial[ch] = s;
    });
    a.inertia = 0.0;
    for (double s : partial) a.inertia += s;
}

// Rows that changed cluster, as (row, previous label), in row order.
using Moves = std::vector<std::pair<std::size_t, int>>;

// Hamerly bounds per row: `upper` >= distance to the own centroid, `lower` <=
// distance to every other one. A row is rescanned only when the bounds (or
// half the gap from its centroid to the nearest other) cannot prove it stays.
// The 1e-9 margin absorbs rounding in the bounds, so labels match nearest().
Moves nearest_bounded(const Matrix& X, const Matrix& C, const std::vector<double>& moved_by, Labels& labels,
                      std::vector<double>& upper, std::vector<double>& lower) {
    const std::size_t n = X.rows(), k = C.rows(), p = X.cols();
    const auto& kern = simd::active();
    const double drift = *std::max_element(moved_by.begin(), moved_by.end());
    std::vector<double> half_gap(k, std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < k; ++j)
            if (j != c)
                half_gap[c] = std::min(half_gap[c], 0.5 * std::sqrt(kern.squared_distance(C.row(c).data(), C.row(j).data(), p)));
    std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<Moves> moved(chunks);
    parallel_for(chunks, [&](std::size_t ch) {
        std::size_t lo = ch * kChunk, hi = std::min(n, lo + kChunk);
        std::vector<double> d(k);
        for (std::size_t i = lo; i < hi; ++i) {
            auto own = static_cast<std::size_t>(labels[i]);
            upper[i] += moved_by[own];
            lower[i] -= drift;
            double bound = std::max(lower[i], half_gap[own]) * (1.0 - 1e-9);
            if (upper[i] < bound) continue;
            upper[i] = std::sqrt(kern.squared_distance(C.row(own).data(), X.row(i).data(), p));
            if (upper[i] < bound) continue;
            kern.squared_distance_rows(C.data(), k, p, X.row(i).data(), d.data());
            double best = std::numeric_limits<double>::infinity(), next = best;
            int arg = 0;
            for (std::size_t j = 0; j < k; ++j) {
                if (d[j] < best) {
                    next = best;
                    best = d[j];
                    arg = static_cast<int>(j);
                } else if (d[j] < next) {
                    next = d[j];
                }
            }
            if (arg != labels[i]) moved[ch].emplace_back(i, labels[i]);
            labels[i] = arg;
            upper[i] = std::sqrt(best);
            lower[i] = std::sqrt(next);
        }
    });
    Moves all;
    for (auto& m : moved) all.insert(all.end(), m.begin(), m.end());
    return all;
}

// Exact squared distance of every row to its own centroid.
std::vector<double> own_distances(const Matrix& X, const Matrix& C, const Labels& labels) {
    std::vector<double> d(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i)
        d[i] = simd::active().squared_distance(C.row(static_cast<std::size_t>(labels[i])).data(), X.row(i).data(), X.cols());
    return d;
}

// k-means++ with a few greedy candidates per step.
Matrix seed_centroids(const Matrix& X, std::size_t k, Rng& rng) {
    const std::size_t n = X.rows(), p = X.cols();
    const auto& kern = simd::active();
    Matrix C(k, p);
    std::size_t first = uniform_index(rng, n);
    std::copy_n(X.row(first).data(), p, C.row(0).data());
    std::vector<double> d2(n);
    kern.squared_distance_rows(X.data(), n, p, C.row(0).data(), d2.data());
    const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
    std::vector<double> cand_d2(n), best_d2(n);
    for (std::size_t c = 1; c < k; ++c) {
        double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        double best_pot = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            std::size_t idx;
            if (total > 0.0) {
                double r = uniform01(rng) * total, acc = 0.0;
                idx = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (acc > r) {
                        idx = i;
                        break;
                    }
                }
            } else {
                idx = uniform_index(rng, n);
            }
            double pot = 0.0;
            kern.squared_distance_rows(X.data(), n, p, X.row(idx).data(), cand_d2.data());
            for (std::size_t i = 0; i < n; ++i) {
                cand_d2[i] = std::min(d2[i], cand_d2[i]);
                pot += cand_d2[i];
            }
            if (pot < best_pot) {
                best_pot = pot;
                best_idx = idx;
                best_d2.swap(cand_d2);
            }
        }
        std::copy_n(X.row(best_idx).data(), p, C.row(c).data());
        d2.swap(best_d2);
        best_d2.resize(n);
    }
    return C;
}

KMeansModel lloyd(const Matrix& X, std::size_t k, std::uint64_t seed, const KMeansOptions& opt) {
    const std::size_t n = X.rows(), p = X.cols();
    const auto& kern = simd::active();
    Rng rng(seed);
    KMeansModel m;
    m.k = k;
    m.seed = seed;
    m.centroids = seed_centroids(X, k, rng);
    Assignment a;
    std::vector<double> lower;
    nearest(X, m.centroids, a, &lower);
    std::vector<double> upper(n);
    for (std::size_t i = 0; i < n; ++i) upper[i] = std::sqrt(a.dist[i]);
    Labels labels = std::move(a.labels);
    double prev = a.inertia;
    // Per-cluster row count, sum and sum of squared norms, updated from the
    // rows that move. Inertia follows from these without touching every row:
    // sum |x - c|^2 = sq - 2 c.sum + count |c|^2.
    Matrix sums(k, p);
    std::vector<std::size_t> count(k, 0);
    std::vector<double> sq(k, 0.0);
    auto add_row = [&](std::size_t i, std::size_t c, double sign) {
        kern.axpy(sign, X.row(i).data(), sums.row(c).data(), p);
        sq[c] += sign * kern.dot(X.row(i).data(), X.row(i).data(), p);
    };
    for (std::size_t i = 0; i < n; ++i) {
        auto c = static_cast<std::size_t>(labels[i]);
        ++count[c];
        add_row(i, c, 1.0);
    }
    std::vector<double> moved_by(k);
    std::size_t it = 0;
    while (it < opt.max_iter) {
        ++it;
        Matrix next = sums;
        std::vector<double> dist;
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] == 0) {
                // Empty: move to the row farthest from its own centroid.
                if (dist.empty()) dist = own_distances(X, m.centroids, labels);
                auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
                std::copy_n(X.row(far).data(), p, next.row(c).data());
                dist[far] = 0.0;
                continue;
            }
            for (std::size_t j = 0; j < p; ++j) next(c, j) /= static_cast<double>(count[c]);
        }
        for (std::size_t c = 0; c < k; ++c)
            moved_by[c] = std::sqrt(kern.squared_distance(next.row(c).data(), m.centroids.row(c).data(), p));
        const double shift = *std::max_element(moved_by.begin(), moved_by.end());
        m.centroids = std::move(next);
        auto moves = nearest_bounded(X, m.centroids, moved_by, labels, upper, lower);
        for (auto [i, from] : moves) {
            auto to = static_cast<std::size_t>(labels[i]);
            --count[static_cast<std::size_t>(from)];
            ++count[to];
            add_row(i, static_cast<std::size_t>(from), -1.0);
            add_row(i, to, 1.0);
        }
        double inertia = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] == 0) continue;
            const double* cc = m.centroids.row(c).data();
            inertia += sq[c] - 2.0 * kern.dot(cc, sums.row(c).data(), p) +
                       static_cast<double>(count[c]) * kern.dot(cc, cc, p);
        }
        inertia = std::max(inertia, 0.0);
        // Tolerance covers the rounding of the running sums.
        if (inertia > prev * (1.0 + 1e-9) + 1e-300)
            throw Error("k-means inertia increased between iterations");
        prev = inertia;
        if (moves.empty() || shift < opt.tol) break;
    }
    m.iterations = it;
    auto dist = own_distances(X, m.centroids, labels);
    m.inertia = std::accumulate(dist.begin(), dist.end(), 0.0);
    m.labels = std::move(labels);
    return m;
}

void canonicalize(const Matrix& X, KMeansModel& m) {
    std::vector<std::size_t> size(m.k, 0);
    for (int l : m.labels) ++size[static_cast<std::size_t>(l)];
    std::vector<std::size_t> order(m.k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return size[a] > size[b]; });
    bool identity = std::is_sorted(order.begin(), order.end());
    if (identity) return;
    m.centroids = m.centroids.select_rows(order);
    Assignment a;
    nearest(X, m.centroids, a);
    m.labels = std::move(a.labels);
    m.inertia = a.inertia;
}

}  // namespace

KMeansModel kmeans_fit(const Matrix& X, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
    if (X.empty()) throw InputError("k-means: empty matrix");
    if (k == 0) throw InputError("k-means: K must be at least 1");
    if (k > X.rows()) throw InputError("k-means: K exceeds the number of rows");
    for (double v : X.values())
        if (!std::isfinite(v)) throw InputError("k-means: non-finite value");
    const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
    std::vector<KMeansModel> fits(restarts);
    parallel_for(restarts, [&](std::size_t r) { fits[r] = lloyd(X, k, derive_seed(seed, "kmeans-restart", r), options); });
    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r)
        if (fits[r].inertia < fits[best].inertia) best = r;
    KMeansModel m = std::move(fits[best]);
    m.seed = seed;
    canonicalize(X, m);
    return m;
}

PatternAssignment assign_patterns(const KMeansModel& model, const Matrix& X) {
    if (X.cols() != model.centroids.cols()) throw InputError("assign_patterns: dimension mismatch");
    Assignment a;
    nearest(X, model.centroids, a);
    PatternAssignment out;
    out.labels = std::move(a.labels);
    out.sizes.assign(model.k, 0);
    for (int l : out.labels) ++out.sizes[static_cast<std::size_t>(l)];
    return out;
}

double within_cluster_ss(const Matrix& X, const Labels& labels, std::size_t k) {
    const std::size_t p = X.cols();
    Matrix c(k, p);
    std::vector<double> count(k, 0.0);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        auto l = static_cast<std::size_t>(labels[i]);
        count[l] += 1.0;
        for (std::size_t j = 0; j < p; ++j) c(l, j) += X(i, j);
    }
    for (std::size_t l = 0; l < k; ++l)
        for (std::size_t j = 0; j < p; ++j) c(l, j) = count[l] > 0 ? c(l, j) / count[l] : 0.0;
    double w = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i)
        w += simd::active().squared_distance(X.row(i).data(), c.row(static_cast<std::size_t>(labels[i])).data(), p);
    return w;
}

nlohmann::json KMeansModel::to_json() const {
    nlohmann::json c = nlohmann::json::array();
    for (std::size_t r = 0; r < centroids.rows(); ++r) {
        auto row = centroids.row(r);
        c.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return {{"k", k}, {"inertia", inertia}, {"iterations", iterations}, {"seed", seed}, {"centroids", c}};
}

}  // namespace stratify::clustering
