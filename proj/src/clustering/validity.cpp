#include "stratify/clustering/validity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stratify/clustering/kmeans.hpp"
#include "stratify/core/error.hpp"
#include "stratify/simd/kernels.hpp"

namespace stratify::clustering {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Summary {
    std::size_t n = 0, k = 0, p = 0;
    Matrix centroids;
    std::vector<double> count;
    double trW = 0.0;
};

Summary summarize(const Matrix& X, const Labels& labels, std::size_t k) {
    Summary s;
    s.n = X.rows();
    s.k = k;
    s.p = X.cols();
    s.centroids = Matrix(k, s.p);
    s.count.assign(k, 0.0);
    for (std::size_t i = 0; i < s.n; ++i) {
        auto l = static_cast<std::size_t>(labels[i]);
        s.count[l] += 1.0;
        for (std::size_t j = 0; j < s.p; ++j) s.centroids(l, j) += X(i, j);
    }
    for (std::size_t l = 0; l < k; ++l)
        for (std::size_t j = 0; j < s.p; ++j) s.centroids(l, j) /= s.count[l];
    for (std::size_t i = 0; i < s.n; ++i)
        s.trW += simd::active().squared_distance(X.row(i).data(), s.centroids.row(static_cast<std::size_t>(labels[i])).data(), s.p);
    return s;
}

double calinski(const Matrix& X, const Summary& s) {
    std::vector<double> mean(s.p, 0.0);
    for (std::size_t i = 0; i < s.n; ++i)
        for (std::size_t j = 0; j < s.p; ++j) mean[j] += X(i, j);
    for (auto& m : mean) m /= static_cast<double>(s.n);
    double trB = 0.0;
    for (std::size_t l = 0; l < s.k; ++l)
        trB += s.count[l] * simd::active().squared_distance(s.centroids.row(l).data(), mean.data(), s.p);
    double num = trB / static_cast<double>(s.k - 1);
    double den = s.trW / static_cast<double>(s.n - s.k);
    if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
    return num / den;
}

double davies_bouldin(const Matrix& X, const Labels& labels, const Summary& s) {
    std::vector<double> scatter(s.k, 0.0);
    for (std::size_t i = 0; i < s.n; ++i) {
        auto l = static_cast<std::size_t>(labels[i]);
        scatter[l] += std::sqrt(simd::active().squared_distance(X.row(i).data(), s.centroids.row(l).data(), s.p));
    }
    for (std::size_t l = 0; l < s.k; ++l) scatter[l] /= s.count[l];
    double total = 0.0;
    for (std::size_t a = 0; a < s.k; ++a) {
        double worst = 0.0;
        for (std::size_t b = 0; b < s.k; ++b) {
            if (a == b) continue;
            double d = std::sqrt(simd::active().squared_distance(s.centroids.row(a).data(), s.centroids.row(b).data(), s.p));
            double r = d > 0.0 ? (scatter[a] + scatter[b]) / d : kInf;
            worst = std::max(worst, r);
        }
        total += worst;
    }
    return total / static_cast<double>(s.k);
}

double silhouette(const Labels& labels, std::size_t k, const PairwiseDistances& D) {
    const std::size_t n = D.size();
    std::vector<double> size(k, 0.0);
    for (int l : labels) size[static_cast<std::size_t>(l)] += 1.0;
    std::vector<double> sums(k);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto own = static_cast<std::size_t>(labels[i]);
        if (size[own] <= 1.0) continue;
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sums[static_cast<std::size_t>(labels[j])] += D(i, j);
        double a = sums[own] / (size[own] - 1.0);
        double b = kInf;
        for (std::size_t l = 0; l < k; ++l)
            if (l != own) b = std::min(b, sums[l] / size[l]);
        double m = std::max(a, b);
        total += m > 0.0 ? (b - a) / m : 0.0;
    }
    return total / static_cast<double>(n);
}

struct PairStats {
    double sum_w = 0.0, sum_b = 0.0;
    double n_w = 0.0, n_b = 0.0;
    double min_between = kInf, max_within = 0.0;
};

PairStats pair_stats(const Labels& labels, const PairwiseDistances& D) {
    PairStats ps;
    const std::size_t n = D.size();
    const auto& d = D.condensed();
    std::size_t t = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++t) {
            if (labels[i] == labels[j]) {
                ps.sum_w += d[t];
                ps.n_w += 1.0;
                ps.max_within = std::max(ps.max_within, d[t]);
            } else {
                ps.sum_b += d[t];
                ps.n_b += 1.0;
                ps.min_between = std::min(ps.min_between, d[t]);
            }
        }
    return ps;
}

double pairwise_index(ValidityIndex id, const Labels& labels, std::size_t k, const PairwiseDistances& D) {
    if (id == ValidityIndex::silhouette) return silhouette(labels, k, D);
    PairStats ps = pair_stats(labels, D);
    switch (id) {
        case ValidityIndex::dunn:
            if (ps.max_within == 0.0) return kInf;
            return ps.min_between / ps.max_within;
        case ValidityIndex::c_index: {
            const auto& pre = D.sorted_prefix();
            auto nw = static_cast<std::size_t>(ps.n_w);
            std::size_t total = pre.size() - 1;
            double smin = pre[nw];
            double smax = pre[total] - pre[total - nw];
            if (smax == smin) return 0.0;
            return (ps.sum_w - smin) / (smax - smin);
        }
        case ValidityIndex::mcclain:
            if (ps.n_w == 0.0 || ps.sum_w == 0.0) return 0.0;
            return (ps.sum_w / ps.n_w) / (ps.sum_b / ps.n_b);
        case ValidityIndex::point_biserial: {
            double nt = ps.n_w + ps.n_b;
            double sd = D.sample_sd();
            if (ps.n_w == 0.0 || ps.n_b == 0.0 || sd == 0.0) return 0.0;
            double mw = ps.sum_w / ps.n_w, mb = ps.sum_b / ps.n_b;
            return (mb - mw) * std::sqrt(ps.n_w * ps.n_b / (nt * nt)) / sd;
        }
        default:
            break;
    }
    throw Error("not a pairwise index");
}

}  // namespace

const std::vector<ValidityIndex>& all_indices() {
    static const std::vector<ValidityIndex> ids = {
        ValidityIndex::silhouette, ValidityIndex::calinski_harabasz, ValidityIndex::davies_bouldin,
        ValidityIndex::dunn,       ValidityIndex::c_index,           ValidityIndex::mcclain,
        ValidityIndex::point_biserial, ValidityIndex::ball,          ValidityIndex::hartigan,
        ValidityIndex::krzanowski_lai,
    };
    return ids;
}

std::string index_name(ValidityIndex id) {
    switch (id) {
        case ValidityIndex::silhouette: return "silhouette";
        case ValidityIndex::calinski_harabasz: return "calinski_harabasz";
        case ValidityIndex::davies_bouldin: return "davies_bouldin";
        case ValidityIndex::dunn: return "dunn";
        case ValidityIndex::c_index: return "c_index";
        case ValidityIndex::mcclain: return "mcclain";
        case ValidityIndex::point_biserial: return "point_biserial";
        case ValidityIndex::ball: return "ball";
        case ValidityIndex::hartigan: return "hartigan";
        case ValidityIndex::krzanowski_lai: return "krzanowski_lai";
    }
    return "?";
}

ValidityIndex index_from_name(const std::string& name) {
    for (auto id : all_indices())
        if (index_name(id) == name) return id;
    throw InputError("unknown validity index '" + name + "'");
}

SelectionRule selection_rule(ValidityIndex id) {
    switch (id) {
        case ValidityIndex::davies_bouldin:
        case ValidityIndex::c_index:
        case ValidityIndex::mcclain:
            return SelectionRule::minimum;
        case ValidityIndex::ball:
        case ValidityIndex::hartigan:
            return SelectionRule::max_difference;
        default:
            return SelectionRule::maximum;
    }
}

bool uses_pairwise_distances(ValidityIndex id) {
    switch (id) {
        case ValidityIndex::silhouette:
        case ValidityIndex::dunn:
        case ValidityIndex::c_index:
        case ValidityIndex::mcclain:
        case ValidityIndex::point_biserial:
            return true;
        default:
            return false;
    }
}

PairwiseDistances::PairwiseDistances(const Matrix& X) : n_(X.rows()) {
    d_.resize(n_ * (n_ - (n_ > 0 ? 1 : 0)) / 2);
    std::size_t t = 0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            d_[t++] = std::sqrt(simd::active().squared_distance(X.row(i).data(), X.row(j).data(), X.cols()));
}

double PairwiseDistances::operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    // Offset of row i in the condensed upper triangle.
    std::size_t off = i * n_ - i * (i + 1) / 2;
    return d_[off + (j - i - 1)];
}

const std::vector<double>& PairwiseDistances::sorted_prefix() const {
    if (prefix_.empty()) {
        std::vector<double> s = d_;
        std::sort(s.begin(), s.end());
        prefix_.assign(s.size() + 1, 0.0);
        for (std::size_t i = 0; i < s.size(); ++i) prefix_[i + 1] = prefix_[i] + s[i];
    }
    return prefix_;
}

double PairwiseDistances::sample_sd() const {
    if (sd_ < 0.0) {
        double m = 0.0;
        for (double v : d_) m += v;
        m /= static_cast<double>(d_.size());
        double ss = 0.0;
        for (double v : d_) ss += (v - m) * (v - m);
        sd_ = d_.size() > 1 ? std::sqrt(ss / static_cast<double>(d_.size() - 1)) : 0.0;
    }
    return sd_;
}

double validity_index(const Matrix& X, const Labels& labels, std::size_t k, ValidityIndex id,
                      const NeighbourDispersion& neighbours, const PairwiseDistances* distances) {
    if (labels.size() != X.rows()) throw InputError("validity index: label count does not match rows");
    if (k < 2) throw InputError("validity index: K must be at least 2");
    std::vector<std::size_t> size(k, 0);
    for (int l : labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= k) throw InputError("validity index: label out of range");
        ++size[static_cast<std::size_t>(l)];
    }
    for (auto c : size)
        if (c == 0) throw InputError("validity index: empty cluster");

    if (uses_pairwise_distances(id)) {
        if (distances) {
            if (distances->size() != X.rows()) throw InputError("validity index: distance matrix size mismatch");
            return pairwise_index(id, labels, k, *distances);
        }
        PairwiseDistances D(X);
        return pairwise_index(id, labels, k, D);
    }

    Summary s = summarize(X, labels, k);
    const double n = static_cast<double>(s.n);
    const double K = static_cast<double>(k);
    switch (id) {
        case ValidityIndex::calinski_harabasz:
            if (s.n <= k) throw InputError("validity index: Calinski-Harabasz needs n > K");
            return calinski(X, s);
        case ValidityIndex::davies_bouldin:
            return davies_bouldin(X, labels, s);
        case ValidityIndex::ball:
            return s.trW / K;
        case ValidityIndex::hartigan: {
            if (!neighbours.next) throw InputError("validity index: Hartigan needs the K+1 dispersion");
            if (*neighbours.next == 0.0) return kInf;
            return (s.trW / *neighbours.next - 1.0) * (n - K - 1.0);
        }
        case ValidityIndex::krzanowski_lai: {
            if (!neighbours.prev || !neighbours.next)
                throw InputError("validity index: Krzanowski-Lai needs the K-1 and K+1 dispersions");
            double e = 2.0 / static_cast<double>(s.p);
            double diff_k = std::pow(K - 1.0, e) * *neighbours.prev - std::pow(K, e) * s.trW;
            double diff_k1 = std::pow(K, e) * s.trW - std::pow(K + 1.0, e) * *neighbours.next;
            if (diff_k1 == 0.0) return diff_k == 0.0 ? 0.0 : kInf;
            return std::abs(diff_k / diff_k1);
        }
        default:
            break;
    }
    throw Error("unhandled validity index");
}

}  // namespace stratify::clustering
