#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace oracle {
namespace {

struct Groups {
    std::vector<std::vector<std::size_t>> members;
    Matrix centroids;
    std::vector<double> mean;
};

Groups groups(const Matrix& X, const Labels& l, std::size_t k) {
    Groups g;
    g.members.resize(k);
    for (std::size_t i = 0; i < l.size(); ++i) g.members[static_cast<std::size_t>(l[i])].push_back(i);
    g.centroids = Matrix(k, X.cols());
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < X.cols(); ++j) {
            double s = 0;
            for (auto i : g.members[c]) s += X(i, j);
            g.centroids(c, j) = s / static_cast<double>(g.members[c].size());
        }
    g.mean.assign(X.cols(), 0.0);
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < X.cols(); ++j) g.mean[j] += X(i, j) / static_cast<double>(X.rows());
    return g;
}

double sq(double v) { return v * v; }

double trace_w(const Matrix& X, const Labels& l, std::size_t k) {
    auto g = groups(X, l, k);
    double s = 0;
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < X.cols(); ++j) s += sq(X(i, j) - g.centroids(static_cast<std::size_t>(l[i]), j));
    return s;
}

struct PairSums {
    double sw = 0, sb = 0;
    double nw = 0, nb = 0;
    std::vector<double> all;
};

PairSums pairs(const Matrix& X, const Labels& l) {
    PairSums p;
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = i + 1; j < X.rows(); ++j) {
            double d = euclid(X.row(i), X.row(j));
            p.all.push_back(d);
            if (l[i] == l[j]) {
                p.sw += d;
                p.nw += 1;
            } else {
                p.sb += d;
                p.nb += 1;
            }
        }
    return p;
}

}  // namespace

double euclid(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += sq(a[i] - b[i]);
    return std::sqrt(s);
}

double mann_whitney_auc(const std::vector<int>& y, const std::vector<double>& s) {
    double wins = 0, total = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j] != 0) continue;
            total += 1;
            if (s[i] > s[j]) wins += 1;
            else if (s[i] == s[j]) wins += 0.5;
        }
    }
    return wins / total;
}

double partition_cost(const Matrix& X, const Labels& labels, std::size_t k) { return trace_w(X, labels, k); }

double best_two_partition_cost(const Matrix& X) {
    const std::size_t n = X.rows();
    double best = std::numeric_limits<double>::infinity();
    // Row 0 always in group 0, so each partition is seen once.
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
        Labels l(n, 0);
        for (std::size_t i = 1; i < n; ++i) l[i] = (mask >> (i - 1)) & 1 ? 1 : 0;
        best = std::min(best, trace_w(X, l, 2));
    }
    return best;
}

double silhouette(const Matrix& X, const Labels& l, std::size_t k) {
    const std::size_t n = X.rows();
    std::vector<std::size_t> size(k, 0);
    for (int v : l) ++size[static_cast<std::size_t>(v)];
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto own = static_cast<std::size_t>(l[i]);
        if (size[own] == 1) continue;  // contributes 0
        std::vector<double> sum(k, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sum[static_cast<std::size_t>(l[j])] += euclid(X.row(i), X.row(j));
        double a = sum[own] / static_cast<double>(size[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c)
            if (c != own) b = std::min(b, sum[c] / static_cast<double>(size[c]));
        double m = std::max(a, b);
        total += m > 0 ? (b - a) / m : 0.0;
    }
    return total / static_cast<double>(n);
}

double calinski_harabasz(const Matrix& X, const Labels& l, std::size_t k) {
    auto g = groups(X, l, k);
    double B = 0;
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < X.cols(); ++j)
            B += static_cast<double>(g.members[c].size()) * sq(g.centroids(c, j) - g.mean[j]);
    double W = trace_w(X, l, k);
    auto n = static_cast<double>(X.rows()), K = static_cast<double>(k);
    return (B / (K - 1)) / (W / (n - K));
}

double davies_bouldin(const Matrix& X, const Labels& l, std::size_t k) {
    auto g = groups(X, l, k);
    std::vector<double> s(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        for (auto i : g.members[c]) s[c] += euclid(X.row(i), g.centroids.row(c));
        s[c] /= static_cast<double>(g.members[c].size());
    }
    double total = 0;
    for (std::size_t a = 0; a < k; ++a) {
        double worst = 0;
        for (std::size_t b = 0; b < k; ++b)
            if (a != b) worst = std::max(worst, (s[a] + s[b]) / euclid(g.centroids.row(a), g.centroids.row(b)));
        total += worst;
    }
    return total / static_cast<double>(k);
}

double dunn(const Matrix& X, const Labels& l, std::size_t) {
    double min_between = std::numeric_limits<double>::infinity(), max_diam = 0;
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = i + 1; j < X.rows(); ++j) {
            double d = euclid(X.row(i), X.row(j));
            if (l[i] == l[j]) max_diam = std::max(max_diam, d);
            else min_between = std::min(min_between, d);
        }
    return min_between / max_diam;
}

double c_index(const Matrix& X, const Labels& l, std::size_t) {
    auto p = pairs(X, l);
    auto sorted = p.all;
    std::sort(sorted.begin(), sorted.end());
    auto nw = static_cast<std::size_t>(p.nw);
    double smin = 0, smax = 0;
    for (std::size_t i = 0; i < nw; ++i) {
        smin += sorted[i];
        smax += sorted[sorted.size() - 1 - i];
    }
    return (p.sw - smin) / (smax - smin);
}

double mcclain(const Matrix& X, const Labels& l, std::size_t) {
    auto p = pairs(X, l);
    return (p.sw / p.nw) / (p.sb / p.nb);
}

double point_biserial(const Matrix& X, const Labels& l, std::size_t) {
    auto p = pairs(X, l);
    double nt = p.nw + p.nb;
    double mean = std::accumulate(p.all.begin(), p.all.end(), 0.0) / nt;
    double ss = 0;
    for (double d : p.all) ss += sq(d - mean);
    double sd = std::sqrt(ss / (nt - 1));
    return (p.sb / p.nb - p.sw / p.nw) * std::sqrt(p.nw * p.nb / (nt * nt)) / sd;
}

double ball(const Matrix& X, const Labels& l, std::size_t k) { return trace_w(X, l, k) / static_cast<double>(k); }

double hartigan(const Matrix& X, const Labels& l, std::size_t k, double w_next) {
    double w = trace_w(X, l, k);
    return (w / w_next - 1.0) * (static_cast<double>(X.rows()) - static_cast<double>(k) - 1.0);
}

double krzanowski_lai(const Matrix& X, const Labels& l, std::size_t k, double w_prev, double w_next) {
    double p = static_cast<double>(X.cols()), K = static_cast<double>(k);
    double w = trace_w(X, l, k);
    double diff_k = std::pow(K - 1, 2.0 / p) * w_prev - std::pow(K, 2.0 / p) * w;
    double diff_next = std::pow(K, 2.0 / p) * w - std::pow(K + 1, 2.0 / p) * w_next;
    return std::abs(diff_k / diff_next);
}

std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                     double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double keep = x[i];
        x[i] = keep + h;
        double up = f(x);
        x[i] = keep - h;
        double down = f(x);
        x[i] = keep;
        g[i] = (up - down) / (2 * h);
    }
    return g;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += sq(a[i] - b[i]);
        den += sq(a[i]) + sq(b[i]);
    }
    return den == 0 ? 0.0 : std::sqrt(num) / std::sqrt(den);
}

std::vector<double> shapley_permutations(const std::function<double(std::span<const double>)>& f,
                                         std::span<const double> x, const Matrix& background) {
    const std::size_t p = x.size();
    std::map<std::uint32_t, double> memo;
    auto value = [&](std::uint32_t mask) {
        auto it = memo.find(mask);
        if (it != memo.end()) return it->second;
        double s = 0;
        std::vector<double> z(p);
        for (std::size_t b = 0; b < background.rows(); ++b) {
            for (std::size_t j = 0; j < p; ++j) z[j] = (mask >> j) & 1 ? x[j] : background(b, j);
            s += f(z);
        }
        s /= static_cast<double>(background.rows());
        memo[mask] = s;
        return s;
    };
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> phi(p, 0.0);
    double count = 0;
    do {
        std::uint32_t mask = 0;
        double prev = value(0);
        for (auto j : order) {
            mask |= 1u << j;
            double cur = value(mask);
            phi[j] += cur - prev;
            prev = cur;
        }
        count += 1;
    } while (std::next_permutation(order.begin(), order.end()));
    for (auto& v : phi) v /= count;
    return phi;
}

double quadratic_leaf_minimiser(const std::vector<double>& g, const std::vector<double>& h, double lambda) {
    auto derivative = [&](double w) {
        double d = lambda * w;
        for (std::size_t i = 0; i < g.size(); ++i) d += g[i] + h[i] * w;
        return d;
    };
    double lo = -1e6, hi = 1e6;
    for (int it = 0; it < 400; ++it) {
        double mid = lo + (hi - lo) / 2;
        if (mid == lo || mid == hi) break;
        (derivative(mid) > 0 ? hi : lo) = mid;
    }
    // Closest of the two bracketing doubles.
    return std::abs(derivative(lo)) <= std::abs(derivative(hi)) ? lo : hi;
}

double chi2_2x2(double a, double b, double c, double d) {
    double n = a + b + c + d;
    return n * sq(a * d - b * c) / ((a + b) * (c + d) * (a + c) * (b + d));
}

}  // namespace oracle
