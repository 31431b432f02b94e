#include "stratify/explain/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "stratify/core/error.hpp"
#include "stratify/core/parallel.hpp"

namespace stratify::explain {
namespace {

using classifiers::Tree;
using classifiers::TreeEnsemble;

const std::vector<double>& factorials() {
    static const std::vector<double> f = [] {
        std::vector<double> v(171, 1.0);
        for (std::size_t i = 1; i < v.size(); ++i) v[i] = v[i - 1] * static_cast<double>(i);
        return v;
    }();
    return f;
}

// Walks one tree for the pair (x, z). Along a path, features where x and z
// disagree are either forced into the coalition (x's branch, set A) or out of
// it (z's branch, set B). A leaf reached with |A| = a, |B| = b contributes
// v (a-1)! b! / (a+b)! to each feature of A and -v a! (b-1)! / (a+b)! to each of B.
struct PairWalker {
    const Tree& tree;
    std::span<const double> x, z;
    std::vector<char> state;  // 0 free, 1 in A, 2 in B
    std::vector<std::size_t> a_set, b_set;
    std::vector<double>& phi;
    double scale;

    void walk(std::size_t i) {
        const auto& node = tree.nodes[i];
        if (node.is_leaf()) {
            std::size_t a = a_set.size(), b = b_set.size();
            if (a + b == 0) return;
            const auto& f = factorials();
            double v = node.value * scale;
            if (a > 0) {
                double w = f[a - 1] * f[b] / f[a + b];
                for (auto j : a_set) phi[j] += v * w;
            }
            if (b > 0) {
                double w = f[a] * f[b - 1] / f[a + b];
                for (auto j : b_set) phi[j] -= v * w;
            }
            return;
        }
        auto j = static_cast<std::size_t>(node.feature);
        auto xs = static_cast<std::size_t>(x[j] <= node.threshold ? node.left : node.right);
        auto zs = static_cast<std::size_t>(z[j] <= node.threshold ? node.left : node.right);
        if (xs == zs) {
            walk(xs);
        } else if (state[j] == 1) {
            walk(xs);
        } else if (state[j] == 2) {
            walk(zs);
        } else {
            state[j] = 1;
            a_set.push_back(j);
            walk(xs);
            a_set.pop_back();
            state[j] = 2;
            b_set.push_back(j);
            walk(zs);
            b_set.pop_back();
            state[j] = 0;
        }
    }
};

}  // namespace

ImportanceRanking split_gain_importance(const TreeEnsemble& ensemble) {
    ImportanceRanking r;
    r.scores.assign(ensemble.n_features, 0.0);
    for (const auto& t : ensemble.trees)
        for (const auto& n : t.nodes)
            if (!n.is_leaf()) r.scores.at(static_cast<std::size_t>(n.feature)) += std::max(0.0, n.gain);
    double total = std::accumulate(r.scores.begin(), r.scores.end(), 0.0);
    if (total > 0)
        for (auto& s : r.scores) s /= total;
    r.order.resize(r.scores.size());
    std::iota(r.order.begin(), r.order.end(), 0);
    std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) { return r.scores[a] > r.scores[b]; });
    return r;
}

ImportanceRanking split_gain_importance(const classifiers::TrainedModel& model) {
    auto e = classifiers::as_tree_ensemble(model);
    if (!e) throw InputError("importance needs a tree model, got " + classifiers::algorithm_name(model.algorithm()));
    return split_gain_importance(*e);
}

ShapValues shap_bruteforce(const ScalarModel& f, std::span<const double> x, const Matrix& background,
                           std::size_t max_features) {
    const std::size_t p = x.size();
    if (p > max_features) throw InputError("shap_bruteforce: " + std::to_string(p) + " features exceed the guard of " +
                                           std::to_string(max_features));
    if (background.rows() == 0) throw InputError("shap_bruteforce: empty background");
    if (background.cols() != p) throw InputError("shap_bruteforce: background width does not match x");
    const std::size_t subsets = std::size_t{1} << p;
    std::vector<double> v(subsets, 0.0);
    parallel_for(subsets, [&](std::size_t mask) {
        std::vector<double> row(p);
        double s = 0.0;
        for (std::size_t b = 0; b < background.rows(); ++b) {
            for (std::size_t j = 0; j < p; ++j) row[j] = (mask >> j) & 1 ? x[j] : background(b, j);
            s += f(row);
        }
        v[mask] = s / static_cast<double>(background.rows());
    });
    const auto& fact = factorials();
    ShapValues out;
    out.phi.assign(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        for (std::size_t mask = 0; mask < subsets; ++mask) {
            if (mask & bit) continue;
            auto s = static_cast<std::size_t>(std::popcount(mask));
            double w = fact[s] * fact[p - s - 1] / fact[p];
            out.phi[i] += w * (v[mask | bit] - v[mask]);
        }
    }
    out.base = v[0];
    out.output = v[subsets - 1];
    return out;
}

ShapValues shap_tree_fast(const TreeEnsemble& ensemble, std::span<const double> x, const Matrix& background) {
    const std::size_t p = x.size();
    if (background.rows() == 0) throw InputError("shap_tree_fast: empty background");
    if (background.cols() != p || p != ensemble.n_features) throw InputError("shap_tree_fast: dimension mismatch");
    ShapValues out;
    out.phi.assign(p, 0.0);
    std::vector<double> acc(p);
    double base = 0.0;
    for (std::size_t b = 0; b < background.rows(); ++b) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (const auto& t : ensemble.trees) {
            PairWalker w{t, x, background.row(b), std::vector<char>(p, 0), {}, {}, acc, ensemble.scale};
            w.walk(0);
        }
        for (std::size_t j = 0; j < p; ++j) out.phi[j] += acc[j];
        base += ensemble.predict(background.row(b));
    }
    const double nb = static_cast<double>(background.rows());
    for (auto& v : out.phi) v /= nb;
    out.base = base / nb;
    out.output = ensemble.predict(x);
    return out;
}

ShapMatrix explain_rows(const TreeEnsemble& ensemble, const Matrix& rows, const Matrix& background,
                        std::vector<std::string> names) {
    ShapMatrix m;
    m.phi = Matrix(rows.rows(), rows.cols());
    m.features = rows;
    m.outputs.resize(rows.rows());
    m.names = std::move(names);
    if (m.names.size() != rows.cols()) throw InputError("explain_rows: one name per feature is required");
    std::vector<double> bases(rows.rows());
    parallel_for(rows.rows(), [&](std::size_t i) {
        auto r = shap_tree_fast(ensemble, rows.row(i), background);
        std::copy(r.phi.begin(), r.phi.end(), m.phi.row(i).begin());
        m.outputs[i] = r.output;
        bases[i] = r.base;
    });
    m.base = bases.empty() ? 0.0 : bases[0];
    return m;
}

std::vector<BeeswarmRow> beeswarm_export(const ShapMatrix& shap) {
    const std::size_t n = shap.phi.rows(), p = shap.phi.cols();
    std::vector<double> mean_abs(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) mean_abs[j] += std::abs(shap.phi(i, j));
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean_abs[a] > mean_abs[b]; });
    std::vector<BeeswarmRow> out;
    out.reserve(n * p);
    for (std::size_t j : order) {
        auto col = shap.features.column(j);
        std::vector<double> sorted = col;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i) {
            double pct = 0.5;
            if (n > 1) {
                auto lo = std::lower_bound(sorted.begin(), sorted.end(), col[i]) - sorted.begin();
                auto hi = std::upper_bound(sorted.begin(), sorted.end(), col[i]) - sorted.begin();
                pct = (static_cast<double>(lo) + static_cast<double>(hi - 1)) / 2.0 / static_cast<double>(n - 1);
            }
            out.push_back({shap.names[j], i, shap.phi(i, j), col[i], pct});
        }
    }
    return out;
}

}  // namespace stratify::explain
