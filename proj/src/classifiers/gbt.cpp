#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "stratify/classifiers/models.hpp"
#include "stratify/core/error.hpp"
#include "stratify/core/parallel.hpp"

namespace stratify::classifiers {
namespace {

struct Candidate {
    double gain = 0.0;
    double threshold = 0.0;
    int feature = -1;
};

struct NodeStats {
    double G = 0.0, H = 0.0;
};

// Column values in ascending order with their row; the scan below reads these
// sequentially and touches only one RowState per entry.
struct SortedEntry {
    double v;
    std::uint32_t row;
};

struct RowState {
    double g, h;
    int node;  // frontier node, -1 once the row sits in a finished leaf
};

// One level-wise tree on gradient statistics.
Tree grow(const Matrix& X, const std::vector<std::vector<SortedEntry>>& sorted, std::vector<RowState>& rows,
          const GbtParams& p) {
    const std::size_t n = X.rows(), d = X.cols();
    Tree tree;
    tree.nodes.emplace_back();
    std::vector<std::size_t> frontier = {0};
    std::vector<NodeStats> stats(1);
    for (auto& r : rows) {
        r.node = 0;
        stats[0].G += r.g;
        stats[0].H += r.h;
    }
    auto finish = [&](std::size_t node) {
        auto& s = stats[node];
        tree.nodes[node].value = p.learning_rate * gbt_leaf_weight(s.G, s.H, p.lambda);
        tree.nodes[node].cover = s.H;
    };
    for (std::size_t depth = 0; depth < p.max_depth && !frontier.empty(); ++depth) {
        // Best split per (feature, frontier node), reduced in feature order.
        std::vector<std::vector<Candidate>> per_feature(d, std::vector<Candidate>(tree.nodes.size()));
        parallel_for(d, [&](std::size_t f) {
            auto& best = per_feature[f];
            std::vector<NodeStats> left(tree.nodes.size());
            std::vector<double> last(tree.nodes.size(), 0.0);
            std::vector<char> seen(tree.nodes.size(), 0);
            for (const auto& e : sorted[f]) {
                const RowState& r = rows[e.row];
                if (r.node < 0) continue;
                auto u = static_cast<std::size_t>(r.node);
                double v = e.v;
                if (seen[u] && v > last[u]) {
                    const auto& s = stats[u];
                    double GL = left[u].G, HL = left[u].H;
                    double GR = s.G - GL, HR = s.H - HL;
                    if (HL >= p.min_child_weight && HR >= p.min_child_weight) {
                        double gain = gbt_split_gain(GL, HL, GR, HR, p.lambda, p.gamma);
                        if (gain > best[u].gain) {
                            double mid = last[u] + (v - last[u]) / 2.0;
                            if (!(mid < v)) mid = last[u];
                            best[u] = {gain, mid, static_cast<int>(f)};
                        }
                    }
                }
                left[u].G += r.g;
                left[u].H += r.h;
                last[u] = v;
                seen[u] = 1;
            }
        });
        std::vector<std::size_t> next;
        std::vector<Candidate> chosen(tree.nodes.size());
        for (std::size_t u : frontier) {
            for (std::size_t f = 0; f < d; ++f)
                if (per_feature[f][u].feature >= 0 && per_feature[f][u].gain > chosen[u].gain) chosen[u] = per_feature[f][u];
            if (chosen[u].feature < 0) {
                finish(u);
                continue;
            }
            auto l = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            stats.resize(tree.nodes.size());
            auto& node = tree.nodes[u];
            node.feature = chosen[u].feature;
            node.threshold = chosen[u].threshold;
            node.left = l;
            node.right = l + 1;
            node.gain = chosen[u].gain;
            node.cover = stats[u].H;
            next.push_back(static_cast<std::size_t>(l));
            next.push_back(static_cast<std::size_t>(l + 1));
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto& r = rows[i];
            if (r.node < 0) continue;
            const auto& node = tree.nodes[static_cast<std::size_t>(r.node)];
            if (node.is_leaf()) {
                r.node = -1;
                continue;
            }
            int child = X(i, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
            r.node = child;
            stats[static_cast<std::size_t>(child)].G += r.g;
            stats[static_cast<std::size_t>(child)].H += r.h;
        }
        frontier = std::move(next);
    }
    for (std::size_t u : frontier) finish(u);
    return tree;
}

double log_loss(const std::vector<double>& F, const Labels& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        double z = F[i];
        s += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - y[i] * z;
    }
    return s / static_cast<double>(F.size());
}

}  // namespace

double gbt_split_gain(double GL, double HL, double GR, double HR, double lambda, double gamma) {
    double G = GL + GR, H = HL + HR;
    return 0.5 * (GL * GL / (HL + lambda) + GR * GR / (HR + lambda) - G * G / (H + lambda)) - gamma;
}

double GbtModel::margin(std::span<const double> x) const {
    double m = base_margin;
    for (const auto& t : trees) m += t.predict(x);
    return m;
}

GbtModel fit_gbt(const Matrix& X, const Labels& y, const GbtParams& p, TrainingInfo& info) {
    const std::size_t n = X.rows(), d = X.cols();
    double mean = 0.0;
    for (int v : y) mean += v;
    mean /= static_cast<double>(n);
    if (mean <= 0.0 || mean >= 1.0) throw DegenerateError("gradient boosting needs both classes");

    GbtModel m;
    m.base_margin = std::log(mean / (1.0 - mean));
    if (n > std::numeric_limits<std::uint32_t>::max()) throw InputError("gradient boosting: too many rows");
    std::vector<std::vector<SortedEntry>> sorted(d, std::vector<SortedEntry>(n));
    parallel_for(d, [&](std::size_t f) {
        for (std::size_t i = 0; i < n; ++i) sorted[f][i] = {X(i, f), static_cast<std::uint32_t>(i)};
        std::stable_sort(sorted[f].begin(), sorted[f].end(), [](const SortedEntry& a, const SortedEntry& b) { return a.v < b.v; });
    });

    std::vector<double> F(n, m.base_margin);
    std::vector<RowState> rows(n);
    info.loss_history.push_back(log_loss(F, y));
    const std::size_t rounds = std::min(p.n_estimators, p.max_iterations);
    for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = sigmoid(F[i]);
            rows[i].g = s - y[i];
            rows[i].h = s * (1.0 - s);
        }
        Tree t = grow(X, sorted, rows, p);
        for (std::size_t i = 0; i < n; ++i) F[i] += t.predict(X.row(i));
        m.trees.push_back(std::move(t));
        info.loss_history.push_back(log_loss(F, y));
        info.iterations = r + 1;
    }
    return m;
}

}  // namespace stratify::classifiers
