#include <algorithm>
#include <cmath>
#include <numeric>

#include "stratify/classifiers/tree.hpp"
#include "stratify/core/error.hpp"

namespace stratify::classifiers {

std::size_t Tree::leaf_index(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return i;
}

double Tree::predict(std::span<const double> x) const { return nodes[leaf_index(x)].value; }

std::size_t Tree::depth() const {
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        best = std::max(best, d[i]);
        if (!nodes[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        }
    }
    return best;
}

nlohmann::json Tree::to_json() const {
    std::vector<int> feature, left, right;
    std::vector<double> threshold, value, gain, cover;
    for (const auto& n : nodes) {
        feature.push_back(n.feature);
        left.push_back(n.left);
        right.push_back(n.right);
        threshold.push_back(n.threshold);
        value.push_back(n.value);
        gain.push_back(n.gain);
        cover.push_back(n.cover);
    }
    return {{"feature", feature}, {"threshold", threshold}, {"left", left},  {"right", right},
            {"value", value},     {"gain", gain},           {"cover", cover}};
}

Tree Tree::from_json(const nlohmann::json& j) {
    auto feature = j.at("feature").get<std::vector<int>>();
    auto left = j.at("left").get<std::vector<int>>();
    auto right = j.at("right").get<std::vector<int>>();
    auto threshold = j.at("threshold").get<std::vector<double>>();
    auto value = j.at("value").get<std::vector<double>>();
    auto gain = j.at("gain").get<std::vector<double>>();
    auto cover = j.at("cover").get<std::vector<double>>();
    Tree t;
    const std::size_t n = feature.size();
    if (left.size() != n || right.size() != n || threshold.size() != n || value.size() != n || n == 0)
        throw InputError("tree: inconsistent node arrays");
    for (std::size_t i = 0; i < n; ++i) {
        TreeNode node{feature[i], threshold[i], left[i], right[i], value[i], gain[i], cover[i]};
        if (!node.is_leaf()) {
            auto ok = [n](int c) { return c > 0 && static_cast<std::size_t>(c) < n; };
            if (!ok(node.left) || !ok(node.right) || !std::isfinite(node.threshold))
                throw InputError("tree: malformed internal node");
        }
        t.nodes.push_back(node);
    }
    return t;
}

double TreeEnsemble::predict(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : trees) s += t.predict(x);
    return base + scale * s;
}

double gini_impurity(double negatives, double positives) {
    if (negatives < 0 || positives < 0) throw InputError("gini: negative count");
    double n = negatives + positives;
    if (n == 0) throw InputError("gini: empty node");
    double p0 = negatives / n, p1 = positives / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

std::optional<Split> best_split(const Matrix& X, const Labels& y, std::span<const std::size_t> rows,
                                std::span<const std::size_t> features, const SplitConstraints& c) {
    const std::size_t n = rows.size();
    if (n < c.min_samples_split || n < 2 * c.min_samples_leaf) return std::nullopt;
    double pos = 0;
    for (auto r : rows) pos += y[r];
    if (pos == 0 || pos == static_cast<double>(n)) return std::nullopt;
    const double dn = static_cast<double>(n);
    const double parent = gini_impurity(dn - pos, pos);

    std::optional<Split> best;
    std::vector<std::pair<double, int>> col(n);
    for (std::size_t f : features) {
        for (std::size_t i = 0; i < n; ++i) col[i] = {X(rows[i], f), y[rows[i]]};
        std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        double left_pos = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_pos += col[i].second;
            if (!(col[i].first < col[i + 1].first)) continue;
            std::size_t nl = i + 1, nr = n - nl;
            if (nl < c.min_samples_leaf || nr < c.min_samples_leaf) continue;
            double dl = static_cast<double>(nl), dr = static_cast<double>(nr);
            double gl = 1.0 - (left_pos / dl) * (left_pos / dl) - ((dl - left_pos) / dl) * ((dl - left_pos) / dl);
            double rp = pos - left_pos;
            double gr = 1.0 - (rp / dr) * (rp / dr) - ((dr - rp) / dr) * ((dr - rp) / dr);
            double decrease = parent - dl / dn * gl - dr / dn * gr;
            if (decrease > 0 && (!best || decrease > best->decrease)) {
                double mid = col[i].first + (col[i + 1].first - col[i].first) / 2.0;
                if (!(mid < col[i + 1].first)) mid = col[i].first;
                best = Split{f, mid, decrease};
            }
        }
    }
    return best;
}

Tree grow_cart(const Matrix& X, const Labels& y, std::vector<std::size_t> rows, const CartOptions& options, Rng& rng) {
    if (rows.empty()) throw InputError("cart: no training rows");
    const std::size_t p = X.cols();
    const bool subsample = options.max_features > 0 && options.max_features < p;
    Tree tree;
    struct Pending {
        std::size_t node;
        std::vector<std::size_t> rows;
        std::size_t depth;
    };
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::move(rows), 0});
    std::vector<std::size_t> all(p);
    std::iota(all.begin(), all.end(), 0);
    while (!stack.empty()) {
        Pending cur = std::move(stack.back());
        stack.pop_back();
        double pos = 0;
        for (auto r : cur.rows) pos += y[r];
        const double n = static_cast<double>(cur.rows.size());
        TreeNode& node = tree.nodes[cur.node];
        node.value = pos / n;
        node.cover = n;
        if (options.max_depth > 0 && cur.depth >= options.max_depth) continue;
        std::vector<std::size_t> feats = all;
        if (subsample) {
            shuffle(feats.begin(), feats.end(), rng);
            feats.resize(options.max_features);
            std::sort(feats.begin(), feats.end());
        }
        auto split = best_split(X, y, cur.rows, feats, options.constraints);
        if (!split) continue;
        std::vector<std::size_t> l, r;
        for (auto i : cur.rows) (X(i, split->feature) <= split->threshold ? l : r).push_back(i);
        auto li = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& parent = tree.nodes[cur.node];
        parent.feature = static_cast<int>(split->feature);
        parent.threshold = split->threshold;
        parent.left = li;
        parent.right = li + 1;
        parent.gain = split->decrease * n;
        stack.push_back({static_cast<std::size_t>(li + 1), std::move(r), cur.depth + 1});
        stack.push_back({static_cast<std::size_t>(li), std::move(l), cur.depth + 1});
    }
    return tree;
}

}  // namespace stratify::classifiers
