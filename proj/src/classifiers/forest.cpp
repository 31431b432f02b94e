#include <cmath>
#include <numeric>

#include "stratify/classifiers/models.hpp"
#include "stratify/core/parallel.hpp"

namespace stratify::classifiers {

TreeModel fit_tree(const Matrix& X, const Labels& y, const TreeParams& p) {
    CartOptions opt;
    opt.constraints = {p.min_samples_split, p.min_samples_leaf};
    opt.max_depth = p.max_depth;
    std::vector<std::size_t> rows(X.rows());
    std::iota(rows.begin(), rows.end(), 0);
    Rng unused(0);
    return {grow_cart(X, y, std::move(rows), opt, unused)};
}

ForestModel fit_forest(const Matrix& X, const Labels& y, const ForestParams& p, std::uint64_t seed) {
    CartOptions opt;
    opt.constraints = {p.min_samples_split, p.min_samples_leaf};
    opt.max_depth = p.max_depth;
    opt.max_features = p.max_features > 0
                           ? p.max_features
                           : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols()))));
    const std::size_t n = X.rows();
    ForestModel m;
    m.trees.resize(p.n_estimators);
    parallel_for(p.n_estimators, [&](std::size_t t) {
        Rng rng(derive_seed(seed, "forest-tree", t));
        std::vector<std::size_t> rows(n);
        if (p.bootstrap) {
            for (auto& r : rows) r = uniform_index(rng, n);
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        m.trees[t] = grow_cart(X, y, std::move(rows), opt, rng);
    });
    return m;
}

double score(const ForestModel& m, std::span<const double> x) {
    double s = 0.0;
    for (const auto& t : m.trees) s += t.predict(x);
    return s / static_cast<double>(m.trees.size());
}

}  // namespace stratify::classifiers
