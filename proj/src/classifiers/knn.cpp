#include <algorithm>
#include <vector>

#include "stratify/classifiers/models.hpp"
#include "stratify/simd/kernels.hpp"

namespace stratify::classifiers {

double score(const KnnModel& m, std::span<const double> x) {
    const std::size_t n = m.X.rows();
    const std::size_t k = std::min(m.k, n);
    std::vector<double> d(n);
    simd::squared_distances(m.X, x, d);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    auto closer = [&](std::size_t a, std::size_t b) { return d[a] < d[b] || (d[a] == d[b] && a < b); };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), closer);
    std::size_t pos = 0;
    for (std::size_t t = 0; t < k; ++t) pos += static_cast<std::size_t>(m.y[idx[t]]);
    if (2 * pos == k) {
        double nudge = 1.0 / (2.0 * static_cast<double>(k + 1));
        return m.y[idx[0]] == 1 ? 0.5 + nudge : 0.5 - nudge;
    }
    return static_cast<double>(pos) / static_cast<double>(k);
}

}  // namespace stratify::classifiers
