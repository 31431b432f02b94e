#include <algorithm>
#include <cmath>
#include <numeric>

#include "stratify/core/error.hpp"
#include "stratify/core/random.hpp"
#include "stratify/dataset/dataset.hpp"

namespace stratify::dataset {

SplitIndices stratified_split(const Labels& y, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0)) throw InputError("split ratio must be positive: empty training set");
    if (!(ratio < 1.0)) throw InputError("split ratio must be below 1: empty test set");

    std::vector<std::size_t> members[2];
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 0 && y[i] != 1) throw InputError("labels must be 0 or 1");
        members[y[i]].push_back(i);
    }
    for (int c = 0; c < 2; ++c)
        if (members[c].empty()) throw InputError("class " + std::to_string(c) + " has no samples");

    const double n = static_cast<double>(y.size());
    auto target = static_cast<std::size_t>(std::llround(ratio * n));
    std::size_t take[2];
    double frac[2];
    for (int c = 0; c < 2; ++c) {
        double want = ratio * static_cast<double>(members[c].size());
        take[c] = static_cast<std::size_t>(std::floor(want));
        frac[c] = want - std::floor(want);
    }
    // Largest remainder; ties go to class 0.
    int order[2] = {0, 1};
    if (frac[1] > frac[0]) std::swap(order[0], order[1]);
    for (int c : order)
        if (take[0] + take[1] < target && take[c] < members[c].size()) ++take[c];

    SplitIndices out;
    out.seed = seed;
    for (int c = 0; c < 2; ++c) {
        Rng rng(derive_seed(seed, "split", static_cast<std::uint64_t>(c)));
        auto& m = members[c];
        shuffle(m.begin(), m.end(), rng);
        out.train.insert(out.train.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(take[c]));
        out.test.insert(out.test.end(), m.begin() + static_cast<std::ptrdiff_t>(take[c]), m.end());
    }
    if (out.test.empty()) throw InputError("empty test set");
    if (out.train.empty()) throw InputError("empty training set");
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

}  // namespace stratify::dataset
