#include "stratify/resampling/smote.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "stratify/core/csv.hpp"
#include "stratify/core/error.hpp"
#include "stratify/core/parallel.hpp"
#include "stratify/core/random.hpp"
#include "stratify/simd/kernels.hpp"

namespace stratify::resampling {
namespace {

// k nearest minority rows for each minority row, self excluded, ties by index.
std::vector<std::vector<std::size_t>> neighbours(const Matrix& X, const std::vector<std::size_t>& rows, std::size_t k) {
    const std::size_t m = rows.size();
    std::vector<std::vector<std::size_t>> out(m);
    parallel_for(m, [&](std::size_t a) {
        std::vector<std::pair<double, std::size_t>> d;
        d.reserve(m - 1);
        for (std::size_t b = 0; b < m; ++b)
            if (b != a) d.emplace_back(simd::squared_distance(X.row(rows[a]), X.row(rows[b])), b);
        std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
        for (std::size_t t = 0; t < k; ++t) out[a].push_back(d[t].second);
    });
    return out;
}

}  // namespace

ResampledTrainingSet smote(const Matrix& X, const Labels& y, const SmoteOptions& options, std::uint64_t seed) {
    if (X.rows() != y.size()) throw InputError("smote: label count does not match rows");
    if (!(options.target_ratio > 0.0)) throw InputError("smote: target ratio must be positive");
    std::size_t count[2] = {0, 0};
    for (int v : y) {
        if (v != 0 && v != 1) throw InputError("smote: labels must be 0 or 1");
        ++count[v];
    }
    if (count[0] == 0 || count[1] == 0) throw InputError("smote: both classes are required");

    ResampledTrainingSet out;
    out.X = X;
    out.y = y;
    out.synthetic.assign(X.rows(), false);
    out.original_rows = X.rows();
    out.seed = seed;
    out.minority_label = count[1] <= count[0] ? 1 : 0;
    const std::size_t minority = count[out.minority_label];
    const std::size_t majority = count[1 - out.minority_label];
    const auto target = static_cast<std::size_t>(std::ceil(options.target_ratio * static_cast<double>(majority) - 1e-9));
    if (minority >= target) return out;
    const std::size_t to_make = target - minority;

    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == out.minority_label) rows.push_back(i);

    const std::size_t p = X.cols();
    Matrix synth(to_make, p);
    out.origins.resize(to_make);
    if (rows.size() == 1) {
        out.duplicated = true;
        for (std::size_t s = 0; s < to_make; ++s) {
            std::copy_n(X.row(rows[0]).data(), p, synth.row(s).data());
            out.origins[s] = {rows[0], rows[0], 0.0};
        }
    } else {
        const std::size_t k = std::max<std::size_t>(1, std::min(options.k_neighbors, rows.size() - 1));
        auto nn = neighbours(X, rows, k);
        parallel_for(to_make, [&](std::size_t s) {
            Rng rng(derive_seed(seed, "smote", s));
            std::size_t a = uniform_index(rng, rows.size());
            std::size_t b = nn[a][uniform_index(rng, k)];
            double u = uniform01(rng);
            const double* xp = X.row(rows[a]).data();
            const double* xn = X.row(rows[b]).data();
            double* dst = synth.row(s).data();
            for (std::size_t j = 0; j < p; ++j) dst[j] = xp[j] + u * (xn[j] - xp[j]);
            out.origins[s] = {rows[a], rows[b], u};
        });
    }
    for (std::size_t s = 0; s < to_make; ++s) {
        out.X.append_row(synth.row(s));
        out.y.push_back(out.minority_label);
        out.synthetic.push_back(true);
    }
    return out;
}

void write_synthetic_csv(const ResampledTrainingSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    const std::size_t p = set.X.cols();
    for (std::size_t j = 0; j < p; ++j) out << 'x' << j << ',';
    out << "label,parent,neighbor,u\n";
    for (std::size_t s = 0; s < set.origins.size(); ++s) {
        auto row = set.X.row(set.original_rows + s);
        for (double v : row) out << csv::format_double(v) << ',';
        const auto& o = set.origins[s];
        out << set.minority_label << ',' << o.parent << ',' << o.neighbor << ',' << csv::format_double(o.u) << '\n';
    }
}

}  // namespace stratify::resampling
