#include "stratify/clustering/select_k.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stratify/core/error.hpp"
#include "stratify/core/random.hpp"

namespace stratify::clustering {
namespace {

std::optional<std::size_t> vote(SelectionRule rule, const std::vector<std::size_t>& ks, const std::vector<double>& v) {
    std::optional<std::size_t> best;
    double best_value = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        double score;
        if (rule == SelectionRule::max_difference) {
            if (i == 0 || std::isnan(v[i]) || std::isnan(v[i - 1])) continue;
            score = std::abs(v[i] - v[i - 1]);
        } else {
            score = rule == SelectionRule::minimum ? -v[i] : v[i];
        }
        if (std::isnan(score)) continue;
        if (!best || score > best_value) {
            best = ks[i];
            best_value = score;
        }
    }
    return best;
}

}  // namespace

std::size_t majority_vote(const std::map<ValidityIndex, std::optional<std::size_t>>& votes,
                          std::map<std::size_t, std::size_t>* tally) {
    std::map<std::size_t, std::size_t> t;
    for (const auto& [id, k] : votes)
        if (k) ++t[*k];
    if (t.empty()) throw DegenerateError("no validity index could vote");
    std::size_t winner = 0, most = 0;
    for (const auto& [k, c] : t)  // ascending K, so ties keep the smaller one
        if (c > most) {
            winner = k;
            most = c;
        }
    if (tally) *tally = t;
    return winner;
}

KSelectionReport select_k(const Matrix& X, const KSelectOptions& options, std::uint64_t seed) {
    if (options.indices.empty()) throw InputError("select_k: empty index set");
    const std::size_t n = X.rows();
    if (options.k_min < 2 || options.k_max < options.k_min || options.k_max + 1 > n)
        throw InputError("select_k: K range must lie within [2, n-1]");

    KSelectionReport rep;
    for (std::size_t k = options.k_min; k <= options.k_max; ++k) rep.ks.push_back(k);

    // Fits for K-1 .. K+1 around the range feed Hartigan and Krzanowski-Lai.
    const std::size_t lo = options.k_min - 1, hi = options.k_max + 1;
    std::map<std::size_t, KMeansModel> fits;
    for (std::size_t k = lo; k <= hi; ++k)
        fits[k] = kmeans_fit(X, k, derive_seed(seed, "select-k", k), options.kmeans);

    bool need_pairs = std::any_of(options.indices.begin(), options.indices.end(), uses_pairwise_distances);
    std::vector<std::size_t> sample(n);
    std::iota(sample.begin(), sample.end(), 0);
    if (n > options.index_sample_size) {
        Rng rng(derive_seed(seed, "index-sample"));
        shuffle(sample.begin(), sample.end(), rng);
        sample.resize(options.index_sample_size);
        std::sort(sample.begin(), sample.end());
    }
    rep.sample_size = sample.size();
    Matrix Xs = X.select_rows(sample);
    std::optional<PairwiseDistances> D;
    if (need_pairs) D.emplace(Xs);

    for (auto id : options.indices) rep.values[id].assign(rep.ks.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < rep.ks.size(); ++i) {
        std::size_t k = rep.ks[i];
        const auto& m = fits.at(k);
        NeighbourDispersion nd{fits.at(k - 1).inertia, fits.at(k + 1).inertia};
        Labels sub_labels;
        std::vector<std::size_t> sub_size(k, 0);
        for (auto r : sample) {
            sub_labels.push_back(m.labels[r]);
            ++sub_size[static_cast<std::size_t>(m.labels[r])];
        }
        bool sub_ok = std::all_of(sub_size.begin(), sub_size.end(), [](std::size_t c) { return c > 0; });
        for (auto id : options.indices) {
            if (uses_pairwise_distances(id)) {
                // A cluster missing from the subsample leaves the index undefined.
                if (sub_ok) rep.values[id][i] = validity_index(Xs, sub_labels, k, id, nd, &*D);
            } else {
                rep.values[id][i] = validity_index(X, m.labels, k, id, nd);
            }
        }
    }
    for (auto id : options.indices) rep.votes[id] = vote(selection_rule(id), rep.ks, rep.values[id]);
    rep.winner = majority_vote(rep.votes, &rep.tally);
    for (auto k : rep.ks) rep.models.push_back(std::move(fits.at(k)));
    return rep;
}

const KMeansModel& KSelectionReport::model_for(std::size_t k) const {
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (ks[i] == k) return models.at(i);
    throw InputError("no model fitted for K=" + std::to_string(k));
}

nlohmann::json KSelectionReport::to_json() const {
    auto num = [](double v) -> nlohmann::json {
        if (std::isnan(v)) return nullptr;
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        return v;
    };
    nlohmann::json j;
    j["k_range"] = ks;
    j["winner"] = winner;
    j["index_sample_size"] = sample_size;
    nlohmann::json idx = nlohmann::json::object();
    for (const auto& [id, vals] : values) {
        nlohmann::json e;
        nlohmann::json per_k = nlohmann::json::object();
        for (std::size_t i = 0; i < ks.size(); ++i) per_k[std::to_string(ks[i])] = num(vals[i]);
        e["values"] = per_k;
        auto v = votes.at(id);
        e["vote"] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
        switch (selection_rule(id)) {
            case SelectionRule::maximum: e["rule"] = "max"; break;
            case SelectionRule::minimum: e["rule"] = "min"; break;
            case SelectionRule::max_difference: e["rule"] = "max_difference"; break;
        }
        idx[index_name(id)] = e;
    }
    j["indices"] = idx;
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [k, c] : tally) t[std::to_string(k)] = c;
    j["tally"] = t;
    return j;
}

}  // namespace stratify::clustering
