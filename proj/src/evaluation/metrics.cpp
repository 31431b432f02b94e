#include "stratify/evaluation/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stratify/core/error.hpp"
#include "stratify/core/parallel.hpp"
#include "stratify/core/random.hpp"

namespace stratify::evaluation {
namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& undefined) {
    undefined = den == 0;
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double p, double r, bool& undefined) {
    undefined = p + r == 0.0;
    return undefined ? 0.0 : 2.0 * p * r / (p + r);
}

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x) {
    if (x <= 0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double sum = 1.0 / a, term = sum, ap = a;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Continued fraction, modified Lentz.
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json ConfusionMatrix::to_json() const { return {{"tp", tp}, {"fp", fp}, {"fn", fn}, {"tn", tn}}; }

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) throw InputError("confusion: length mismatch");
    if (y_true.empty()) throw InputError("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        int t = y_true[i], p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1)) throw InputError("confusion: labels must be 0 or 1");
        if (t == 1) (p == 1 ? cm.tp : cm.fn)++;
        else (p == 1 ? cm.fp : cm.tn)++;
    }
    return cm;
}

nlohmann::json MetricSet::to_json() const {
    nlohmann::json undefined = nlohmann::json::array();
    if (precision_undefined) undefined.push_back("precision");
    if (recall_undefined) undefined.push_back("recall");
    if (f1_undefined) undefined.push_back("f1");
    return {{"accuracy", accuracy}, {"precision", precision}, {"recall", recall}, {"f1", f1}, {"undefined", undefined}};
}

MetricSet metric_set(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw InputError("metric_set: empty confusion matrix");
    MetricSet m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    m.precision = ratio(cm.tp, cm.tp + cm.fp, m.precision_undefined);
    m.recall = ratio(cm.tp, cm.tp + cm.fn, m.recall_undefined);
    m.f1 = f1_of(m.precision, m.recall, m.f1_undefined);
    return m;
}

MetricSet weighted_metric_set(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw InputError("weighted_metric_set: empty confusion matrix");
    const double n = static_cast<double>(cm.total());
    ConfusionMatrix flipped{cm.tn, cm.fn, cm.fp, cm.tp};
    MetricSet pos = metric_set(cm), neg = metric_set(flipped);
    const double w1 = static_cast<double>(cm.tp + cm.fn), w0 = static_cast<double>(cm.tn + cm.fp);
    MetricSet m;
    m.accuracy = pos.accuracy;
    m.precision = (w1 * pos.precision + w0 * neg.precision) / n;
    // sum_c (n_c / n) * correct_c / n_c collapses to the accuracy.
    m.recall = pos.accuracy;
    m.f1 = (w1 * pos.f1 + w0 * neg.f1) / n;
    m.precision_undefined = (w1 > 0 && pos.precision_undefined) || (w0 > 0 && neg.precision_undefined);
    m.f1_undefined = (w1 > 0 && pos.f1_undefined) || (w0 > 0 && neg.f1_undefined);
    return m;
}

RocCurve roc_auc(std::span<const int> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size()) throw InputError("roc_auc: length mismatch");
    std::uint64_t P = 0, N = 0;
    for (int v : y_true) (v == 1 ? P : N)++;
    if (P == 0 || N == 0) throw DegenerateError("roc_auc: both classes are required");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve roc;
    roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::uint64_t tp = 0, fp = 0, prev_tp = 0, prev_fp = 0;
    // Twice the area in count units, exact in integers.
    unsigned __int128 area2 = 0;
    for (std::size_t i = 0; i < order.size();) {
        double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i) (y_true[order[i]] == 1 ? tp : fp)++;
        area2 += static_cast<unsigned __int128>(fp - prev_fp) * (tp + prev_tp);
        roc.points.push_back({static_cast<double>(fp) / static_cast<double>(N), static_cast<double>(tp) / static_cast<double>(P), s});
        prev_tp = tp;
        prev_fp = fp;
    }
    roc.auc = static_cast<double>(area2) / (2.0 * static_cast<double>(P) * static_cast<double>(N));
    return roc;
}

Quartiles quartiles(std::vector<double> v) {
    if (v.empty()) return {};
    std::sort(v.begin(), v.end());
    auto at = [&](double q) {
        double pos = q * static_cast<double>(v.size() - 1);
        auto lo = static_cast<std::size_t>(std::floor(pos));
        std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {at(0.25), at(0.5), at(0.75)};
}

RateDistributions bootstrap_rate_distributions(std::span<const int> y_true, std::span<const int> y_pred, std::size_t B,
                                               std::uint64_t seed, std::size_t max_retries) {
    if (B == 0) throw InputError("bootstrap: B must be at least 1");
    if (y_true.size() != y_pred.size()) throw InputError("bootstrap: length mismatch");
    const std::size_t n = y_true.size();
    bool seen[2] = {false, false};
    for (int v : y_true) seen[v == 1] = true;
    if (!seen[0] || !seen[1]) throw DegenerateError("bootstrap: both classes are required");
    RateDistributions out;
    out.fpr.resize(B);
    out.tpr.resize(B);
    std::vector<char> failed(B, 0);
    parallel_for(B, [&](std::size_t b) {
        Rng rng(derive_seed(seed, "bootstrap", b));
        for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
            std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
            for (std::size_t t = 0; t < n; ++t) {
                std::size_t i = uniform_index(rng, n);
                if (y_true[i] == 1) (y_pred[i] == 1 ? tp : fn)++;
                else (y_pred[i] == 1 ? fp : tn)++;
            }
            if (tp + fn == 0 || fp + tn == 0) continue;
            out.fpr[b] = static_cast<double>(fp) / static_cast<double>(fp + tn);
            out.tpr[b] = static_cast<double>(tp) / static_cast<double>(tp + fn);
            return;
        }
        failed[b] = 1;
    });
    if (std::any_of(failed.begin(), failed.end(), [](char f) { return f != 0; }))
        throw DegenerateError("bootstrap: retry bound exceeded; a class is too small to resample");
    out.fpr_summary = quartiles(out.fpr);
    out.tpr_summary = quartiles(out.tpr);
    return out;
}

double ContingencyTable::total() const {
    double s = 0.0;
    for (const auto& r : counts)
        for (double v : r) s += v;
    return s;
}

double chi_square_survival(double x, int df) {
    if (df < 1) throw InputError("chi-square: df must be positive");
    if (x <= 0) return 1.0;
    if (df == 1) return std::erfc(std::sqrt(x / 2.0));
    return gamma_q(df / 2.0, x / 2.0);
}

ChiSquareResult chi_square(const ContingencyTable& t, bool yates) {
    const std::size_t r = t.counts.size();
    if (r < 2) throw InputError("chi-square: at least two rows are required");
    const std::size_t c = t.counts[0].size();
    if (c < 2) throw InputError("chi-square: at least two columns are required");
    std::vector<double> rs(r, 0.0), cs(c, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        if (t.counts[i].size() != c) throw InputError("chi-square: ragged table");
        for (std::size_t j = 0; j < c; ++j) {
            if (t.counts[i][j] < 0) throw InputError("chi-square: negative count");
            rs[i] += t.counts[i][j];
            cs[j] += t.counts[i][j];
        }
    }
    double n = t.total();
    if (n <= 0) throw InputError("chi-square: empty table");
    for (double v : rs)
        if (v == 0) throw DegenerateError("chi-square: a row total is zero");
    for (double v : cs)
        if (v == 0) throw DegenerateError("chi-square: a column total is zero");
    const bool correct = yates && r == 2 && c == 2;
    ChiSquareResult res;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            double e = rs[i] * cs[j] / n;
            double d = std::abs(t.counts[i][j] - e);
            if (correct) d = std::max(0.0, d - 0.5);
            res.statistic += d * d / e;
        }
    res.df = static_cast<int>((r - 1) * (c - 1));
    res.p_value = chi_square_survival(res.statistic, res.df);
    return res;
}

ChiSquareResult chi_square_2x2(const std::array<std::array<double, 2>, 2>& table, bool yates) {
    ContingencyTable t;
    t.counts = {{table[0][0], table[0][1]}, {table[1][0], table[1][1]}};
    return chi_square(t, yates);
}

double cramers_v(double chi2, double n, std::size_t rows, std::size_t cols) {
    if (!(n > 0)) throw InputError("cramers_v: n must be positive");
    std::size_t m = std::min(rows, cols);
    if (m < 2) throw InputError("cramers_v: table must be at least 2x2");
    if (chi2 < 0) throw InputError("cramers_v: negative statistic");
    return std::min(1.0, std::sqrt(chi2 / (n * static_cast<double>(m - 1))));
}

nlohmann::json EvaluationReport::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["confusion"] = cm.to_json();
    j["positive_class"] = positive.to_json();
    j["weighted"] = weighted.to_json();
    j["auc"] = roc ? finite_or_null(roc->auc) : nlohmann::json(nullptr);
    if (rates) {
        auto q = [](const Quartiles& s) { return nlohmann::json{{"q1", s.q1}, {"median", s.median}, {"q3", s.q3}}; };
        j["bootstrap"] = {{"B", rates->fpr.size()}, {"fpr", q(rates->fpr_summary)}, {"tpr", q(rates->tpr_summary)}};
    } else {
        j["bootstrap"] = nullptr;
    }
    j["flags"] = flags;
    return j;
}

EvaluationReport evaluate(std::span<const int> y_true, std::span<const double> scores, const EvaluationOptions& options) {
    if (y_true.size() != scores.size()) throw InputError("evaluate: length mismatch");
    EvaluationReport rep;
    rep.n = y_true.size();
    Labels pred(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = scores[i] > options.threshold ? 1 : 0;
    rep.cm = confusion(y_true, pred);
    rep.positive = metric_set(rep.cm);
    rep.weighted = weighted_metric_set(rep.cm);
    bool has_pos = rep.cm.tp + rep.cm.fn > 0, has_neg = rep.cm.tn + rep.cm.fp > 0;
    if (!has_pos || !has_neg) {
        rep.flags.push_back(has_pos ? "test set has no negative rows: ROC, AUC and bootstrap rates undefined"
                                    : "test set has no positive rows: ROC, AUC and bootstrap rates undefined");
        return rep;
    }
    rep.roc = roc_auc(y_true, scores);
    if (options.bootstrap_B > 0) {
        try {
            rep.rates = bootstrap_rate_distributions(y_true, pred, options.bootstrap_B, options.seed);
        } catch (const DegenerateError& e) {
            rep.flags.push_back(e.what());
        }
    }
    return rep;
}

}  // namespace stratify::evaluation
