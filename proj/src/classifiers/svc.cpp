#include <algorithm>
#include <cmath>

#include "stratify/classifiers/models.hpp"
#include "stratify/core/error.hpp"
#include "stratify/core/random.hpp"
#include "stratify/dataset/dataset.hpp"
#include "stratify/simd/kernels.hpp"

namespace stratify::classifiers {
namespace {

class Smo {
public:
    Smo(const Matrix& X, const Labels& y, const std::string& kernel, double gamma, double C, double tol, std::uint64_t seed)
        : X_(X), kernel_(kernel), gamma_(gamma), C_(C), tol_(tol), rng_(seed), n_(X.rows()) {
        y_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) y_[i] = y[i] == 1 ? 1.0 : -1.0;
        alpha_.assign(n_, 0.0);
        // f(x_i) = 0 initially, so E_i = -y_i.
        E_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) E_[i] = -y_[i];
        diag_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) diag_[i] = K(i, i);
        row1_.resize(n_);
        row2_.resize(n_);
    }

    SmoResult run(std::size_t max_passes) {
        std::size_t changed = 0, passes = 0;
        bool examine_all = true;
        while ((changed > 0 || examine_all) && passes < max_passes) {
            changed = 0;
            for (std::size_t i = 0; i < n_; ++i)
                if (examine_all || non_bound(i)) changed += examine(i);
            if (examine_all) examine_all = false;
            else if (changed == 0) examine_all = true;
            ++passes;
        }
        return {alpha_, b_, passes};
    }

private:
    double K(std::size_t i, std::size_t j) const { return kernel_value(kernel_, gamma_, X_.row(i), X_.row(j)); }
    bool non_bound(std::size_t i) const { return alpha_[i] > 0 && alpha_[i] < C_; }

    int examine(std::size_t i2) {
        double y2 = y_[i2], a2 = alpha_[i2], E2 = E_[i2];
        double r2 = E2 * y2;
        if (!((r2 < -tol_ && a2 < C_) || (r2 > tol_ && a2 > 0))) return 0;
        std::size_t nb = 0;
        for (std::size_t i = 0; i < n_; ++i) nb += non_bound(i);
        if (nb > 1) {
            std::size_t best = n_;
            double gap = -1.0;
            for (std::size_t i = 0; i < n_; ++i)
                if (non_bound(i) && std::abs(E_[i] - E2) > gap) {
                    gap = std::abs(E_[i] - E2);
                    best = i;
                }
            if (best < n_ && step(best, i2)) return 1;
        }
        std::size_t start = uniform_index(rng_, n_);
        for (std::size_t t = 0; t < n_; ++t) {
            std::size_t i1 = (start + t) % n_;
            if (non_bound(i1) && step(i1, i2)) return 1;
        }
        start = uniform_index(rng_, n_);
        for (std::size_t t = 0; t < n_; ++t) {
            std::size_t i1 = (start + t) % n_;
            if (step(i1, i2)) return 1;
        }
        return 0;
    }

    bool step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double eps = 1e-12;
        double a1 = alpha_[i1], a2 = alpha_[i2];
        double y1 = y_[i1], y2 = y_[i2];
        double E1 = E_[i1], E2 = E_[i2];
        double s = y1 * y2;
        double L, H;
        if (y1 != y2) {
            L = std::max(0.0, a2 - a1);
            H = std::min(C_, C_ + a2 - a1);
        } else {
            L = std::max(0.0, a1 + a2 - C_);
            H = std::min(C_, a1 + a2);
        }
        if (H - L < eps) return false;
        double k11 = diag_[i1], k22 = diag_[i2], k12 = K(i1, i2);
        double eta = k11 + k22 - 2 * k12;
        double a2n;
        if (eta > 0) {
            a2n = std::clamp(a2 + y2 * (E1 - E2) / eta, L, H);
        } else {
            // Objective at the segment ends.
            double f1 = y1 * (E1 + b_) - a1 * k11 - s * a2 * k12;
            double f2 = y2 * (E2 + b_) - s * a1 * k12 - a2 * k22;
            double L1 = a1 + s * (a2 - L), H1 = a1 + s * (a2 - H);
            double Lobj = L1 * f1 + L * f2 + 0.5 * L1 * L1 * k11 + 0.5 * L * L * k22 + s * L * L1 * k12;
            double Hobj = H1 * f1 + H * f2 + 0.5 * H1 * H1 * k11 + 0.5 * H * H * k22 + s * H * H1 * k12;
            if (Lobj < Hobj - eps) a2n = L;
            else if (Lobj > Hobj + eps) a2n = H;
            else a2n = a2;
        }
        if (std::abs(a2n - a2) < eps * (a2n + a2 + eps)) return false;
        double a1n = a1 + s * (a2 - a2n);
        if (a1n < 0) a1n = 0;
        if (a1n > C_) a1n = C_;

        double b1 = E1 + y1 * (a1n - a1) * k11 + y2 * (a2n - a2) * k12 + b_;
        double b2 = E2 + y1 * (a1n - a1) * k12 + y2 * (a2n - a2) * k22 + b_;
        double bn;
        if (a1n > 0 && a1n < C_) bn = b1;
        else if (a2n > 0 && a2n < C_) bn = b2;
        else bn = (b1 + b2) / 2;

        double d1 = y1 * (a1n - a1), d2 = y2 * (a2n - a2), db = bn - b_;
        for (std::size_t i = 0; i < n_; ++i) {
            row1_[i] = K(i1, i);
            row2_[i] = K(i2, i);
        }
        for (std::size_t i = 0; i < n_; ++i) E_[i] += d1 * row1_[i] + d2 * row2_[i] - db;
        alpha_[i1] = a1n;
        alpha_[i2] = a2n;
        b_ = bn;
        return true;
    }

    const Matrix& X_;
    std::string kernel_;
    double gamma_, C_, tol_;
    Rng rng_;
    std::size_t n_;
    std::vector<double> y_, alpha_, E_, diag_, row1_, row2_;
    double b_ = 0.0;
};

}  // namespace

double kernel_value(const std::string& kernel, double gamma, std::span<const double> a, std::span<const double> b) {
    if (kernel == "linear") return simd::dot(a, b);
    return std::exp(-gamma * simd::squared_distance(a, b));
}

double SvcModel::decision(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < support.rows(); ++i) s += coef[i] * kernel_value(kernel, gamma, support.row(i), x);
    return s - b;
}

SmoResult solve_smo(const Matrix& X, const Labels& y, const std::string& kernel, double gamma, double C, double tol,
                    std::size_t max_passes, std::uint64_t seed) {
    Smo smo(X, y, kernel, gamma, C, tol, seed);
    return smo.run(max_passes);
}

SvcModel fit_svc(const Matrix& Xall, const Labels& yall, const SvcParams& p, std::uint64_t seed, TrainingInfo& info) {
    const Matrix* X = &Xall;
    const Labels* y = &yall;
    Matrix Xs;
    Labels ys;
    if (Xall.rows() > p.max_train_samples) {
        double ratio = static_cast<double>(p.max_train_samples) / static_cast<double>(Xall.rows());
        auto split = dataset::stratified_split(yall, ratio, derive_seed(seed, "svc-subsample"));
        Xs = Xall.select_rows(split.train);
        for (auto i : split.train) ys.push_back(yall[i]);
        X = &Xs;
        y = &ys;
        info.notice = "trained on a stratified subsample of " + std::to_string(split.train.size()) + " rows";
    }
    SvcModel m;
    m.kernel = p.kernel;
    if (p.gamma > 0) {
        m.gamma = p.gamma;
    } else {
        // 1 / (p * Var(X)) over every entry of the training matrix.
        const auto& v = X->values();
        double mean = 0.0;
        for (double d : v) mean += d;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double d : v) var += (d - mean) * (d - mean);
        var /= static_cast<double>(v.size());
        m.gamma = var > 0 ? 1.0 / (static_cast<double>(X->cols()) * var) : 1.0;
    }
    auto res = solve_smo(*X, *y, m.kernel, m.gamma, p.C, p.tol, p.max_passes, derive_seed(seed, "smo"));
    info.iterations = res.passes;
    info.train_rows = X->rows();
    std::vector<std::size_t> sv;
    for (std::size_t i = 0; i < res.alpha.size(); ++i)
        if (res.alpha[i] > 0) sv.push_back(i);
    m.support = X->select_rows(sv);
    for (auto i : sv) m.coef.push_back(res.alpha[i] * ((*y)[i] == 1 ? 1.0 : -1.0));
    m.b = res.b;
    return m;
}

}  // namespace stratify::classifiers
