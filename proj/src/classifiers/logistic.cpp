#include <cmath>

#include "stratify/classifiers/models.hpp"
#include "stratify/core/error.hpp"
#include "stratify/simd/kernels.hpp"

namespace stratify::classifiers {
namespace {

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double logistic_objective(const Matrix& X, const Labels& y, std::span<const double> w, double b, double C,
                          std::vector<double>* grad_w, double* grad_b) {
    const std::size_t n = X.rows(), p = X.cols();
    const auto& k = simd::active();
    double loss = 0.0, gb = 0.0;
    if (grad_w) grad_w->assign(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = X.row(i).data();
        double z = k.dot(x, w.data(), p) + b;
        // -[y log s + (1-y) log(1-s)] = softplus(z) - y z
        loss += softplus(z) - y[i] * z;
        double r = sigmoid(z) - y[i];
        gb += r;
        if (grad_w) k.axpy(r, x, grad_w->data(), p);
    }
    const double dn = static_cast<double>(n);
    double reg = 0.0;
    for (double v : w) reg += v * v;
    if (grad_w)
        for (std::size_t j = 0; j < p; ++j) (*grad_w)[j] = (*grad_w)[j] / dn + w[j] / (C * dn);
    if (grad_b) *grad_b = gb / dn;
    return loss / dn + reg / (2.0 * C * dn);
}

LogisticModel fit_logistic(const Matrix& X, const Labels& y, const LogisticParams& p, TrainingInfo& info) {
    LogisticModel m;
    m.w.assign(X.cols(), 0.0);
    std::vector<double> gw;
    double gb = 0.0;
    double prev = logistic_objective(X, y, m.w, m.b, p.C, &gw, &gb);
    info.loss_history.push_back(prev);
    for (std::size_t it = 1; it <= p.max_iter; ++it) {
        for (std::size_t j = 0; j < m.w.size(); ++j) m.w[j] -= p.learning_rate * gw[j];
        m.b -= p.learning_rate * gb;
        double cur = logistic_objective(X, y, m.w, m.b, p.C, &gw, &gb);
        info.loss_history.push_back(cur);
        info.iterations = it;
        if (std::abs(prev - cur) < p.tol) break;
        prev = cur;
    }
    return m;
}

double score(const LogisticModel& m, std::span<const double> x) { return sigmoid(simd::dot(x, m.w) + m.b); }

}  // namespace stratify::classifiers
