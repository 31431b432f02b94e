#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stratify/classifiers/models.hpp"
#include "stratify/core/error.hpp"
#include "stratify/core/random.hpp"
#include "stratify/simd/kernels.hpp"

namespace stratify::classifiers {
namespace {

enum class Act { tanh, relu, logistic };

Act parse(const std::string& s) {
    if (s == "tanh") return Act::tanh;
    if (s == "relu") return Act::relu;
    if (s == "logistic") return Act::logistic;
    throw InputError("unknown MLP activation '" + s + "'");
}

double activate(Act a, double z) {
    switch (a) {
        case Act::tanh: return std::tanh(z);
        case Act::relu: return z > 0 ? z : 0.0;
        case Act::logistic: return sigmoid(z);
    }
    return z;
}

// Derivative expressed through the activation value (and the pre-activation for relu).
double derivative(Act a, double value, double z) {
    switch (a) {
        case Act::tanh: return 1.0 - value * value;
        case Act::relu: return z > 0 ? 1.0 : 0.0;
        case Act::logistic: return value * (1.0 - value);
    }
    return 1.0;
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Layout of the flat parameter vector: [W1 (h x in), b1 (h), W2 (h), b2].
struct View {
    std::size_t in, h;
    const double* W1() const { return p; }
    const double* b1() const { return p + h * in; }
    const double* W2() const { return p + h * in + h; }
    double b2() const { return p[h * in + 2 * h]; }
    const double* p;
};

double objective_rows(const View& v, Act act, const Matrix& X, const Labels& y, std::span<const std::size_t> rows,
                      double alpha, double* grad) {
    const std::size_t in = v.in, h = v.h;
    const auto& k = simd::active();
    std::vector<double> pre(h), a(h);
    double loss = 0.0;
    const std::size_t total = h * in + 2 * h + 1;
    if (grad) std::fill(grad, grad + total, 0.0);
    for (std::size_t r : rows) {
        const double* x = X.row(r).data();
        for (std::size_t j = 0; j < h; ++j) {
            pre[j] = k.dot(v.W1() + j * in, x, in) + v.b1()[j];
            a[j] = activate(act, pre[j]);
        }
        double z = k.dot(v.W2(), a.data(), h) + v.b2();
        loss += softplus(z) - y[r] * z;
        if (!grad) continue;
        double dz = sigmoid(z) - y[r];
        double* gW1 = grad;
        double* gb1 = grad + h * in;
        double* gW2 = gb1 + h;
        for (std::size_t j = 0; j < h; ++j) {
            gW2[j] += dz * a[j];
            double delta = dz * v.W2()[j] * derivative(act, a[j], pre[j]);
            gb1[j] += delta;
            k.axpy(delta, x, gW1 + j * in, in);
        }
        grad[total - 1] += dz;
    }
    const double n = static_cast<double>(rows.size());
    double reg = 0.0;
    for (std::size_t i = 0; i < h * in; ++i) reg += v.W1()[i] * v.W1()[i];
    for (std::size_t j = 0; j < h; ++j) reg += v.W2()[j] * v.W2()[j];
    if (grad) {
        for (std::size_t i = 0; i < total; ++i) grad[i] /= n;
        for (std::size_t i = 0; i < h * in; ++i) grad[i] += alpha / n * v.W1()[i];
        for (std::size_t j = 0; j < h; ++j) grad[h * in + h + j] += alpha / n * v.W2()[j];
    }
    return loss / n + alpha / (2.0 * n) * reg;
}

}  // namespace

std::vector<double> MlpModel::flatten() const {
    std::vector<double> f;
    f.reserve(parameter_count());
    f.insert(f.end(), W1.begin(), W1.end());
    f.insert(f.end(), b1.begin(), b1.end());
    f.insert(f.end(), W2.begin(), W2.end());
    f.push_back(b2);
    return f;
}

void MlpModel::assign(std::span<const double> f) {
    if (f.size() != hidden * inputs + 2 * hidden + 1) throw InputError("mlp: parameter vector has the wrong size");
    auto it = f.begin();
    W1.assign(it, it + static_cast<std::ptrdiff_t>(hidden * inputs));
    it += static_cast<std::ptrdiff_t>(hidden * inputs);
    b1.assign(it, it + static_cast<std::ptrdiff_t>(hidden));
    it += static_cast<std::ptrdiff_t>(hidden);
    W2.assign(it, it + static_cast<std::ptrdiff_t>(hidden));
    b2 = f.back();
}

double mlp_objective(const MlpModel& m, const Matrix& X, const Labels& y, double alpha, std::vector<double>* grad) {
    auto flat = m.flatten();
    std::vector<std::size_t> rows(X.rows());
    std::iota(rows.begin(), rows.end(), 0);
    if (grad) grad->assign(flat.size(), 0.0);
    return objective_rows(View{m.inputs, m.hidden, flat.data()}, parse(m.activation), X, y, rows, alpha,
                          grad ? grad->data() : nullptr);
}

MlpModel fit_mlp(const Matrix& X, const Labels& y, const MlpParams& p, std::uint64_t seed, TrainingInfo& info) {
    const std::size_t n = X.rows(), in = X.cols(), h = p.hidden;
    const Act act = parse(p.activation);
    MlpModel m;
    m.activation = p.activation;
    m.inputs = in;
    m.hidden = h;

    // Glorot-uniform initial weights and biases.
    Rng init(derive_seed(seed, "mlp-init"));
    const std::size_t total = h * in + 2 * h + 1;
    std::vector<double> theta(total);
    double bound1 = std::sqrt(6.0 / static_cast<double>(in + h));
    double bound2 = std::sqrt(6.0 / static_cast<double>(h + 1));
    for (std::size_t i = 0; i < h * in + h; ++i) theta[i] = (2.0 * uniform01(init) - 1.0) * bound1;
    for (std::size_t i = h * in + h; i < total; ++i) theta[i] = (2.0 * uniform01(init) - 1.0) * bound2;

    std::vector<double> velocity(total, 0.0), grad(total);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;
    for (std::size_t epoch = 0; epoch < p.max_epochs; ++epoch) {
        Rng rng(derive_seed(seed, "mlp-epoch", epoch));
        shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += p.batch_size) {
            std::size_t end = std::min(n, start + p.batch_size);
            std::span<const std::size_t> batch(order.data() + start, end - start);
            double l = objective_rows(View{in, h, theta.data()}, act, X, y, batch, p.alpha, grad.data());
            epoch_loss += l * static_cast<double>(batch.size());
            for (std::size_t i = 0; i < total; ++i) {
                velocity[i] = p.momentum * velocity[i] - p.learning_rate * grad[i];
                theta[i] += velocity[i];
            }
        }
        epoch_loss /= static_cast<double>(n);
        if (!std::isfinite(epoch_loss)) throw DegenerateError("mlp: training diverged");
        info.loss_history.push_back(epoch_loss);
        info.iterations = epoch + 1;
        stale = epoch_loss > best - p.tol ? stale + 1 : 0;
        best = std::min(best, epoch_loss);
        if (stale >= p.n_iter_no_change) break;
    }
    m.assign(theta);
    return m;
}

double score(const MlpModel& m, std::span<const double> x) {
    const Act act = parse(m.activation);
    const auto& k = simd::active();
    double z = m.b2;
    for (std::size_t j = 0; j < m.hidden; ++j) {
        double a = activate(act, k.dot(m.W1.data() + j * m.inputs, x.data(), m.inputs) + m.b1[j]);
        z += m.W2[j] * a;
    }
    return sigmoid(z);
}

}  // namespace stratify::classifiers
