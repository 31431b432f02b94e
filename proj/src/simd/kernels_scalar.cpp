#include "stratify/simd/kernels.hpp"

namespace stratify::simd::scalar {
namespace {

double squared_distance(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void squared_distance_rows(const double* rows, std::size_t count, std::size_t n, const double* q, double* out) {
    for (std::size_t r = 0; r < count; ++r) out[r] = squared_distance(rows + r * n, q, n);
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable table{squared_distance, dot, axpy, squared_distance_rows};

}  // namespace stratify::simd::scalar
