#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "stratify/core/matrix.hpp"

// Data-parallel inner loops shared by clustering, neighbour search, SMOTE,
// the RBF kernel and the linear models. Each kernel has a scalar reference
// implementation and vector variants; the variant is picked once per process
// from the CPU's capabilities and can be pinned with STRATIFY_SIMD=scalar|avx2|neon.
namespace stratify::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // out[r] = squared_distance(rows + r * n, q, n) for r in [0, count)
    void (*squared_distance_rows)(const double* rows, std::size_t count, std::size_t n, const double* q, double* out);
};

namespace scalar {
extern const KernelTable table;
}
namespace avx2 {
extern const KernelTable table;
}
namespace neon {
extern const KernelTable table;
}

bool compiled(Isa isa) noexcept;
bool supported(Isa isa) noexcept;
// Best ISA usable on this machine.
Isa detected_isa() noexcept;

Isa active_isa() noexcept;
// Throws InputError when the ISA is not usable here.
void set_active_isa(Isa isa);

const KernelTable& table_for(Isa isa);
const KernelTable& active() noexcept;

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    return active().squared_distance(a.data(), b.data(), a.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

// out[i] = |X.row(i) - q|^2 for every row.
void squared_distances(const Matrix& X, std::span<const double> q, std::span<double> out);

}  // namespace stratify::simd
