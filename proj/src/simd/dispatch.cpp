#include <atomic>
#include <cstdlib>
#include <string>

#include "stratify/core/error.hpp"
#include "stratify/simd/kernels.hpp"

namespace stratify::simd {
namespace {

Isa initial_isa() {
    if (const char* env = std::getenv("STRATIFY_SIMD")) {
        std::string v(env);
        if (v == "scalar") return Isa::scalar;
        if (v == "avx2" && supported(Isa::avx2)) return Isa::avx2;
        if (v == "neon" && supported(Isa::neon)) return Isa::neon;
    }
    return detected_isa();
}

std::atomic<const KernelTable*>& active_table() {
    static std::atomic<const KernelTable*> t{&table_for(initial_isa())};
    return t;
}

std::atomic<Isa>& active_tag() {
    static std::atomic<Isa> tag{initial_isa()};
    return tag;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

bool compiled(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2: return avx2::table.dot != nullptr;
        case Isa::neon: return neon::table.dot != nullptr;
    }
    return false;
}

bool supported(Isa isa) noexcept {
    if (!compiled(isa)) return false;
#if defined(__x86_64__) || defined(_M_X64)
    if (isa == Isa::avx2) return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#endif
    return true;  // scalar everywhere; NEON is mandatory on aarch64
}

Isa detected_isa() noexcept {
    if (supported(Isa::avx2)) return Isa::avx2;
    if (supported(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

const KernelTable& table_for(Isa isa) {
    if (!supported(isa)) throw InputError("SIMD variant not available: " + std::string(isa_name(isa)));
    switch (isa) {
        case Isa::avx2: return avx2::table;
        case Isa::neon: return neon::table;
        case Isa::scalar: break;
    }
    return scalar::table;
}

Isa active_isa() noexcept { return active_tag().load(); }

void set_active_isa(Isa isa) {
    const KernelTable& t = table_for(isa);
    active_table().store(&t);
    active_tag().store(isa);
}

const KernelTable& active() noexcept { return *active_table().load(std::memory_order_relaxed); }

void squared_distances(const Matrix& X, std::span<const double> q, std::span<double> out) {
    if (q.size() != X.cols() || out.size() != X.rows())
        throw InputError("squared_distances: shape mismatch");
    active().squared_distance_rows(X.data(), X.rows(), X.cols(), q.data(), out.data());
}

}  // namespace stratify::simd
