#pragma once

#include <cstddef>
#include <functional>

namespace stratify {

// Worker cap used by parallel_for. Defaults to STRATIFY_THREADS when set,
// otherwise the hardware concurrency. Changing it never changes results.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs body(i) for i in [0, n). Work units must be independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace stratify
