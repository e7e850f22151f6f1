#pragma once

#include <cstddef>
#include <functional>

namespace flatgp {

// Thread count for parallel loops. FLATGP_THREADS caps it when set.
int max_threads();
void set_max_threads(int n);

// Runs body(i) for i in [0, n) across OpenMP threads, dynamically scheduled.
// body must be safe to call concurrently for distinct i.
void parallel_for(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& body);

}  // namespace flatgp
