#include "flatgp/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

namespace flatgp {

namespace {

int threads_from_env() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("FLATGP_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception&) {
    }
  }
  return std::max(n, 1);
}

std::atomic<int> g_threads{0};

}  // namespace

int max_threads() {
  int n = g_threads.load();
  if (n == 0) {
    n = threads_from_env();
    g_threads.store(n);
  }
  return n;
}

void set_max_threads(int n) { g_threads.store(std::max(n, 1)); }

void parallel_for(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& body) {
  // Exceptions must not escape an OpenMP region; the first one is rethrown afterwards.
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace flatgp
