#pragma once

// Trial loop executors. A trial body receives its index and writes only to
// slots owned by that index, so the serial and OpenMP executors produce the
// same bytes; the serial one is kept as the reference for tests.

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace isac {

enum class Execution { serial, parallel };

struct EngineOptions {
  Execution execution = Execution::parallel;
  int threads = 0;  // 0 = OpenMP default
};

/// Threads the parallel executor would use for the given options.
int effective_threads(const EngineOptions& opts);

template <class Body>
void for_each_trial_serial(std::size_t count, Body&& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

template <class Body>
void for_each_trial_parallel(std::size_t count, int threads, Body&& body) {
#ifdef _OPENMP
  std::exception_ptr error;
  std::mutex error_mutex;
  const long long n = static_cast<long long>(count);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
#else
  (void)threads;
  for_each_trial_serial(count, body);
#endif
}

template <class Body>
void for_each_trial(std::size_t count, const EngineOptions& opts, Body&& body) {
  if (opts.execution == Execution::serial) {
    for_each_trial_serial(count, body);
  } else {
    for_each_trial_parallel(count, opts.threads, body);
  }
}

}  // namespace isac
