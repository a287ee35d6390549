#include "isac/trial_engine.hpp"

namespace isac {

int effective_threads(const EngineOptions& opts) {
  if (opts.execution == Execution::serial) return 1;
#ifdef _OPENMP
  return opts.threads > 0 ? opts.threads : omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace isac
