// Serial reference loop versus the OpenMP executor on the same workloads.
// Also confirms that both produce identical records.
//
//   bench_engine [--trials N] [--L L] [--threads T] [--repeat R]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "isac/montecarlo.hpp"
#include "isac/report.hpp"

using namespace isac;

namespace {

template <class F>
double best_of(int repeat, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeat; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-22s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  identical %s\n", name, serial, parallel,
              serial / parallel, same ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t trials = 20000;
  int length = 32;
  int threads = 0;
  int repeat = 3;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (!std::strcmp(argv[i], "--trials")) trials = static_cast<std::size_t>(std::atof(argv[i + 1]));
    else if (!std::strcmp(argv[i], "--L")) length = std::atoi(argv[i + 1]);
    else if (!std::strcmp(argv[i], "--threads")) threads = std::atoi(argv[i + 1]);
    else if (!std::strcmp(argv[i], "--repeat")) repeat = std::atoi(argv[i + 1]);
  }
  const EngineOptions serial{Execution::serial, 0};
  const EngineOptions parallel{Execution::parallel, threads};
  std::printf("trials %zu, L %d, threads %d\n", trials, length, effective_threads(parallel));

  SimulationSpec sim;
  sim.cfg = SystemConfig::reference_defaults();
  sim.cfg.set_frame_length(length);
  for (auto policy : {ScenarioPolicy::regenerate, ScenarioPolicy::fixed}) {
    sim.policy = policy;
    const TrialSimulator ts(sim);
    std::vector<double> a, b;
    const auto tau = [](const TrialRecord& r) { return r.tau; };
    const double s = best_of(repeat, [&] { a = ts.map_trials(trials, Hypothesis::h1, serial, tau); });
    const double p = best_of(repeat, [&] { b = ts.map_trials(trials, Hypothesis::h1, parallel, tau); });
    row(policy == ScenarioPolicy::fixed ? "trials (fixed)" : "trials (regenerate)", s, p, a == b);
  }

  ExperimentSpec spec;
  spec.kind = ExperimentKind::roc;
  spec.cfg = sim.cfg;
  spec.trials = trials / 4;
  TrialLedger la, lb;
  spec.engine = serial;
  const double s = best_of(repeat, [&] { la = run_experiment(spec); });
  spec.engine = parallel;
  const double p = best_of(repeat, [&] { lb = run_experiment(spec); });
  row("roc experiment", s, p, summary_text(la) == summary_text(lb));
  return 0;
}
