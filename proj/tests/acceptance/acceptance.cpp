// Acceptance suite: one PASS/FAIL line per criterion. `acceptance --only N`
// runs a single criterion; without arguments all ten run in order.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "isac/detectors.hpp"
#include "isac/montecarlo.hpp"
#include "isac/report.hpp"
#include "oracles.hpp"

using namespace isac;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct World {
  Scenario scenario;
  TransmitPlan plan;
  NullModel model;
};

World world(const SystemConfig& cfg, std::uint64_t index) {
  RandomStream rng = derive_trial_stream(cfg.seed, stable_hash("acceptance/world"), index);
  Scenario s = generate_scenario(cfg, rng);
  TransmitPlan p = build_transmit_plan(cfg, s, rng);
  NullModel m = build_null_model(s, p, cfg);
  return {std::move(s), std::move(p), std::move(m)};
}

bool check(const TrialLedger& l, const char* name) { return l.summary["checks"][name].get<bool>(); }

// 1 -----------------------------------------------------------------------
Outcome crit_cardano() {
  const SystemConfig cfg = SystemConfig::reference_defaults();
  std::vector<CubicCoefficients> cubics;
  for (int w = 0; w < 100; ++w) {
    const World wd = world(cfg, w);
    RandomStream rng = derive_trial_stream(cfg.seed, stable_hash("acceptance/cardano"), w);
    for (int i = 0; i < 100; ++i) {
      const Hypothesis h = i % 2 ? Hypothesis::h1 : Hypothesis::h0;
      const StatisticalGenerator g(wd.model, wd.plan, cfg.alpha(), h);
      cubics.push_back(cubic_for_alpha(sufficient_stats(g.draw(rng).y, wd.model, wd.plan), wd.model));
    }
  }
  std::vector<double> roots(cubics.size());
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < cubics.size(); ++i) roots[i] = cardano_real_root(cubics[i]);
  const double solve_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  double worst_res = 0.0;
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < cubics.size(); ++i) {
    const auto& k = cubics[i];
    worst_res = std::max(worst_res, std::abs(k.evaluate(roots[i])) / std::max(1.0, std::abs(k.d)));
    const double ref = oracle::largest_root_bisection(k.a, k.b, k.c, k.d);
    worst_rel = std::max(worst_rel, std::abs(roots[i] - ref) / std::abs(ref));
  }
  const bool pass = worst_res <= 1e-9 && worst_rel <= 1e-8 && solve_s < 1.0;
  return {pass, fmt("%zu cubics, max residual %.3g (<= 1e-9), max rel diff to bisection %.3g (<= 1e-8), "
                    "solve time %.4f s (< 1 s)",
                    cubics.size(), worst_res, worst_rel, solve_s)};
}

// 2 -----------------------------------------------------------------------
Outcome crit_ml_optimality() {
  SystemConfig cfg = SystemConfig::reference_defaults();
  cfg.set_frame_length(32);
  const cplx alpha = cfg.alpha();
  double worst_gap = -1e300;
  double worst_grad = 0.0;
  double worst_fd = 0.0;
  int frames = 0;
  for (int w = 0; w < 100; ++w) {
    const World wd = world(cfg, 1000 + w);
    const StatisticalGenerator g(wd.model, wd.plan, alpha, Hypothesis::h1);
    RandomStream rng = derive_trial_stream(cfg.seed, stable_hash("acceptance/ml"), w);
    for (int i = 0; i < 10; ++i, ++frames) {
      const SufficientStats st = sufficient_stats(g.draw(rng).y, wd.model, wd.plan);
      const GlrtOutput out = glrt_statistic(st, wd.model);
      const auto f = [&](cplx a) { return log_likelihood_ratio(a, st, wd.model); };
      const double radius = 3.0 * std::max(std::abs(out.alpha_hat), std::abs(alpha));
      const auto grid = oracle::grid_maximum(f, radius, 101);
      worst_gap = std::max(worst_gap, grid.value - f(out.alpha_hat));
      const double grad = std::abs(log_likelihood_gradient(out.alpha_hat, st, wd.model)) /
                          gradient_scale(out.alpha_hat, st, wd.model);
      worst_grad = std::max(worst_grad, grad);
      // finite differences at a point where the gradient is not zero
      const cplx probe = 1.1 * out.alpha_hat + 0.1 * alpha;
      const cplx analytic = 2.0 * log_likelihood_gradient(probe, st, wd.model);
      const cplx fd = oracle::finite_difference_gradient(f, probe, 1e-4 * std::abs(probe));
      worst_fd = std::max(worst_fd, std::abs(fd - analytic) / std::abs(analytic));
    }
  }
  const bool pass = worst_gap <= 1e-6 && worst_grad < 1e-6 && worst_fd <= 1e-4;
  return {pass, fmt("%d H1 frames, max(grid max - ll(alpha_hat)) %.3g (<= 1e-6), max |grad|/scale %.3g (< 1e-6), "
                    "max finite-difference rel err %.3g (<= 1e-4)",
                    frames, worst_gap, worst_grad, worst_fd)};
}

// 3 -----------------------------------------------------------------------
// Regression values recorded on the first verified run (seed 1, 1e4 trials).
constexpr double kPinnedDeltaQ[] = {0.0202643115607, 0.0143868714085, 0.00997146501984, 0.00692112648833};

Outcome crit_q_accuracy() {
  ExperimentSpec s;
  s.kind = ExperimentKind::q_error;
  s.cfg = SystemConfig::reference_defaults();
  s.trials = 10000;
  s.sweep = {8, 16, 32, 64};
  const TrialLedger l = run_experiment(s);
  const auto dq = l.summary["delta_q"].get<std::vector<double>>();
  bool pinned = true;
  for (std::size_t i = 0; i < dq.size(); ++i) pinned = pinned && std::abs(dq[i] - kPinnedDeltaQ[i]) <= 1e-6 * kPinnedDeltaQ[i];
  const bool halved = dq[3] < 0.5 * dq[0];
  const bool pass = check(l, "monotone_decreasing") && halved && pinned;
  return {pass, fmt("delta_q(8,16,32,64) = %.6g %.6g %.6g %.6g, monotone %s, ratio 64/8 %.4f (< 0.5), "
                    "pinned values %s (rel 1e-6)",
                    dq[0], dq[1], dq[2], dq[3], check(l, "monotone_decreasing") ? "yes" : "no", dq[3] / dq[0],
                    pinned ? "match" : "differ")};
}

// 4 -----------------------------------------------------------------------
Outcome crit_distribution() {
  double ks[2][2];
  const double pp[2] = {20.0, 30.0};
  for (int p = 0; p < 2; ++p) {
    for (int h = 0; h < 2; ++h) {
      ExperimentSpec s;
      s.kind = h ? ExperimentKind::dist_h1 : ExperimentKind::dist_h0;
      s.cfg = SystemConfig::reference_defaults();
      s.cfg.set_frame_length(16);
      s.cfg.p_pilot_dbm = pp[p];
      s.cfg.p_data_dbm = 30.0;
      s.trials = 100000;
      ks[p][h] = run_experiment(s).summary["ks_distance"].get<double>();
    }
  }
  bool pass = true;
  for (auto& row : ks) pass = pass && row[0] < 0.03 && row[1] < 0.03;
  pass = pass && ks[1][0] <= ks[0][0] && ks[1][1] <= ks[0][1];
  return {pass, fmt("KS at 20 dBm H0 %.4f H1 %.4f, at 30 dBm H0 %.4f H1 %.4f (each < 0.03, 30 dBm <= 20 dBm)",
                    ks[0][0], ks[0][1], ks[1][0], ks[1][1])};
}

// 5 -----------------------------------------------------------------------
Outcome crit_fap_closed_form() {
  bool pass = true;
  std::string detail;
  for (int l : {8, 32, 128}) {
    ExperimentSpec s;
    s.kind = ExperimentKind::fap_curve;
    s.cfg = SystemConfig::reference_defaults();
    s.cfg.set_frame_length(l);
    s.trials = 1000000;
    s.p_fa_targets = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    const TrialLedger led = run_experiment(s);
    const Table& t = led.table("fap");
    double worst_z = 0.0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double th = t.number(r, "theory");
      worst_z = std::max(worst_z, std::abs(t.number(r, "empirical") - th) / binomial_sigma(th, s.trials));
    }
    const bool ok = check(led, "theory_within_3sigma") && check(led, "above_pilot_bound");
    pass = pass && ok;
    detail += fmt("L=%d max |z| %.2f%s; ", l, worst_z, ok ? "" : " FAIL");
  }
  return {pass, detail + "1e6 H0 trials per L, 5 thresholds in [1e-3, 1e-1], within 3 sigma and above the bound"};
}

// 6 -----------------------------------------------------------------------
Outcome crit_threshold_calibration() {
  ExperimentSpec s;
  s.kind = ExperimentKind::fap_curve;
  s.cfg = SystemConfig::reference_defaults();
  s.trials = 1000000;
  s.p_fa_targets = {1e-3, 1e-2};
  const TrialLedger led = run_experiment(s);
  const Table& t = led.table("fap");
  bool pass = t.rows.size() == 2;
  std::string detail;
  const double targets[2] = {1e-2, 1e-3};  // rows are sorted by threshold
  for (std::size_t r = 0; r < t.rows.size() && r < 2; ++r) {
    const double emp = t.number(r, "empirical");
    const double z = (emp - targets[r]) / binomial_sigma(targets[r], s.trials);
    pass = pass && std::abs(z) <= 3.0;
    detail += fmt("target %.0e empirical %.6f (z %.2f); ", targets[r], emp, z);
  }
  return {pass, detail + "L=32, 1e6 trials, |z| <= 3"};
}

// 7 -----------------------------------------------------------------------
Outcome crit_dp_closed_form() {
  bool pass = true;
  std::string detail;
  for (int l : {32, 128}) {
    ExperimentSpec s;
    s.kind = ExperimentKind::roc;
    s.cfg = SystemConfig::reference_defaults();
    s.cfg.set_frame_length(l);
    s.cfg.p_pilot_dbm = 20.0;
    s.trials = 10000;
    s.h0_trials = 100000;
    s.sweep = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
    const TrialLedger led = run_experiment(s);
    const bool within = check(led, "theory_within_3sigma");
    const bool below = check(led, "below_upper_bound");
    const bool beats = check(led, "beats_pilot_only");
    const Table& t = led.table("roc");
    double worst_z = 0.0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double th = t.number(r, "pd_theory");
      const double sd = std::max(binomial_sigma(th, s.trials), 1.0 / double(s.trials));
      worst_z = std::max(worst_z, std::abs(t.number(r, "pd_empirical") - th) / sd);
    }
    pass = pass && within && below && beats;
    detail += fmt("L=%d max |z| %.2f within %d below-bound %d beats-pilot-only %d; ", l, worst_z, within, below, beats);
  }
  return {pass, detail + "1e4 H1 trials per point, p_fa in [1e-4, 1e-1], pilot power 20 dBm"};
}

// 8 -----------------------------------------------------------------------
Outcome crit_lemma_moments() {
  ExperimentSpec s;
  s.kind = ExperimentKind::validate_lemmas;
  s.cfg = SystemConfig::reference_defaults();
  s.trials = 100000;
  const TrialLedger led = run_experiment(s);
  const Table& t = led.table("validate");
  double worst_z = 0.0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) worst_z = std::max(worst_z, std::abs(t.number(r, "z")));
  const bool pass = led.summary["pass"].get<bool>();
  return {pass, fmt("%zu moment checks, max |z| %.2f (<= 4), alpha = 0 degeneracy exact %s", t.rows.size(), worst_z,
                    check(led, "alpha0_moments_exact") && check(led, "alpha0_run_equals_h0") ? "yes" : "no")};
}

// 9 -----------------------------------------------------------------------
Outcome crit_tradeoff() {
  ExperimentSpec s;
  s.kind = ExperimentKind::drt_sweep;
  s.cfg = SystemConfig::reference_defaults();
  s.cfg.set_frame_length(2048);
  s.trials = 2000;
  const TrialLedger led = run_experiment(s);
  const bool ordered = check(led, "ordered_by_pilot_power");
  const bool mono = check(led, "nonincreasing_in_rate");
  return {ordered && mono, fmt("L=2048, 2e3 trials per point, %zu points, ordered by pilot power %s, "
                               "nonincreasing in rate %s",
                               led.tables.front().rows.size(), ordered ? "yes" : "no", mono ? "yes" : "no")};
}

// 10 ----------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

std::vector<std::string> fingerprint(const ExperimentSpec& s, const std::filesystem::path& dir) {
  const TrialLedger l = run_experiment(s);
  std::vector<std::string> out;
  for (const auto& t : l.tables) out.push_back(csv_text(t, l));
  out.push_back(summary_text(l));
  for (const auto& p : emit_plot_data(l, dir)) out.push_back(p.filename().string() + "\n" + slurp(p));
  return out;
}

Outcome crit_determinism() {
  const auto root = std::filesystem::temp_directory_path() / "isac_acceptance_determinism";
  std::filesystem::remove_all(root);
  std::vector<ExperimentSpec> specs;
  for (auto kind : {ExperimentKind::q_error, ExperimentKind::dist_h0, ExperimentKind::dist_h1,
                    ExperimentKind::fap_curve, ExperimentKind::roc, ExperimentKind::drt_sweep,
                    ExperimentKind::validate_lemmas}) {
    ExperimentSpec s;
    s.kind = kind;
    s.cfg = SystemConfig::reference_defaults();
    s.cfg.set_frame_length(16);
    s.trials = 500;
    s.master_seed = 11;
    if (kind == ExperimentKind::q_error) s.sweep = {8, 16};
    specs.push_back(s);
  }
  ExperimentSpec phys = specs[4];
  phys.mode = GenerationMode::physical;
  specs.push_back(phys);

  int compared = 0;
  bool pass = true;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    ExperimentSpec s = specs[k];
    s.engine.execution = Execution::serial;
    const auto ref = fingerprint(s, root / ("s" + std::to_string(k)));
    for (int threads : {1, 2, 4}) {
      s.engine.execution = Execution::parallel;
      s.engine.threads = threads;
      const auto got = fingerprint(s, root / ("p" + std::to_string(k) + "_" + std::to_string(threads)));
      pass = pass && got == ref;
      ++compared;
    }
  }
  std::filesystem::remove_all(root);
  return {pass, fmt("%zu experiments, %d serial/parallel (1, 2, 4 threads) comparisons of CSVs, summaries and "
                    "emitted files, %s",
                    specs.size(), compared, pass ? "all byte-identical" : "differences found")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "cardano", 60.0, crit_cardano},
      {2, "ml_optimality", 60.0, crit_ml_optimality},
      {3, "q_accuracy", 120.0, crit_q_accuracy},
      {4, "statistic_distribution", 300.0, crit_distribution},
      {5, "fap_closed_form", 1800.0, crit_fap_closed_form},
      {6, "threshold_calibration", 600.0, crit_threshold_calibration},
      {7, "dp_closed_form", 600.0, crit_dp_closed_form},
      {8, "lemma_moments", 300.0, crit_lemma_moments},
      {9, "tradeoff", 1800.0, crit_tradeoff},
      {10, "determinism", 300.0, crit_determinism},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]\n");
      return 2;
    }
  }
  int failures = 0;
  int ran = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt(" [over the %.0f s budget]", c.budget_s);
    }
    std::printf("criterion %d [%s] %s: %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
