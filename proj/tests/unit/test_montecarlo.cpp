#include <doctest.h>

#include <cmath>
#include <limits>

#include "isac/montecarlo.hpp"
#include "isac/report.hpp"

using namespace isac;

namespace {

ExperimentSpec small_spec(ExperimentKind kind, std::size_t trials = 200) {
  ExperimentSpec s;
  s.kind = kind;
  s.cfg = SystemConfig::reference_defaults();
  s.cfg.set_frame_length(16);
  s.trials = trials;
  s.master_seed = 5;
  return s;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("wilson interval") {
  const auto a = wilson_interval(0, 100);
  CHECK(a.lo == 0.0);
  CHECK(a.hi == doctest::Approx(0.0370).epsilon(1e-2));
  const auto b = wilson_interval(50, 100);
  CHECK(b.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(b.hi == doctest::Approx(0.5962).epsilon(1e-3));
  const auto c = wilson_interval(0, 0);
  CHECK(c.lo == 0.0);
  CHECK(c.hi == 1.0);
  CHECK(binomial_sigma(0.5, 100) == doctest::Approx(0.05));
}

TEST_CASE("ks distance") {
  CHECK(ks_distance({1, 2, 3}, {3, 2, 1}) == 0.0);
  CHECK(ks_distance({1, 2}, {3, 4}) == 1.0);
  CHECK(ks_distance({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
  CHECK(ks_distance({}, {1.0}) == 1.0);
}

TEST_CASE("sample moments and tail counting") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const auto m = sample_moments(x);
  CHECK(m.mean == 3.0);
  CHECK(m.variance == 2.5);
  CHECK(count_above(x, 3.0) == 2);
  CHECK(count_above(x, 0.0) == 5);
  CHECK(threshold_for_count(x, 2) == 3.0);
  CHECK(count_above(x, threshold_for_count(x, 2)) == 2);
  CHECK(threshold_for_count(x, 0) == 5.0);
  CHECK(threshold_for_count(x, 5) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("artifact stems") {
  SystemConfig c = SystemConfig::reference_defaults();
  c.set_frame_length(128);
  c.p_pilot_dbm = 20.0;
  CHECK(artifact_stem("roc", c, 7) == "roc_L128_pp20_pd30_seed7");
  c.p_data_dbm = -std::numeric_limits<double>::infinity();
  c.p_pilot_dbm = 22.5;
  CHECK(artifact_stem("fap", c, 1, "x") == "fap_L128_pp22p5_pdoff_x_seed1");
}

TEST_CASE("spec validation") {
  auto s = small_spec(ExperimentKind::roc);
  s.trials = 0;
  CHECK_THROWS_AS(validate_spec(s), ExperimentError);
  s = small_spec(ExperimentKind::roc);
  s.sweep = {0.1, 1.0};
  CHECK_THROWS_AS(validate_spec(s), ExperimentError);
  s = small_spec(ExperimentKind::q_error);
  s.sweep = {1.0};
  CHECK_THROWS_AS(validate_spec(s), ExperimentError);
  s = small_spec(ExperimentKind::drt_sweep);
  s.p_fa = 0.0;
  CHECK_THROWS_AS(validate_spec(s), ExperimentError);
  s = small_spec(ExperimentKind::drt_sweep);
  s.pilot_powers_dbm.clear();
  CHECK_THROWS_AS(validate_spec(s), ExperimentError);
  s = small_spec(ExperimentKind::dist_h0);
  s.histogram_bins = 0;
  CHECK_THROWS_AS(validate_spec(s), ExperimentError);
  s = small_spec(ExperimentKind::roc);
  s.cfg.n_rx = 0;
  CHECK_THROWS_AS(validate_spec(s), ExperimentError);
  CHECK_NOTHROW(validate_spec(small_spec(ExperimentKind::roc)));
}

TEST_CASE("trial simulator is a pure function of the trial index") {
  SimulationSpec s;
  s.cfg = SystemConfig::reference_defaults();
  s.cfg.set_frame_length(16);
  s.master_seed = 3;
  const TrialSimulator sim(s);
  const auto a = sim.run(17, Hypothesis::h1);
  const auto b = sim.run(17, Hypothesis::h1);
  CHECK(a.tau == b.tau);
  CHECK(a.gamma == b.gamma);
  CHECK(sim.run(18, Hypothesis::h1).tau != a.tau);
  // H0 and H1 of one trial share the scenario and noise
  CHECK(sim.run(17, Hypothesis::h0).model.beta_bar == a.model.beta_bar);

  s.policy = ScenarioPolicy::fixed;
  const TrialSimulator fixed(s);
  CHECK(fixed.run(1, Hypothesis::h0).model.beta_bar == fixed.run(2, Hypothesis::h0).model.beta_bar);
  const auto f = fixed.frame(4, Hypothesis::h0);
  const auto rec = fixed.evaluate_frame(f.y);
  CHECK(rec.tau == fixed.run(4, Hypothesis::h0).tau);
  CHECK_THROWS(fixed.evaluate_frame(CMatrix::Zero(3, 3)));
  CHECK_THROWS(sim.evaluate_frame(f.y));
}

TEST_CASE("serial and parallel executors agree bit for bit") {
  for (auto kind : {ExperimentKind::q_error, ExperimentKind::dist_h1, ExperimentKind::fap_curve,
                    ExperimentKind::roc, ExperimentKind::validate_lemmas}) {
    auto s = small_spec(kind);
    if (kind == ExperimentKind::q_error) s.sweep = {8, 16};
    s.engine.execution = Execution::serial;
    const auto a = run_experiment(s);
    s.engine.execution = Execution::parallel;
    s.engine.threads = 3;
    const auto b = run_experiment(s);
    REQUIRE(a.tables.size() == b.tables.size());
    for (std::size_t i = 0; i < a.tables.size(); ++i) CHECK(csv_text(a.tables[i], a) == csv_text(b.tables[i], b));
    CHECK(summary_text(a) == summary_text(b));
  }
}

TEST_CASE("physical mode runs") {
  auto s = small_spec(ExperimentKind::roc, 100);
  s.mode = GenerationMode::physical;
  const auto l = run_experiment(s);
  CHECK(l.summary["mode"] == "physical");
  CHECK(!l.tables.empty());
}

TEST_CASE("ledger tables") {
  auto s = small_spec(ExperimentKind::dist_h0);
  s.histogram_bins = 10;
  const auto l = run_experiment(s);
  const Table& h = l.table("dist_h0_hist");
  CHECK(h.rows.size() == 10);
  std::int64_t total = 0;
  for (std::size_t r = 0; r < h.rows.size(); ++r) {
    total += std::get<std::int64_t>(h.rows[r][h.column("count_tau")]);
    if (r > 0) CHECK(h.number(r, "bin_lo") == h.number(r - 1, "bin_hi"));
  }
  CHECK(total == 200);
  CHECK(l.summary["checks"]["affine_identity"] == true);
  CHECK_THROWS(l.table("nope"));
  CHECK_THROWS(h.column("nope"));
}

}
