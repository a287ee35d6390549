#pragma once

// Per-trial simulation and the experiment drivers. Every driver is a pure
// function of its ExperimentSpec: trial i always draws from the stream
// derived from (master seed, experiment id, i), records land in slot i, and
// all reductions run serially in index order.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "isac/config.hpp"
#include "isac/detectors.hpp"
#include "isac/statistics.hpp"
#include "isac/theory.hpp"
#include "isac/trial_engine.hpp"
#include "isac/waveform.hpp"

namespace isac {

struct ExperimentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ScenarioPolicy { regenerate, fixed };

enum class ExperimentKind { q_error, dist_h0, dist_h1, fap_curve, roc, drt_sweep, validate_lemmas };

const char* to_string(ExperimentKind k);
const char* to_string(ScenarioPolicy p);

struct SimulationSpec {
  SystemConfig cfg;
  GenerationMode mode = GenerationMode::statistical;
  ScenarioPolicy policy = ScenarioPolicy::regenerate;
  std::uint64_t master_seed = 1;
  std::string label = "default";
  bool reference_detectors = true;  // also evaluate pilot-only and payload-only
};

struct TrialRecord {
  double tau = 0.0;
  double tau_tilde = 0.0;  // asymptotic surrogate for the simulated hypothesis
  double q_dagger = 0.0;
  double q_tilde = 0.0;
  double cubic_residual = 0.0;
  double gamma_abs_sq = 0.0;
  double mu_over_beta = 0.0;
  cplx gamma;
  cplx alpha_hat;
  double pilot_only = 0.0;
  double data_only = 0.0;
  bool degenerate = false;
  ModelScalars model;
};

/// Simulates single trials. With ScenarioPolicy::fixed the scenario, plan
/// and models are drawn once from trial index UINT64_MAX and reused.
class TrialSimulator {
 public:
  explicit TrialSimulator(SimulationSpec spec);

  TrialRecord run(std::uint64_t trial, Hypothesis h) const;
  std::vector<TrialRecord> run_all(std::size_t trials, Hypothesis h, const EngineOptions& opts) const;

  /// run_all followed by a projection, without keeping whole records.
  template <class Project>
  auto map_trials(std::size_t trials, Hypothesis h, const EngineOptions& opts, Project&& project) const {
    using Value = std::decay_t<decltype(project(std::declval<const TrialRecord&>()))>;
    std::vector<Value> out(trials);
    for_each_trial(trials, opts, [&](std::size_t i) { out[i] = project(run(i, h)); });
    return out;
  }

  /// The received frame trial `trial` would see, for replay and CLI use.
  ReceivedFrame frame(std::uint64_t trial, Hypothesis h) const;

  /// Runs every detector on an externally supplied frame. Needs
  /// ScenarioPolicy::fixed; the asymptotic statistic uses the H0 form.
  TrialRecord evaluate_frame(const CMatrix& y) const;

  const SimulationSpec& spec() const { return spec_; }
  std::uint64_t experiment_id() const { return experiment_id_; }

  struct Context;

 private:
  Context context(RandomStream& rng, std::optional<Hypothesis> only) const;
  TrialRecord evaluate(const Context& ctx, const CMatrix& y, Hypothesis h) const;
  ReceivedFrame draw_frame(const Context& ctx, Hypothesis h, RandomStream& rng) const;

  SimulationSpec spec_;
  std::uint64_t experiment_id_;
  std::shared_ptr<const Context> fixed_;
};

// ---------------------------------------------------------------------------
// Ledger

using Cell = std::variant<std::int64_t, double, std::string>;

struct Column {
  std::string name;
  std::string description;
};

struct Table {
  std::string stem;  // artifact file name without extension
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  // Plot hints for the emitted script.
  std::string plot_x;
  std::vector<std::string> plot_y;
  bool log_x = false;
  bool log_y = false;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  void add_row(std::vector<Cell> row);
};

struct TrialLedger {
  ExperimentKind kind = ExperimentKind::q_error;
  SystemConfig cfg;
  std::uint64_t master_seed = 0;
  std::size_t trials = 0;
  std::vector<Table> tables;
  nlohmann::ordered_json summary;

  const Table& table(const std::string& stem_prefix) const;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::roc;
  SystemConfig cfg;
  std::size_t trials = 10000;
  std::size_t h0_trials = 0;  // 0 = same as trials
  std::uint64_t master_seed = 1;
  GenerationMode mode = GenerationMode::statistical;
  ScenarioPolicy policy = ScenarioPolicy::regenerate;
  // q_error: L values; fap_curve: log eta values (empty = derived from
  // p_fa_targets); roc: p_fa targets; drt_sweep: data powers in dBm.
  std::vector<double> sweep;
  std::vector<double> p_fa_targets{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::vector<double> pilot_powers_dbm{20.0, 25.0, 30.0};  // drt_sweep
  double p_fa = 1e-3;                                       // drt_sweep
  int histogram_bins = 50;
  bool dump_raw = false;
  EngineOptions engine;
};

/// Throws ExperimentError when the spec cannot run.
void validate_spec(const ExperimentSpec& spec);

TrialLedger run_experiment(const ExperimentSpec& spec);

TrialLedger run_q_error(const ExperimentSpec& spec);
TrialLedger run_distribution(const ExperimentSpec& spec, Hypothesis h);
TrialLedger run_fap_curve(const ExperimentSpec& spec);
TrialLedger run_roc(const ExperimentSpec& spec);
TrialLedger run_drt_sweep(const ExperimentSpec& spec);
TrialLedger run_validate_lemmas(const ExperimentSpec& spec);

// ---------------------------------------------------------------------------
// Statistics helpers

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval at the given z (1.96 for 95 %).
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

/// sqrt(p (1 - p) / n).
double binomial_sigma(double p, std::size_t trials);

/// Two-sample Kolmogorov-Smirnov distance (inputs need not be sorted).
double ks_distance(std::vector<double> a, std::vector<double> b);

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;       // unbiased
  double mean_stderr = 0.0;
  double variance_stderr = 0.0;  // sqrt((m4 - s^4) / n)
};

SampleMoments sample_moments(const std::vector<double>& x);

/// Count of x strictly greater than t.
std::size_t count_above(const std::vector<double>& x, double t);

/// Threshold t with exactly `exceed` of the samples strictly above it
/// (the exceed-th largest value; +inf style max when exceed is 0).
double threshold_for_count(std::vector<double> x, std::size_t exceed);

/// File-name stem encoding kind, L, powers and seed, e.g. roc_L128_pp20_pd30_seed7.
std::string artifact_stem(const std::string& kind, const SystemConfig& cfg, std::uint64_t seed,
                          const std::string& extra = "");

}  // namespace isac
