#include "isac/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "isac/scenario.hpp"

namespace isac {

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::q_error: return "q_error";
    case ExperimentKind::dist_h0: return "dist_h0";
    case ExperimentKind::dist_h1: return "dist_h1";
    case ExperimentKind::fap_curve: return "fap";
    case ExperimentKind::roc: return "roc";
    case ExperimentKind::drt_sweep: return "drt";
    case ExperimentKind::validate_lemmas: return "validate";
  }
  return "unknown";
}

const char* to_string(ScenarioPolicy p) {
  return p == ScenarioPolicy::regenerate ? "regenerate" : "fixed";
}

// ---------------------------------------------------------------------------
// TrialSimulator

struct TrialSimulator::Context {
  Scenario scenario;
  TransmitPlan plan;
  NullModel model;
  std::optional<NullModel> pilot_model;
  std::optional<NullModel> data_model;
  std::optional<StatisticalGenerator> gen_h0;
  std::optional<StatisticalGenerator> gen_h1;
};

TrialSimulator::TrialSimulator(SimulationSpec spec)
    : spec_(std::move(spec)), experiment_id_(stable_hash(spec_.label)) {
  spec_.cfg.validate();
  if (spec_.policy == ScenarioPolicy::fixed) {
    RandomStream rng = derive_trial_stream(spec_.master_seed, experiment_id_,
                                           std::numeric_limits<std::uint64_t>::max());
    fixed_ = std::make_shared<const Context>(context(rng, std::nullopt));
  }
}

// Builds the generator for `only` alone, or both when it is empty. The
// random draws do not depend on the choice.
TrialSimulator::Context TrialSimulator::context(RandomStream& rng, std::optional<Hypothesis> only) const {
  const SystemConfig& cfg = spec_.cfg;
  Scenario s = generate_scenario(cfg, rng);
  TransmitPlan plan = build_transmit_plan(cfg, s, rng);
  NullModel model = build_null_model(s, plan, cfg);
  Context ctx{std::move(s), std::move(plan), std::move(model), std::nullopt, std::nullopt,
              std::nullopt, std::nullopt};
  if (spec_.reference_detectors) {
    ctx.pilot_model = build_pilot_null_model(ctx.scenario, ctx.plan, cfg);
    ctx.data_model = build_data_null_model(ctx.scenario, ctx.plan, cfg);
  }
  if (spec_.mode == GenerationMode::statistical) {
    if (only != Hypothesis::h1) ctx.gen_h0.emplace(ctx.model, ctx.plan, cfg.alpha(), Hypothesis::h0);
    if (only != Hypothesis::h0) ctx.gen_h1.emplace(ctx.model, ctx.plan, cfg.alpha(), Hypothesis::h1);
  }
  return ctx;
}

ReceivedFrame TrialSimulator::draw_frame(const Context& ctx, Hypothesis h, RandomStream& rng) const {
  if (spec_.mode == GenerationMode::statistical) {
    return (h == Hypothesis::h0 ? *ctx.gen_h0 : *ctx.gen_h1).draw(rng);
  }
  return synthesize_physical(ctx.scenario, ctx.plan, spec_.cfg.noise_power_w(), h, rng);
}

TrialRecord TrialSimulator::evaluate(const Context& ctx, const CMatrix& y, Hypothesis h) const {
  const SufficientStats st = sufficient_stats(y, ctx.model, ctx.plan);
  const GlrtOutput g = glrt_statistic(st, ctx.model);
  TrialRecord r;
  r.tau = g.statistic;
  r.q_dagger = g.q_dagger;
  r.alpha_hat = g.alpha_hat;
  r.cubic_residual = g.cubic_residual;
  r.degenerate = g.degenerate;
  r.q_tilde = q_dagger_asymptotic(ctx.model);
  r.tau_tilde = asymptotic_statistic(st, ctx.model, h, spec_.cfg.alpha());
  r.gamma = st.gamma;
  r.gamma_abs_sq = st.gamma_abs_sq;
  r.mu_over_beta = st.mu_norm_sq / ctx.model.beta;
  r.model = ctx.model.scalars();
  if (ctx.pilot_model) r.pilot_only = pilot_only_statistic(y, *ctx.pilot_model, ctx.plan);
  if (ctx.data_model) r.data_only = data_only_statistic(y, *ctx.data_model, ctx.plan);
  return r;
}

TrialRecord TrialSimulator::run(std::uint64_t trial, Hypothesis h) const {
  RandomStream rng = derive_trial_stream(spec_.master_seed, experiment_id_, trial);
  if (fixed_) {
    const ReceivedFrame f = draw_frame(*fixed_, h, rng);
    return evaluate(*fixed_, f.y, h);
  }
  const Context ctx = context(rng, h);
  const ReceivedFrame f = draw_frame(ctx, h, rng);
  return evaluate(ctx, f.y, h);
}

ReceivedFrame TrialSimulator::frame(std::uint64_t trial, Hypothesis h) const {
  RandomStream rng = derive_trial_stream(spec_.master_seed, experiment_id_, trial);
  ReceivedFrame f;
  if (fixed_) {
    f = draw_frame(*fixed_, h, rng);
  } else {
    const Context ctx = context(rng, h);
    f = draw_frame(ctx, h, rng);
  }
  f.seed = derive_seed(spec_.master_seed, experiment_id_, trial);
  return f;
}

TrialRecord TrialSimulator::evaluate_frame(const CMatrix& y) const {
  if (!fixed_) throw ExperimentError("evaluate_frame needs the fixed scenario policy");
  if (y.rows() != fixed_->model.u.rows() || y.cols() != fixed_->model.u.cols()) {
    throw ExperimentError("frame is " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) +
                          ", configuration expects " + std::to_string(fixed_->model.u.rows()) + "x" +
                          std::to_string(fixed_->model.u.cols()));
  }
  return evaluate(*fixed_, y, Hypothesis::h0);
}

std::vector<TrialRecord> TrialSimulator::run_all(std::size_t trials, Hypothesis h,
                                                 const EngineOptions& opts) const {
  std::vector<TrialRecord> out(trials);
  for_each_trial(trials, opts, [&](std::size_t i) { out[i] = run(i, h); });
  return out;
}

// ---------------------------------------------------------------------------
// Ledger

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  throw std::out_of_range("table '" + stem + "' has no column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw std::invalid_argument("column '" + name + "' is not numeric");
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw std::invalid_argument("table '" + stem + "': row has " + std::to_string(row.size()) +
                                " cells, expected " + std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

const Table& TrialLedger::table(const std::string& stem_prefix) const {
  for (const auto& t : tables) {
    if (t.stem.rfind(stem_prefix, 0) == 0) return t;
  }
  throw std::out_of_range("ledger has no table starting with '" + stem_prefix + "'");
}

// ---------------------------------------------------------------------------
// Statistics helpers

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = double(trials);
  const double p = double(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double binomial_sigma(double p, std::size_t trials) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / double(trials));
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 1.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size());
  const double nb = double(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  return d;
}

SampleMoments sample_moments(const std::vector<double>& x) {
  SampleMoments m;
  const double n = double(x.size());
  if (x.size() < 2) return m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : x) {
    const double d = (v - m.mean) * (v - m.mean);
    m2 += d;
    m4 += d * d;
  }
  m.variance = m2 / (n - 1.0);
  m2 /= n;
  m4 /= n;
  m.mean_stderr = std::sqrt(m.variance / n);
  m.variance_stderr = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return m;
}

std::size_t count_above(const std::vector<double>& x, double t) {
  return static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [t](double v) { return v > t; }));
}

double threshold_for_count(std::vector<double> x, std::size_t exceed) {
  if (x.empty()) return 0.0;
  std::sort(x.begin(), x.end());
  if (exceed >= x.size()) return -std::numeric_limits<double>::infinity();
  return x[x.size() - 1 - exceed];
}

namespace {

std::string power_tag(double dbm) {
  if (std::isinf(dbm)) return "off";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", dbm);
  std::string s = buf;
  std::replace(s.begin(), s.end(), '.', 'p');
  std::replace(s.begin(), s.end(), '-', 'm');
  return s;
}

}  // namespace

std::string artifact_stem(const std::string& kind, const SystemConfig& cfg, std::uint64_t seed,
                          const std::string& extra) {
  std::string s = kind + "_L" + std::to_string(cfg.frame_length) + "_pp" + power_tag(cfg.p_pilot_dbm) +
                  "_pd" + power_tag(cfg.p_data_dbm);
  if (!extra.empty()) s += "_" + extra;
  return s + "_seed" + std::to_string(seed);
}

// ---------------------------------------------------------------------------
// Drivers

namespace {

using nlohmann::ordered_json;

SimulationSpec simulation(const ExperimentSpec& spec, const SystemConfig& cfg, std::string label,
                          bool reference = false) {
  SimulationSpec s;
  s.cfg = cfg;
  s.mode = spec.mode;
  s.policy = spec.policy;
  s.master_seed = spec.master_seed;
  s.label = std::move(label);
  s.reference_detectors = reference;
  return s;
}

TrialLedger ledger_for(const ExperimentSpec& spec, ExperimentKind kind) {
  TrialLedger l;
  l.kind = kind;
  l.cfg = spec.cfg;
  l.master_seed = spec.master_seed;
  l.trials = spec.trials;
  l.summary["kind"] = to_string(kind);
  l.summary["tool_version"] = ISAC_VERSION;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(spec.cfg)));
  l.summary["config_hash"] = hash;
  l.summary["master_seed"] = spec.master_seed;
  l.summary["trials"] = spec.trials;
  l.summary["mode"] = to_string(spec.mode);
  l.summary["scenario_policy"] = to_string(spec.policy);
  return l;
}

std::size_t h0_count(const ExperimentSpec& spec) { return spec.h0_trials ? spec.h0_trials : spec.trials; }

SystemConfig pilot_only_system(SystemConfig cfg) {
  cfg.p_data_dbm = -std::numeric_limits<double>::infinity();
  return cfg;
}

// Every check records its own flag; the overall flag is their conjunction.
void finish(TrialLedger& l, const ordered_json& checks) {
  bool pass = true;
  for (const auto& [name, value] : checks.items()) {
    if (value.is_boolean()) pass = pass && value.get<bool>();
  }
  l.summary["checks"] = checks;
  l.summary["pass"] = pass;
}

}  // namespace

void validate_spec(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw ExperimentError("trials must be >= 1");
  try {
    spec.cfg.validate();
  } catch (const ConfigError& e) {
    throw ExperimentError(e.what());
  }
  switch (spec.kind) {
    case ExperimentKind::q_error:
      for (double l : spec.sweep) {
        if (l < 2 || l != std::floor(l)) throw ExperimentError("q_error sweep needs integer L >= 2");
      }
      break;
    case ExperimentKind::roc:
    case ExperimentKind::fap_curve:
      for (double p : (spec.kind == ExperimentKind::roc && !spec.sweep.empty()) ? spec.sweep
                                                                               : spec.p_fa_targets) {
        if (!(p > 0.0 && p < 1.0)) throw ExperimentError("p_fa targets must lie in (0, 1)");
      }
      break;
    case ExperimentKind::drt_sweep:
      if (!(spec.p_fa > 0.0 && spec.p_fa < 1.0)) throw ExperimentError("p_fa must lie in (0, 1)");
      if (spec.pilot_powers_dbm.empty()) throw ExperimentError("drt sweep needs pilot powers");
      for (double p : spec.pilot_powers_dbm) {
        if (!std::isfinite(p)) throw ExperimentError("pilot powers must be finite");
      }
      for (double p : spec.sweep) {
        if (std::isnan(p) || p == std::numeric_limits<double>::infinity()) {
          throw ExperimentError("data powers must be finite or -inf");
        }
      }
      break;
    default:
      break;
  }
  if (spec.histogram_bins < 1) throw ExperimentError("histogram_bins must be >= 1");
}

TrialLedger run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::q_error: return run_q_error(spec);
    case ExperimentKind::dist_h0: return run_distribution(spec, Hypothesis::h0);
    case ExperimentKind::dist_h1: return run_distribution(spec, Hypothesis::h1);
    case ExperimentKind::fap_curve: return run_fap_curve(spec);
    case ExperimentKind::roc: return run_roc(spec);
    case ExperimentKind::drt_sweep: return run_drt_sweep(spec);
    case ExperimentKind::validate_lemmas: return run_validate_lemmas(spec);
  }
  throw ExperimentError("unknown experiment kind");
}

TrialLedger run_q_error(const ExperimentSpec& spec) {
  validate_spec(spec);
  TrialLedger ledger = ledger_for(spec, ExperimentKind::q_error);
  const std::vector<double> ls = spec.sweep.empty() ? std::vector<double>{8, 16, 32, 64} : spec.sweep;

  Table t;
  t.stem = artifact_stem("q_error", spec.cfg, spec.master_seed);
  t.columns = {{"L", "frame length"},
               {"delta_q", "mean of |Q - Q_tilde| / |Q| over H0 frames"},
               {"stderr", "standard error of delta_q"},
               {"trials", "frames averaged"}};
  t.plot_x = "L";
  t.plot_y = {"delta_q"};
  t.log_x = true;

  std::vector<double> values;
  for (double lv : ls) {
    SystemConfig cfg = spec.cfg;
    cfg.set_frame_length(static_cast<int>(lv));
    cfg.validate();
    const TrialSimulator sim(simulation(spec, cfg, "q_error/L=" + std::to_string(cfg.frame_length)));
    const auto err = sim.map_trials(spec.trials, Hypothesis::h0, spec.engine, [](const TrialRecord& r) {
      return r.q_dagger != 0.0 ? std::abs(r.q_dagger - r.q_tilde) / std::abs(r.q_dagger) : 0.0;
    });
    const SampleMoments m = sample_moments(err);
    const double mean = err.size() == 1 ? err[0] : m.mean;
    values.push_back(mean);
    t.add_row({std::int64_t(cfg.frame_length), mean, m.mean_stderr, std::int64_t(spec.trials)});
  }
  ledger.tables.push_back(std::move(t));

  ordered_json checks;
  bool monotone = true;
  for (std::size_t i = 1; i < values.size(); ++i) monotone = monotone && values[i] < values[i - 1];
  checks["monotone_decreasing"] = monotone;
  ledger.summary["delta_q"] = values;
  if (values.size() >= 2) ledger.summary["last_over_first"] = values.back() / values.front();
  finish(ledger, checks);
  return ledger;
}

TrialLedger run_distribution(const ExperimentSpec& spec, Hypothesis h) {
  validate_spec(spec);
  const ExperimentKind kind = h == Hypothesis::h0 ? ExperimentKind::dist_h0 : ExperimentKind::dist_h1;
  TrialLedger ledger = ledger_for(spec, kind);
  const TrialSimulator sim(simulation(spec, spec.cfg, std::string("dist/") + to_string(h)));
  const auto records = sim.run_all(spec.trials, h, spec.engine);

  std::vector<double> tau(records.size());
  std::vector<double> tilde(records.size());
  double affine_err = 0.0;
  const cplx alpha = spec.cfg.alpha();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TrialRecord& r = records[i];
    tau[i] = r.tau;
    tilde[i] = r.tau_tilde;
    const double l = r.model.frame_length;
    const double slope = l / (r.model.lambda_p_bar_sq * r.model.beta_bar);
    double x = r.model.lambda_d_bar_sq / (l * r.model.lambda_p_bar_sq);
    if (h == Hypothesis::h1) x *= 1.0 + std::norm(alpha) * r.model.lambda_p_bar_sq * r.model.beta_bar;
    const double recovered = (r.tau_tilde - (x - std::log1p(x))) / slope;
    const double scale = std::max(r.gamma_abs_sq, 1e-300);
    affine_err = std::max(affine_err, std::abs(recovered - r.gamma_abs_sq) / scale);
  }
  const double ks = ks_distance(tau, tilde);

  std::vector<double> pooled = tau;
  pooled.insert(pooled.end(), tilde.begin(), tilde.end());
  std::sort(pooled.begin(), pooled.end());
  const double lo = pooled.front();
  const double hi = pooled[static_cast<std::size_t>(0.999 * double(pooled.size() - 1))];
  const int bins = spec.histogram_bins;
  std::vector<double> edges(bins + 1);
  for (int b = 0; b <= bins; ++b) edges[b] = lo + (hi - lo) * double(b) / bins;
  auto histogram = [&](const std::vector<double>& v) {
    std::vector<std::int64_t> counts(bins, 0);
    for (double x : v) {
      int b = hi > lo ? static_cast<int>((x - lo) / (hi - lo) * bins) : 0;
      counts[std::clamp(b, 0, bins - 1)]++;
    }
    return counts;
  };
  const auto c_tau = histogram(tau);
  const auto c_tilde = histogram(tilde);

  const std::string tag = std::string("dist_") + (h == Hypothesis::h0 ? "h0" : "h1");
  Table hist;
  hist.stem = artifact_stem(tag + "_hist", spec.cfg, spec.master_seed);
  hist.columns = {{"bin_lo", "left bin edge"},
                  {"bin_hi", "right bin edge (last bin also holds values above it)"},
                  {"count_tau", "frames with the GLRT statistic in the bin"},
                  {"count_tau_tilde", "frames with the asymptotic statistic in the bin"}};
  hist.plot_x = "bin_lo";
  hist.plot_y = {"count_tau", "count_tau_tilde"};
  for (int b = 0; b < bins; ++b) hist.add_row({edges[b], edges[b + 1], c_tau[b], c_tilde[b]});

  Table cdf;
  cdf.stem = artifact_stem(tag + "_cdf", spec.cfg, spec.master_seed);
  cdf.columns = {{"x", "statistic value"},
                 {"ecdf_tau", "empirical CDF of the GLRT statistic"},
                 {"ecdf_tau_tilde", "empirical CDF of the asymptotic statistic"}};
  cdf.plot_x = "x";
  cdf.plot_y = {"ecdf_tau", "ecdf_tau_tilde"};
  {
    std::vector<double> st = tau;
    std::vector<double> sa = tilde;
    std::sort(st.begin(), st.end());
    std::sort(sa.begin(), sa.end());
    const double n = double(st.size());
    for (double x : edges) {
      const double ft = double(std::upper_bound(st.begin(), st.end(), x) - st.begin()) / n;
      const double fa = double(std::upper_bound(sa.begin(), sa.end(), x) - sa.begin()) / n;
      cdf.add_row({x, ft, fa});
    }
  }
  ledger.tables.push_back(std::move(hist));
  ledger.tables.push_back(std::move(cdf));

  if (spec.dump_raw) {
    Table raw;
    raw.stem = artifact_stem(tag + "_raw", spec.cfg, spec.master_seed);
    raw.columns = {{"trial", "trial index"},
                   {"tau", "GLRT statistic"},
                   {"tau_tilde", "asymptotic statistic"},
                   {"gamma_abs_sq", "|gamma|^2"}};
    for (std::size_t i = 0; i < records.size(); ++i) {
      raw.add_row({std::int64_t(i), records[i].tau, records[i].tau_tilde, records[i].gamma_abs_sq});
    }
    ledger.tables.push_back(std::move(raw));
  }

  ledger.summary["ks_distance"] = ks;
  ledger.summary["affine_max_rel_err"] = affine_err;
  ledger.summary["mean_tau"] = sample_moments(tau).mean;
  ledger.summary["mean_tau_tilde"] = sample_moments(tilde).mean;
  ordered_json checks;
  checks["affine_identity"] = affine_err < 1e-9;
  finish(ledger, checks);
  return ledger;
}

TrialLedger run_fap_curve(const ExperimentSpec& spec) {
  validate_spec(spec);
  TrialLedger ledger = ledger_for(spec, ExperimentKind::fap_curve);
  const std::size_t n = spec.trials;
  const TrialSimulator isac(simulation(spec, spec.cfg, "fap"));
  const TrialSimulator radar(simulation(spec, pilot_only_system(spec.cfg), "fap"));

  struct Sample {
    double tau;
    double ratio;
  };
  const auto project = [](const TrialRecord& r) { return Sample{r.tau, r.model.power_ratio()}; };
  const auto s_isac = isac.map_trials(n, Hypothesis::h0, spec.engine, project);
  const auto s_radar = radar.map_trials(n, Hypothesis::h0, spec.engine, project);
  std::vector<double> tau_isac(n);
  std::vector<double> tau_radar(n);
  for (std::size_t i = 0; i < n; ++i) {
    tau_isac[i] = s_isac[i].tau;
    tau_radar[i] = s_radar[i].tau;
  }

  const int l = spec.cfg.frame_length;
  std::vector<double> thresholds = spec.sweep;
  if (thresholds.empty()) {
    for (double p : spec.p_fa_targets) thresholds.push_back(threshold_for_fap(p, l, s_isac[0].ratio));
  }
  std::sort(thresholds.begin(), thresholds.end());

  Table t;
  t.stem = artifact_stem("fap", spec.cfg, spec.master_seed);
  t.columns = {{"log_eta", "threshold in the log domain"},
               {"empirical", "GLRT false-alarm rate over H0 frames"},
               {"ci_lo", "Wilson 95% interval, lower"},
               {"ci_hi", "Wilson 95% interval, upper"},
               {"theory", "closed-form false-alarm probability (mean over trials)"},
               {"bound", "pilot-only false-alarm probability exp(-L log_eta)"},
               {"pilot_system_empirical", "GLRT false-alarm rate of the same system with the payload off"},
               {"pilot_system_ci_lo", "Wilson 95% interval, lower"},
               {"pilot_system_ci_hi", "Wilson 95% interval, upper"},
               {"within_3sigma", "1 if |empirical - theory| <= 3 sqrt(theory (1 - theory) / n)"},
               {"above_bound", "1 if empirical >= bound - 3 sigma(bound)"},
               {"above_pilot_system", "1 if empirical >= pilot_system_empirical - 3 sigma"}};
  t.plot_x = "log_eta";
  t.plot_y = {"empirical", "theory", "bound", "pilot_system_empirical"};
  t.log_y = true;

  bool all_within = true;
  bool all_above_bound = true;
  bool all_above_pilot = true;
  bool monotone = true;
  double prev = 2.0;
  for (double le : thresholds) {
    const std::size_t k = count_above(tau_isac, le);
    const std::size_t kr = count_above(tau_radar, le);
    double theory = 0.0;
    for (const auto& s : s_isac) theory += fap_closed_form(le, l, s.ratio);
    theory /= double(n);
    const double bound = fap_lower_bound(le, l);
    const double emp = double(k) / double(n);
    const double emp_r = double(kr) / double(n);
    const Interval ci = wilson_interval(k, n);
    const Interval ci_r = wilson_interval(kr, n);
    const bool within = std::abs(emp - theory) <= 3.0 * binomial_sigma(theory, n);
    const bool above = emp >= bound - 3.0 * binomial_sigma(bound, n);
    const double sd = std::sqrt(binomial_sigma(emp, n) * binomial_sigma(emp, n) +
                                binomial_sigma(emp_r, n) * binomial_sigma(emp_r, n));
    const bool above_pilot = emp >= emp_r - 3.0 * sd;
    all_within = all_within && within;
    all_above_bound = all_above_bound && above;
    all_above_pilot = all_above_pilot && above_pilot;
    monotone = monotone && emp <= prev;
    prev = emp;
    t.add_row({le, emp, ci.lo, ci.hi, theory, bound, emp_r, ci_r.lo, ci_r.hi, std::int64_t(within),
               std::int64_t(above), std::int64_t(above_pilot)});
  }
  ledger.tables.push_back(std::move(t));

  ordered_json checks;
  checks["theory_within_3sigma"] = all_within;
  checks["above_pilot_bound"] = all_above_bound;
  checks["above_pilot_system"] = all_above_pilot;
  checks["monotone_in_threshold"] = monotone;
  ledger.summary["power_ratio"] = s_isac[0].ratio;
  finish(ledger, checks);
  return ledger;
}

TrialLedger run_roc(const ExperimentSpec& spec) {
  validate_spec(spec);
  TrialLedger ledger = ledger_for(spec, ExperimentKind::roc);
  std::vector<double> targets = spec.sweep.empty() ? spec.p_fa_targets : spec.sweep;
  std::sort(targets.begin(), targets.end());

  const TrialSimulator sim(simulation(spec, spec.cfg, "roc", true));
  struct Sample {
    double tau;
    double pilot_only;
    double data_only;
    ModelScalars model;
  };
  const auto project = [](const TrialRecord& r) {
    return Sample{r.tau, r.pilot_only, r.data_only, r.model};
  };
  const std::size_t n0 = h0_count(spec);
  const std::size_t n1 = spec.trials;
  const auto h0 = sim.map_trials(n0, Hypothesis::h0, spec.engine, project);
  const auto h1 = sim.map_trials(n1, Hypothesis::h1, spec.engine, project);

  std::vector<double> pilot0(n0), data0(n0), pilot1(n1), data1(n1);
  for (std::size_t i = 0; i < n0; ++i) {
    pilot0[i] = h0[i].pilot_only;
    data0[i] = h0[i].data_only;
  }
  for (std::size_t i = 0; i < n1; ++i) {
    pilot1[i] = h1[i].pilot_only;
    data1[i] = h1[i].data_only;
  }

  const int l = spec.cfg.frame_length;
  const double a2 = std::norm(spec.cfg.alpha());

  Table t;
  t.stem = artifact_stem("roc", spec.cfg, spec.master_seed);
  t.columns = {{"p_fa", "target false-alarm probability"},
               {"log_eta", "calibrated threshold (mean over trials)"},
               {"fap_empirical", "GLRT false-alarm rate over H0 frames"},
               {"pd_empirical", "GLRT detection rate over H1 frames"},
               {"pd_ci_lo", "Wilson 95% interval, lower"},
               {"pd_ci_hi", "Wilson 95% interval, upper"},
               {"pd_theory", "Marcum-Q closed form (mean over trials)"},
               {"pd_bound", "pilot-only upper bound (mean over trials)"},
               {"pd_theory_kappa", "asymptotic statistic evaluated without linearizing kappa"},
               {"pd_pilot_only", "pilot-only detector at the GLRT's empirical false-alarm rate"},
               {"pd_data_only", "payload-only detector at the GLRT's empirical false-alarm rate"},
               {"theory_within_3sigma", "1 if |pd_empirical - pd_theory| <= 3 sigma"},
               {"below_bound", "1 if pd_empirical <= pd_bound + 3 sigma"},
               {"beats_pilot_only", "1 if pd_empirical >= pd_pilot_only - 3 sigma"}};
  t.plot_x = "p_fa";
  t.plot_y = {"pd_empirical", "pd_theory", "pd_bound", "pd_pilot_only"};
  t.log_x = true;

  bool all_within = true;
  bool all_below = true;
  bool all_beats = true;
  bool monotone = true;
  double prev_pd = -1.0;
  for (double p : targets) {
    std::size_t k0 = 0;
    double le_sum = 0.0;
    for (const auto& s : h0) {
      const double le = threshold_for_fap(p, l, s.model.power_ratio());
      k0 += s.tau > le;
    }
    std::size_t k1 = 0;
    double theory = 0.0;
    double bound = 0.0;
    double kappa = 0.0;
    for (const auto& s : h1) {
      const double le = threshold_for_fap(p, l, s.model.power_ratio());
      le_sum += le;
      k1 += s.tau > le;
      theory += dp_closed_form(p, a2, s.model);
      bound += dp_upper_bound(p, a2, s.model);
      kappa += dp_asymptotic_at_threshold(le, a2, s.model);
    }
    theory /= double(n1);
    bound /= double(n1);
    kappa /= double(n1);
    const double pd = double(k1) / double(n1);
    const Interval ci = wilson_interval(k1, n1);

    const double pilot_thr = threshold_for_count(pilot0, k0);
    const double data_thr = threshold_for_count(data0, k0);
    const double pd_pilot = double(count_above(pilot1, pilot_thr)) / double(n1);
    const double pd_data = double(count_above(data1, data_thr)) / double(n1);

    const bool within = std::abs(pd - theory) <= 3.0 * binomial_sigma(theory, n1);
    const bool below = pd <= bound + 3.0 * binomial_sigma(bound, n1);
    const double sd = std::hypot(binomial_sigma(pd, n1), binomial_sigma(pd_pilot, n1));
    const bool beats = pd >= pd_pilot - 3.0 * sd;
    all_within = all_within && within;
    all_below = all_below && below;
    all_beats = all_beats && beats;
    monotone = monotone && pd >= prev_pd;
    prev_pd = pd;
    t.add_row({p, le_sum / double(n1), double(k0) / double(n0), pd, ci.lo, ci.hi, theory, bound, kappa,
               pd_pilot, pd_data, std::int64_t(within), std::int64_t(below), std::int64_t(beats)});
  }
  ledger.tables.push_back(std::move(t));

  ordered_json checks;
  checks["theory_within_3sigma"] = all_within;
  checks["below_upper_bound"] = all_below;
  checks["beats_pilot_only"] = all_beats;
  checks["monotone_in_p_fa"] = monotone;
  ledger.summary["h0_trials"] = n0;
  ledger.summary["alpha_abs"] = spec.cfg.alpha_abs;
  finish(ledger, checks);
  return ledger;
}

namespace {

double rate_for(const SystemConfig& cfg) {
  RandomStream rng(0);
  const Scenario s = generate_scenario(cfg, rng);
  const TransmitPlan plan = build_transmit_plan(cfg, s, rng);
  return communication_rate(plan, s, cfg);
}

}  // namespace

TrialLedger run_drt_sweep(const ExperimentSpec& spec) {
  validate_spec(spec);
  TrialLedger ledger = ledger_for(spec, ExperimentKind::drt_sweep);
  std::vector<double> data_powers = spec.sweep;
  if (data_powers.empty()) {
    data_powers = {-std::numeric_limits<double>::infinity(), 0.0, 10.0, 20.0, 30.0};
  }
  std::sort(data_powers.begin(), data_powers.end());
  std::vector<double> pilot_powers = spec.pilot_powers_dbm;
  std::sort(pilot_powers.begin(), pilot_powers.end());

  const std::size_t n = spec.trials;
  const double a2 = std::norm(spec.cfg.alpha());
  const int l = spec.cfg.frame_length;

  Table t;
  t.stem = artifact_stem("drt", spec.cfg, spec.master_seed);
  t.columns = {{"p_pilot_dbm", "pilot power"},
               {"p_data_dbm", "payload power"},
               {"rate", std::string("sum rate in bit/s/Hz: ") + RateConvention::description},
               {"pd_empirical", "GLRT detection rate at the calibrated threshold"},
               {"pd_ci_lo", "Wilson 95% interval, lower"},
               {"pd_ci_hi", "Wilson 95% interval, upper"},
               {"pd_theory", "Marcum-Q closed form (mean over trials)"},
               {"pd_bound", "pilot-only upper bound (mean over trials)"}};
  t.plot_x = "rate";
  t.plot_y = {"pd_empirical", "pd_theory"};

  // pd[i][j]: pilot power i, data power j
  std::vector<std::vector<double>> pd(pilot_powers.size(), std::vector<double>(data_powers.size()));
  std::vector<std::vector<double>> rates = pd;
  bool reduction_ok = true;
  for (std::size_t i = 0; i < pilot_powers.size(); ++i) {
    for (std::size_t j = 0; j < data_powers.size(); ++j) {
      SystemConfig cfg = spec.cfg;
      cfg.p_pilot_dbm = pilot_powers[i];
      cfg.p_data_dbm = data_powers[j];
      char label[96];
      std::snprintf(label, sizeof label, "drt/pp=%g/pd=%g", cfg.p_pilot_dbm, cfg.p_data_dbm);
      const TrialSimulator sim(simulation(spec, cfg, label));
      struct Sample {
        double tau;
        ModelScalars model;
      };
      const auto h1 = sim.map_trials(n, Hypothesis::h1, spec.engine,
                                     [](const TrialRecord& r) { return Sample{r.tau, r.model}; });
      std::size_t k = 0;
      double theory = 0.0;
      double bound = 0.0;
      for (const auto& s : h1) {
        k += s.tau > threshold_for_fap(spec.p_fa, l, s.model.power_ratio());
        theory += dp_closed_form(spec.p_fa, a2, s.model);
        bound += dp_upper_bound(spec.p_fa, a2, s.model);
      }
      theory /= double(n);
      bound /= double(n);
      if (std::isinf(cfg.p_data_dbm)) reduction_ok = reduction_ok && std::abs(theory - bound) < 1e-12;
      const double rate = rate_for(cfg);
      const double p = double(k) / double(n);
      const Interval ci = wilson_interval(k, n);
      pd[i][j] = p;
      rates[i][j] = rate;
      t.add_row({cfg.p_pilot_dbm, cfg.p_data_dbm, rate, p, ci.lo, ci.hi, theory, bound});
    }
  }
  ledger.tables.push_back(std::move(t));

  auto sd2 = [n](double a, double b) { return std::hypot(binomial_sigma(a, n), binomial_sigma(b, n)); };
  bool ordered = true;
  for (std::size_t i = 1; i < pilot_powers.size(); ++i) {
    for (std::size_t j = 0; j < data_powers.size(); ++j) {
      ordered = ordered && pd[i][j] >= pd[i - 1][j] - 3.0 * sd2(pd[i][j], pd[i - 1][j]);
    }
  }
  bool nonincreasing = true;
  bool rate_increasing = true;
  for (std::size_t i = 0; i < pilot_powers.size(); ++i) {
    for (std::size_t j = 1; j < data_powers.size(); ++j) {
      nonincreasing = nonincreasing && pd[i][j] <= pd[i][j - 1] + 3.0 * sd2(pd[i][j], pd[i][j - 1]);
      rate_increasing = rate_increasing && rates[i][j] > rates[i][j - 1];
    }
  }
  ordered_json checks;
  checks["ordered_by_pilot_power"] = ordered;
  checks["nonincreasing_in_rate"] = nonincreasing;
  checks["rate_increasing_in_data_power"] = rate_increasing;
  checks["data_off_matches_pilot_only"] = reduction_ok;
  ledger.summary["p_fa"] = spec.p_fa;
  finish(ledger, checks);
  return ledger;
}

TrialLedger run_validate_lemmas(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  spec.policy = ScenarioPolicy::fixed;
  spec.mode = GenerationMode::statistical;
  validate_spec(spec);
  TrialLedger ledger = ledger_for(spec, ExperimentKind::validate_lemmas);
  const std::size_t n = spec.trials;
  const cplx alpha = spec.cfg.alpha();

  const TrialSimulator sim(simulation(spec, spec.cfg, "validate"));
  SystemConfig zero_cfg = spec.cfg;
  zero_cfg.alpha_abs = 0.0;
  const TrialSimulator zero_sim(simulation(spec, zero_cfg, "validate"));

  const auto r0 = sim.run_all(n, Hypothesis::h0, spec.engine);
  const auto r1 = sim.run_all(n, Hypothesis::h1, spec.engine);
  const auto rz = zero_sim.run_all(n, Hypothesis::h1, spec.engine);
  const ModelScalars ms = r0.front().model;

  const MomentsH0 m0 = moments_h0(ms);
  const MomentsH1 m1 = moments_h1(ms, alpha);

  Table t;
  t.stem = artifact_stem("validate", spec.cfg, spec.master_seed);
  t.columns = {{"check", "moment being compared"},
               {"hypothesis", "H0 or H1"},
               {"empirical", "sample estimate"},
               {"closed_form", "closed-form value"},
               {"stderr", "standard error of the sample estimate"},
               {"z", "(empirical - closed_form) / stderr"},
               {"pass", "1 if |z| <= 4"}};

  ordered_json checks;
  auto add = [&](const std::string& name, const char* hyp, double emp, double cf, double se) {
    const double z = se > 0.0 ? (emp - cf) / se : (emp == cf ? 0.0 : INFINITY);
    const bool pass = std::abs(z) <= 4.0;
    t.add_row({name, std::string(hyp), emp, cf, se, z, std::int64_t(pass)});
    checks[name] = pass;
  };
  auto column = [](const std::vector<TrialRecord>& r, auto f) {
    std::vector<double> v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) v[i] = f(r[i]);
    return v;
  };

  const double l = ms.frame_length;
  const auto mu0 = sample_moments(column(r0, [](const TrialRecord& r) { return r.mu_over_beta; }));
  const auto g0 = sample_moments(column(r0, [](const TrialRecord& r) { return r.gamma_abs_sq; }));
  const auto mu1 = sample_moments(column(r1, [](const TrialRecord& r) { return r.mu_over_beta; }));
  const auto g1 = sample_moments(column(r1, [](const TrialRecord& r) { return r.gamma_abs_sq; }));
  const auto chi = sample_moments(column(r0, [l](const TrialRecord& r) { return 2.0 * l * r.mu_over_beta; }));
  const auto gre = sample_moments(column(r0, [](const TrialRecord& r) { return r.gamma.real(); }));
  const auto gim = sample_moments(column(r0, [](const TrialRecord& r) { return r.gamma.imag(); }));
  const auto gsq = sample_moments(column(r0, [](const TrialRecord& r) { return (r.gamma * r.gamma).real(); }));

  add("lemma2_mean", "H0", mu0.mean, m0.mu_mean, mu0.mean_stderr);
  add("lemma2_var", "H0", mu0.variance, m0.mu_var, mu0.variance_stderr);
  add("lemma3_mean", "H0", g0.mean, m0.gamma_mean, g0.mean_stderr);
  add("lemma3_var", "H0", g0.variance, m0.gamma_var, g0.variance_stderr);
  add("lemma4_mean", "H1", mu1.mean, m1.mu_mean, mu1.mean_stderr);
  add("lemma4_var", "H1", mu1.variance, m1.mu_var, mu1.variance_stderr);
  add("lemma5_mean", "H1", g1.mean, m1.gamma_mean, g1.mean_stderr);
  add("lemma5_var", "H1", g1.variance, m1.gamma_var, g1.variance_stderr);
  add("chi2_2L_mean", "H0", chi.mean, 2.0 * l, chi.mean_stderr);
  add("chi2_2L_var", "H0", chi.variance, 4.0 * l, chi.variance_stderr);
  add("gamma_mean_real", "H0", gre.mean, 0.0, gre.mean_stderr);
  add("gamma_mean_imag", "H0", gim.mean, 0.0, gim.mean_stderr);
  add("gamma_circular", "H0", gsq.mean, 0.0, gsq.mean_stderr);

  // |gamma|^2 / (var/2) under H1 against a non-central chi-square with 2
  // degrees of freedom and non-centrality 2 |alpha|^2 lp bb / kappa.
  const double var_gamma = m1.kappa * ms.lambda_p_bar_sq * ms.beta_bar / (l * l);
  const double nc = 2.0 * std::norm(alpha) * ms.lambda_p_bar_sq * ms.beta_bar / m1.kappa;
  const auto ncx = sample_moments(
      column(r1, [var_gamma](const TrialRecord& r) { return r.gamma_abs_sq / (var_gamma / 2.0); }));
  add("ncx2_mean", "H1", ncx.mean, 2.0 + nc, ncx.mean_stderr);
  add("ncx2_var", "H1", ncx.variance, 4.0 + 4.0 * nc, ncx.variance_stderr);

  ledger.tables.push_back(std::move(t));

  bool same = rz.size() == r0.size();
  for (std::size_t i = 0; same && i < r0.size(); ++i) {
    same = rz[i].tau == r0[i].tau && rz[i].gamma == r0[i].gamma && rz[i].mu_over_beta == r0[i].mu_over_beta;
  }
  checks["alpha0_run_equals_h0"] = same;
  const MomentsH1 mz = moments_h1(ms, 0.0);
  checks["alpha0_moments_exact"] = mz.kappa == 1.0 && mz.mu_mean == m0.mu_mean && mz.mu_var == m0.mu_var &&
                                   mz.gamma_mean == m0.gamma_mean && mz.gamma_var == m0.gamma_var;
  ledger.summary["gamma_shape_ratio"] = g0.variance / (g0.mean * g0.mean);
  ledger.summary["model"] = {{"L", ms.frame_length},
                             {"beta_bar", ms.beta_bar},
                             {"lambda_p_bar_sq", ms.lambda_p_bar_sq},
                             {"lambda_d_bar_sq", ms.lambda_d_bar_sq}};
  finish(ledger, checks);
  return ledger;
}

}  // namespace isac
