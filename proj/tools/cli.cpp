#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "isac/config.hpp"
#include "isac/montecarlo.hpp"
#include "isac/report.hpp"
#include "isac/theory.hpp"
#include "isac/waveform.hpp"

namespace isac::cli {

namespace {

struct CommonOptions {
  std::string config = "defaults";
  std::vector<std::string> overrides;
  std::string trials = "1e4";
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool serial = false;
  std::string mode = "statistical";
  std::string policy = "regenerate";
};

void add_common(CLI::App* app, CommonOptions& o, bool with_trials = true) {
  app->add_option("--config,-c", o.config, "config file, or 'defaults'");
  app->add_option("--override,-o", o.overrides, "key=value, applied after the file, last wins");
  if (with_trials) app->add_option("--trials,-n", o.trials, "trials per point (accepts 1e6)");
  app->add_option("--out-dir", o.out_dir, "artifact directory (default $ISAC_OUT_DIR or ./isac_out)");
  app->add_option("--seed", o.seed, "master seed (default: the config seed)");
  app->add_option("--threads", o.threads, "worker threads, 0 = OpenMP default");
  app->add_flag("--serial", o.serial, "use the serial reference loop");
  app->add_option("--mode", o.mode, "statistical | physical")->check(CLI::IsMember({"statistical", "physical"}));
  app->add_option("--policy", o.policy, "regenerate | fixed")->check(CLI::IsMember({"regenerate", "fixed"}));
}

std::size_t parse_count(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v >= 1.0) || v > 1e12 || v != std::floor(v)) {
    throw ExperimentError("trial count '" + text + "' is not a positive integer");
  }
  return static_cast<std::size_t>(v);
}

std::filesystem::path resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ISAC_OUT_DIR"); env && *env) return env;
  return "isac_out";
}

ExperimentSpec make_spec(const CommonOptions& o, ExperimentKind kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.cfg = load_config(o.config, o.overrides);
  spec.trials = parse_count(o.trials);
  spec.master_seed = o.seed.value_or(spec.cfg.seed);
  spec.mode = o.mode == "physical" ? GenerationMode::physical : GenerationMode::statistical;
  spec.policy = o.policy == "fixed" ? ScenarioPolicy::fixed : ScenarioPolicy::regenerate;
  spec.engine.execution = o.serial ? Execution::serial : Execution::parallel;
  spec.engine.threads = o.threads;
  return spec;
}

int run_and_emit(const ExperimentSpec& spec, const CommonOptions& o, std::ostream& out) {
  const TrialLedger ledger = run_experiment(spec);
  const auto paths = emit_plot_data(ledger, resolve_out_dir(o.out_dir));
  for (const auto& p : paths) out << "wrote " << p.string() << "\n";
  for (const auto& [name, value] : ledger.summary["checks"].items()) {
    out << (value.get<bool>() ? "PASS " : "FAIL ") << name << "\n";
  }
  out << "overall " << (ledger.summary["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
  return 0;
}

SimulationSpec detect_simulation(const SystemConfig& cfg, std::uint64_t seed, const std::string& mode) {
  SimulationSpec s;
  s.cfg = cfg;
  s.mode = mode == "physical" ? GenerationMode::physical : GenerationMode::statistical;
  s.policy = ScenarioPolicy::fixed;
  s.master_seed = seed;
  s.label = "detect";
  return s;
}

void report_line(std::ostream& out, const char* name, double statistic, double log_threshold,
                 const std::string& extra) {
  const Decision d = decide(statistic, log_threshold);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s tau=%.10g threshold=%.10g%s decision=%s\n", name, d.statistic,
                d.log_threshold, extra.c_str(), d.detected ? "detected" : "not detected");
  out << buf;
}

int detect_once(const CommonOptions& o, const std::string& frame_path, double p_fa, std::ostream& out) {
  const SystemConfig cfg = load_config(o.config, o.overrides);
  const ReceivedFrame frame = read_frame(frame_path);
  const TrialSimulator sim(detect_simulation(cfg, o.seed.value_or(cfg.seed), o.mode));
  const TrialRecord r = sim.evaluate_frame(frame.y);
  const int l = cfg.frame_length;
  const double glrt_thr = threshold_for_fap(p_fa, l, r.model.power_ratio());
  char extra[160];
  std::snprintf(extra, sizeof extra, " eta=%.10g alpha_hat=(%.6g,%.6g)", std::exp(glrt_thr), r.alpha_hat.real(),
                r.alpha_hat.imag());
  out << "frame " << frame_path << " M=" << frame.y.rows() << " L=" << frame.y.cols() << " p_fa=" << p_fa
      << "\n";
  report_line(out, "glrt", r.tau, glrt_thr, extra);
  if (cfg.pilot_power_w() > 0.0) {
    report_line(out, "pilot-only", r.pilot_only, pilot_only_threshold(p_fa, l), "");
  } else {
    out << "pilot-only unavailable (no pilot power)\n";
  }
  if (cfg.data_power_w() > 0.0 && cfg.data_length() > 0) {
    report_line(out, "data-only", r.data_only, data_only_threshold(p_fa, l), "");
  } else {
    out << "data-only  unavailable (no data power)\n";
  }
  return 0;
}

int synth(const CommonOptions& o, const std::string& frame_path, const std::string& hyp, std::uint64_t index,
          std::ostream& out) {
  const SystemConfig cfg = load_config(o.config, o.overrides);
  const TrialSimulator sim(detect_simulation(cfg, o.seed.value_or(cfg.seed), o.mode));
  const ReceivedFrame f = sim.frame(index, hyp == "h1" ? Hypothesis::h1 : Hypothesis::h0);
  write_frame(frame_path, f);
  out << "wrote " << frame_path << " hypothesis=" << to_string(f.hypothesis) << " trial=" << index << "\n";
  return 0;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"GLRT target detection for bistatic ISAC frames", "isac"};
  app.set_version_flag("--version", std::string("isac-glrt ") + ISAC_VERSION);
  app.require_subcommand(1);

  CommonOptions o;
  std::vector<double> sweep;
  std::vector<double> p_fa_list;
  std::vector<double> pilot_powers;
  std::string hypothesis = "h0";
  std::string frame_path;
  double p_fa = 1e-3;
  std::uint64_t frame_index = 0;
  bool dump_raw = false;
  std::size_t h0_trials = 0;
  int bins = 50;

  auto* q = app.add_subcommand("q-error", "relative error of the asymptotic amplitude factor versus L");
  add_common(q, o);
  q->add_option("--lengths", sweep, "frame lengths");

  auto* dist = app.add_subcommand("dist", "histograms of the statistic and its asymptotic form");
  add_common(dist, o);
  dist->add_option("--hypothesis", hypothesis, "h0 | h1")->check(CLI::IsMember({"h0", "h1"}));
  dist->add_option("--bins", bins, "histogram bins");
  dist->add_flag("--raw", dump_raw, "also write the per-trial samples");

  auto* fap = app.add_subcommand("fap", "empirical false-alarm probability against the closed form");
  add_common(fap, o);
  fap->add_option("--log-eta", sweep, "thresholds in the log domain");
  fap->add_option("--p-fa", p_fa_list, "target probabilities (used when --log-eta is absent)");

  auto* roc = app.add_subcommand("roc", "detection probability against the closed form and the references");
  add_common(roc, o);
  roc->add_option("--p-fa", p_fa_list, "false-alarm targets");
  roc->add_option("--h0-trials", h0_trials, "H0 trials for the empirical thresholds (default: --trials)");

  auto* drt = app.add_subcommand("drt", "detection probability versus communication rate");
  add_common(drt, o);
  drt->add_option("--data-dbm", sweep, "payload powers (use -inf for no payload)");
  drt->add_option("--pilot-dbm", pilot_powers, "pilot powers");
  drt->add_option("--p-fa", p_fa, "false-alarm target");

  auto* val = app.add_subcommand("validate", "moment checks on a fixed scenario");
  add_common(val, o);

  auto* det = app.add_subcommand("detect-once", "run all detectors on one stored frame");
  add_common(det, o, false);
  det->add_option("--frame", frame_path, "frame file")->required();
  det->add_option("--p-fa", p_fa, "false-alarm target for the thresholds");

  auto* syn = app.add_subcommand("synth", "write one simulated frame for detect-once");
  add_common(syn, o, false);
  syn->add_option("--frame", frame_path, "output frame file")->required();
  syn->add_option("--hypothesis", hypothesis, "h0 | h1")->check(CLI::IsMember({"h0", "h1"}));
  syn->add_option("--index", frame_index, "trial index of the frame");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    auto spec_for = [&](ExperimentKind k) {
      ExperimentSpec s = make_spec(o, k);
      s.sweep = sweep;
      if (!p_fa_list.empty()) s.p_fa_targets = p_fa_list;
      if (!pilot_powers.empty()) s.pilot_powers_dbm = pilot_powers;
      s.p_fa = p_fa;
      s.h0_trials = h0_trials;
      s.histogram_bins = bins;
      s.dump_raw = dump_raw;
      return s;
    };
    if (*q) return run_and_emit(spec_for(ExperimentKind::q_error), o, out);
    if (*dist) {
      return run_and_emit(spec_for(hypothesis == "h1" ? ExperimentKind::dist_h1 : ExperimentKind::dist_h0), o, out);
    }
    if (*fap) return run_and_emit(spec_for(ExperimentKind::fap_curve), o, out);
    if (*roc) return run_and_emit(spec_for(ExperimentKind::roc), o, out);
    if (*drt) return run_and_emit(spec_for(ExperimentKind::drt_sweep), o, out);
    if (*val) return run_and_emit(spec_for(ExperimentKind::validate_lemmas), o, out);
    if (*det) return detect_once(o, frame_path, p_fa, out);
    if (*syn) return synth(o, frame_path, hypothesis, frame_index, out);
  } catch (const ConfigError& e) {
    err << "isac: config error: " << e.what() << "\n";
    return 2;
  } catch (const ExperimentError& e) {
    err << "isac: experiment error: " << e.what() << "\n";
    return 3;
  } catch (const FormatError& e) {
    err << "isac: frame format error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    err << "isac: i/o error: " << e.what() << "\n";
    return 3;
  } catch (const InvalidTarget& e) {
    err << "isac: invalid target: " << e.what() << "\n";
    return 3;
  } catch (const InvalidSplit& e) {
    err << "isac: invalid frame split: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace isac::cli
