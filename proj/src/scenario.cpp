#include "isac/scenario.hpp"

#include <cmath>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <stdexcept>

namespace isac {

CMatrix Scenario::reconstruct_clutter() const {
  CMatrix h = CMatrix::Zero(a_t.size(), b_t.size());
  const int m = static_cast<int>(a_t.size());
  const int n = static_cast<int>(b_t.size());
  for (const auto& p : clutter_paths) {
    h += p.gain * steering_vector(p.aoa_deg, m) * steering_vector(p.aod_deg, n).adjoint();
  }
  return h;
}

double dbm_to_watts(double p_dbm) { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

double path_loss_db(double distance_m, const SystemConfig& cfg, double shadow_db) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("path_loss_db: distance must be positive");
  return cfg.pathloss_a + 10.0 * cfg.pathloss_b * std::log10(distance_m) + shadow_db;
}

double path_gain_variance(double distance_m, const SystemConfig& cfg, double shadow_db) {
  return std::pow(10.0, -0.1 * path_loss_db(distance_m, cfg, shadow_db));
}

double mean_path_gain_variance(double distance_m, const SystemConfig& cfg) {
  const double s = 0.1 * std::log(10.0) * cfg.shadow_sigma_db;
  return path_gain_variance(distance_m, cfg, 0.0) * std::exp(0.5 * s * s);
}

Scenario generate_scenario(const SystemConfig& cfg, RandomStream& rng) {
  Scenario s;
  s.a_t = steering_vector(cfg.target_aoa_deg, cfg.n_rx);
  s.b_t = steering_vector(cfg.target_aod_deg, cfg.n_tx);
  s.alpha = cfg.alpha();

  boost::random::uniform_real_distribution<double> aod(cfg.clutter_aod_range_deg.lo_deg,
                                             cfg.clutter_aod_range_deg.hi_deg);
  boost::random::uniform_real_distribution<double> aoa(cfg.clutter_aoa_range_deg.lo_deg,
                                             cfg.clutter_aoa_range_deg.hi_deg);
  boost::random::normal_distribution<double> shadow(0.0, cfg.shadow_sigma_db);
  ComplexNormal cn(rng);

  s.clutter_paths.reserve(static_cast<std::size_t>(cfg.n_paths));
  s.h_e = CMatrix::Zero(cfg.n_rx, cfg.n_tx);
  for (int n = 0; n < cfg.n_paths; ++n) {
    ClutterPath p;
    p.aod_deg = aod(rng);
    p.aoa_deg = aoa(rng);
    const double eps = cfg.shadow_sigma_db > 0.0 ? shadow(rng) : 0.0;
    p.gain = cn(path_gain_variance(cfg.tx_rx_distance_m, cfg, eps));
    s.h_e += p.gain * steering_vector(p.aoa_deg, cfg.n_rx) *
             steering_vector(p.aod_deg, cfg.n_tx).adjoint();
    s.clutter_paths.push_back(p);
  }
  return s;
}

ScenarioSummary snr_like_summary(const Scenario& s, const SystemConfig& cfg) {
  const double sigma2 = cfg.noise_power_w();
  ScenarioSummary out;
  out.clutter_fro_norm = s.h_e.norm();
  out.target_snr = std::norm(s.alpha) * s.a_t.squaredNorm() * s.b_t.squaredNorm() / sigma2;
  out.clutter_to_noise = s.h_e.squaredNorm() / sigma2;
  return out;
}

}  // namespace isac
