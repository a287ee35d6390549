#pragma once

// One channel realization: the target-free clutter channel as a sum of
// rank-one paths, the target steering pair and the target amplitude.

#include <vector>

#include "isac/config.hpp"
#include "isac/numerics.hpp"
#include "isac/random.hpp"

namespace isac {

struct ClutterPath {
  cplx gain;  // epsilon_n
  double aoa_deg = 0.0;
  double aod_deg = 0.0;
};

struct Scenario {
  CMatrix h_e;  // M x N
  CVector a_t;  // receive steering toward the target, length M
  CVector b_t;  // transmit steering toward the target, length N
  cplx alpha;
  std::vector<ClutterPath> clutter_paths;

  /// sum_n eps_n a(aoa_n) b(aod_n)^H rebuilt from the stored paths.
  CMatrix reconstruct_clutter() const;
};

double dbm_to_watts(double p_dbm);

/// a + 10 b log10(d) + shadow, in dB.
double path_loss_db(double distance_m, const SystemConfig& cfg, double shadow_db);

/// 10^(-0.1 path_loss_db(d, cfg, shadow)), the variance of a path gain.
double path_gain_variance(double distance_m, const SystemConfig& cfg, double shadow_db);

/// E over shadowing of path_gain_variance: the log-normal mean factor
/// exp((0.1 ln10 sigma)^2 / 2) applied to the unshadowed value.
double mean_path_gain_variance(double distance_m, const SystemConfig& cfg);

/// Draws n_paths clutter paths (AoD, AoA uniform in the configured ranges,
/// fresh N(0, sigma^2) shadowing per path, CN gain) and assembles H_e.
/// Draw order per path: AoD, AoA, shadowing, gain.
Scenario generate_scenario(const SystemConfig& cfg, RandomStream& rng);

struct ScenarioSummary {
  double clutter_fro_norm = 0.0;
  double target_snr = 0.0;          // |alpha|^2 |a_t|^2 |b_t|^2 / sigma^2
  double clutter_to_noise = 0.0;    // |H_e|_F^2 / sigma^2
};

ScenarioSummary snr_like_summary(const Scenario& s, const SystemConfig& cfg);

}  // namespace isac
