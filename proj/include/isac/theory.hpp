#pragma once

// Closed-form false-alarm and detection probabilities of the GLRT, the
// pilot-only bounds, threshold calibration and the communication-rate
// convention used on the trade-off curves.

#include <stdexcept>
#include <string>

#include "isac/config.hpp"
#include "isac/scenario.hpp"
#include "isac/statistics.hpp"
#include "isac/waveform.hpp"

namespace isac {

struct InvalidTarget : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Clamps to [0, 1]; sets *clamped when the input was outside (or NaN).
double clamp_probability(double p, bool* clamped = nullptr);

/// exp(-L log_eta + ratio - L log(1 + ratio / L)), ratio = |lambda_d_bar|^2 / |lambda_p_bar|^2.
double fap_closed_form(double log_eta, int frame_length, double ratio, bool* clamped = nullptr);

/// exp(-L log_eta), the pilot-only false-alarm probability.
double fap_lower_bound(double log_eta, int frame_length, bool* clamped = nullptr);

/// log eta = ratio / L - log(1 + ratio / L) - log(p) / L. Throws
/// InvalidTarget unless 0 < p < 1.
double threshold_for_fap(double p_fa, int frame_length, double ratio);

struct DpTerms {
  double a_d = 0.0;
  double b_d = 0.0;
  bool b_d_clamped = false;  // b_d was negative and set to 0
  double p_d = 0.0;
};

/// a_d = |alpha|^2 lp bb / (1 + |alpha|^2 ld bb / L),
/// b_d = -log p_fa - [|alpha|^2 ld bb - L log(1 + |alpha|^2 ld bb / L)], clamped at 0,
/// p_d = Q1(sqrt(2 a_d), sqrt(2 b_d)).
DpTerms dp_terms(double p_fa, double alpha_abs_sq, const ModelScalars& m);
double dp_closed_form(double p_fa, double alpha_abs_sq, const ModelScalars& m);

/// Q1(sqrt(2 |alpha|^2 lp bb), sqrt(-2 log p_fa)).
double dp_upper_bound(double p_fa, double alpha_abs_sq, const ModelScalars& m);

/// P(slope |gamma|^2 + offset_h1 > log_eta) under the exact H1 law of gamma
/// (non-central, variance inflated by kappa): Q1(sqrt(2 a_d), sqrt(2 L (log_eta - zeta1) / kappa)).
/// Diagnostic companion of dp_closed_form, which additionally sets kappa = 1
/// and linearizes the offsets.
double dp_asymptotic_at_threshold(double log_eta, double alpha_abs_sq, const ModelScalars& m);

/// Nominal threshold of the payload-only statistic r - 1 - log r, taking
/// r ~ Gamma(L, 1/L) (its law when the assumed covariance is the true one).
double data_only_threshold(double p_fa, int frame_length);

/// Nominal threshold of the pilot-only statistic, -log(p_fa) / L.
double pilot_only_threshold(double p_fa, int frame_length);

struct RateConvention {
  static constexpr const char* description =
      "sum_k log2(1 + SINR_k); user k channel sqrt(g) b(user_aod_k)^H, g = 10^(-0.1 PL(user_distance_m)) "
      "without shadowing; precoder columns of sqrt(L_d) F_d (per-symbol power P_d); "
      "interference from the other columns; noise sigma^2";
};

/// Sum rate in bit/s/Hz under RateConvention.
double communication_rate(const TransmitPlan& plan, const Scenario& s, const SystemConfig& cfg);

struct TheoryPoint {
  double log_eta = 0.0;
  double p_fa = 0.0;
  double p_fa_lower_bound = 0.0;
  double p_d = 0.0;
  double p_d_upper_bound = 0.0;
  double a_d = 0.0;
  double b_d = 0.0;
  bool clamped = false;  // any probability clamp or the b_d clamp fired
};

TheoryPoint theory_point(double log_eta, double alpha_abs_sq, const ModelScalars& m);

inline double dp_closed_form(double p_fa, double alpha_abs_sq, const NullModel& m) {
  return dp_closed_form(p_fa, alpha_abs_sq, m.scalars());
}
inline double dp_upper_bound(double p_fa, double alpha_abs_sq, const NullModel& m) {
  return dp_upper_bound(p_fa, alpha_abs_sq, m.scalars());
}

std::string theory_csv_header();
std::string theory_csv_row(const TheoryPoint& p);

}  // namespace isac
