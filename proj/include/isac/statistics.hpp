#pragma once

// Null-hypothesis model (mean U and covariance Sigma of the received frame)
// and the per-frame sufficient statistics beta, mu and gamma.

#include "isac/config.hpp"
#include "isac/numerics.hpp"
#include "isac/scenario.hpp"
#include "isac/waveform.hpp"

namespace isac {

/// The scalars every closed-form expression depends on.
struct ModelScalars {
  int frame_length = 0;
  double beta_bar = 0.0;
  double lambda_p_bar_sq = 0.0;
  double lambda_d_bar_sq = 0.0;

  double power_ratio() const { return lambda_d_bar_sq / lambda_p_bar_sq; }
};

struct NullModel {
  CMatrix u;                   // M x L, H_e f_p s_p^T J_p
  HermitianMatrix sigma;       // L_d H_e F_d F_d^H H_e^H + L sigma^2 I
  HermitianMatrix sigma_bar;   // sigma / L
  CVector a_t;
  CVector whitened_target;     // Sigma^-1 a_t
  double beta = 0.0;           // a_t^H Sigma^-1 a_t
  double beta_bar = 0.0;       // L beta
  cplx lambda_p;               // b_t^H f_p
  double lambda_p_bar_sq = 0.0;  // L_p |lambda_p|^2
  double lambda_d_bar_sq = 0.0;  // L_d b_t^H F_d F_d^H b_t
  int frame_length = 0;
  int pilot_length = 0;

  /// |lambda_d_bar|^2 / |lambda_p_bar|^2.
  double power_ratio() const { return lambda_d_bar_sq / lambda_p_bar_sq; }
  ModelScalars scalars() const { return {frame_length, beta_bar, lambda_p_bar_sq, lambda_d_bar_sq}; }
};

/// Builds the model for an arbitrary covariance; the three variants below
/// differ only in which covariance they pass.
NullModel make_null_model(CMatrix u, const CMatrix& sigma, const Scenario& s, const TransmitPlan& plan);

NullModel build_null_model(const Scenario& s, const TransmitPlan& plan, const SystemConfig& cfg);

/// Sigma_p = L sigma^2 I, the covariance a pilot-only radar would assume.
NullModel build_pilot_null_model(const Scenario& s, const TransmitPlan& plan, const SystemConfig& cfg);

/// Sigma_d = L H_e F_d F_d^H H_e^H + L sigma^2 I, the covariance a
/// payload-only system (every slot carrying data) would assume.
NullModel build_data_null_model(const Scenario& s, const TransmitPlan& plan, const SystemConfig& cfg);

struct SufficientStats {
  CVector mu;                 // (Y - U)^H Sigma^-1 a_t, length L
  double mu_norm_sq = 0.0;
  cplx gamma;                 // lambda_p^* mu^H J_p^T s_p^*
  double gamma_abs_sq = 0.0;
};

SufficientStats sufficient_stats(const CMatrix& y, const NullModel& m, const TransmitPlan& plan);

/// gamma from mu: lambda_p^* conj(sum_i mu[pilot_i] s_p[i]).
cplx gamma_from_mu(const CVector& mu, const NullModel& m, const TransmitPlan& plan);

/// (Sigma + |alpha|^2 |lambda_d_bar|^2 a_t a_t^H)^-1 a_t via Sherman-Morrison.
CVector sherman_morrison_gain(const NullModel& m, cplx alpha);

struct MomentsH0 {
  double mu_mean = 0.0;     // E |mu|^2 / beta
  double mu_var = 0.0;
  double gamma_mean = 0.0;  // E |gamma|^2
  double gamma_var = 0.0;
};

struct MomentsH1 {
  double kappa = 1.0;
  double mu_mean = 0.0;
  double mu_var = 0.0;
  double gamma_mean = 0.0;
  double gamma_var = 0.0;
};

MomentsH0 moments_h0(const ModelScalars& m);
MomentsH1 moments_h1(const ModelScalars& m, cplx alpha);
inline MomentsH0 moments_h0(const NullModel& m) { return moments_h0(m.scalars()); }
inline MomentsH1 moments_h1(const NullModel& m, cplx alpha) { return moments_h1(m.scalars(), alpha); }

}  // namespace isac
