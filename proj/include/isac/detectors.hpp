#pragma once

// Hybrid-signal GLRT with the closed-form ML amplitude, the pilot-only and
// payload-only reference detectors, and the asymptotic (affine in |gamma|^2)
// surrogates of the GLRT statistic.

#include "isac/numerics.hpp"
#include "isac/statistics.hpp"

namespace isac {

struct DegenerateGamma : NumericError {
  using NumericError::NumericError;
};

struct PilotFree : NumericError {
  using NumericError::NumericError;
};

struct GlrtOutput {
  double statistic = 0.0;
  double q_dagger = 0.0;
  cplx alpha_hat;  // q_dagger * gamma
  double cubic_residual = 0.0;
  bool degenerate = false;  // gamma == 0, alpha_hat forced to 0
};

struct Decision {
  double statistic = 0.0;
  double log_threshold = 0.0;
  bool detected = false;
};

/// Log-likelihood ratio of H1 with amplitude alpha against H0:
///   (t |mu|^2 + 2 Re(alpha gamma^*) - |alpha|^2 lp beta) / (1 + t beta) - log(1 + t beta),
/// t = |alpha|^2 |lambda_d_bar|^2, lp = |lambda_p_bar|^2.
double log_likelihood_ratio(cplx alpha, const SufficientStats& st, const NullModel& m);

/// Wirtinger derivative d/d(alpha^*) of log_likelihood_ratio. Its real and
/// imaginary parts are half the partial derivatives along Re and Im alpha.
cplx log_likelihood_gradient(cplx alpha, const SufficientStats& st, const NullModel& m);

/// Sum of the magnitudes of the terms that cancel in the gradient; the
/// natural unit for judging stationarity.
double gradient_scale(cplx alpha, const SufficientStats& st, const NullModel& m);

/// Stationarity cubic a Q^3 + b Q^2 + c Q - 1 = 0 with a = ld^2 |gamma|^2 beta^2,
/// b = ld |gamma|^2 beta, c = (lp + ld) beta - |mu|^2 ld. With ld = 0 the
/// returned a = b = 0 and the delta terms are left at 0 (linear case).
/// Throws DegenerateGamma when |gamma|^2 < 1e-300.
CubicCoefficients cubic_for_alpha(const SufficientStats& st, const NullModel& m);

/// Likelihood-maximizing real root of the cubic (1/c in the linear case).
double q_dagger(const CubicCoefficients& k, const SufficientStats& st, const NullModel& m);

/// L / (|lambda_p_bar|^2 beta_bar).
double q_dagger_asymptotic(const NullModel& m);

GlrtOutput glrt_statistic(const SufficientStats& st, const NullModel& m);

/// The statistic written directly in Q and |gamma|^2 (the substituted form),
/// used to cross-check glrt_statistic.
double glrt_statistic_substituted(double q, const SufficientStats& st, const NullModel& m);

/// |sum_i mu[pilot_i] s_p[i]|^2 / (L beta), i.e.
/// |a_t^H Sigma^-1 (Y - U) J_p^T s_p^*|^2 / (L a_t^H Sigma^-1 a_t),
/// with the statistics computed against the pilot-only model.
double pilot_only_statistic(const SufficientStats& pilot_stats, const NullModel& pilot_model,
                            const TransmitPlan& plan);
double pilot_only_statistic(const CMatrix& y, const NullModel& pilot_model, const TransmitPlan& plan);

/// r - 1 - log r with r = |(Y - U)^H Sigma_d^-1 a_t|^2 / (a_t^H Sigma_d^-1 a_t).
double data_only_statistic(const SufficientStats& data_stats, const NullModel& data_model);
double data_only_statistic(const CMatrix& y, const NullModel& data_model, const TransmitPlan& plan);

/// Slope of the asymptotic statistic, L / (|lambda_p_bar|^2 beta_bar).
double asymptotic_slope(const NullModel& m);
/// Offset under H0: x - log(1 + x), x = |lambda_d_bar|^2 / (L |lambda_p_bar|^2).
double asymptotic_offset_h0(const NullModel& m);
/// Offset under H1: the same with x scaled by (1 + |alpha|^2 |lambda_p_bar|^2 beta_bar).
double asymptotic_offset_h1(const NullModel& m, cplx alpha);

/// slope |gamma|^2 + offset for the given hypothesis (alpha ignored under H0).
double asymptotic_statistic(const SufficientStats& st, const NullModel& m, Hypothesis h,
                            cplx alpha = 0.0);

/// detected iff statistic > log_threshold.
Decision decide(double statistic, double log_threshold);

}  // namespace isac
