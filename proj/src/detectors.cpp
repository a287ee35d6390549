#include "isac/detectors.hpp"

#include <cmath>
#include <limits>

namespace isac {

double log_likelihood_ratio(cplx alpha, const SufficientStats& st, const NullModel& m) {
  const double a2 = std::norm(alpha);
  const double t = a2 * m.lambda_d_bar_sq;
  const double den = 1.0 + t * m.beta;
  const double num = t * st.mu_norm_sq + 2.0 * std::real(alpha * std::conj(st.gamma)) -
                     a2 * m.lambda_p_bar_sq * m.beta;
  return num / den - std::log1p(t * m.beta);
}

cplx log_likelihood_gradient(cplx alpha, const SufficientStats& st, const NullModel& m) {
  const double a2 = std::norm(alpha);
  const double ld = m.lambda_d_bar_sq;
  const double beta = m.beta;
  const double den = 1.0 + a2 * ld * beta;
  const double num = a2 * ld * st.mu_norm_sq + 2.0 * std::real(alpha * std::conj(st.gamma)) -
                     a2 * m.lambda_p_bar_sq * beta;
  const cplx dnum = alpha * (ld * st.mu_norm_sq - m.lambda_p_bar_sq * beta) + st.gamma;
  const cplx dden = alpha * (ld * beta);
  return dnum / den - num * dden / (den * den) - dden / den;
}

double gradient_scale(cplx alpha, const SufficientStats& st, const NullModel& m) {
  const double a = std::abs(alpha);
  const double a2 = a * a;
  const double ld = m.lambda_d_bar_sq;
  const double beta = m.beta;
  const double den = 1.0 + a2 * ld * beta;
  const double num = a2 * ld * st.mu_norm_sq + 2.0 * a * std::abs(st.gamma) +
                     a2 * m.lambda_p_bar_sq * beta;
  const double dnum = a * (ld * st.mu_norm_sq + m.lambda_p_bar_sq * beta) + std::abs(st.gamma);
  const double dden = a * ld * beta;
  return dnum / den + num * dden / (den * den) + dden / den;
}

CubicCoefficients cubic_for_alpha(const SufficientStats& st, const NullModel& m) {
  if (!(st.gamma_abs_sq >= 1e-300)) throw DegenerateGamma("cubic_for_alpha: gamma is zero");
  const double ld = m.lambda_d_bar_sq;
  const double beta = m.beta;
  const double a = ld * ld * st.gamma_abs_sq * beta * beta;
  const double b = ld * st.gamma_abs_sq * beta;
  const double c = (m.lambda_p_bar_sq + ld) * beta - st.mu_norm_sq * ld;
  if (a > 0.0) return CubicCoefficients::from(a, b, c, -1.0);
  CubicCoefficients k;
  k.c = c;
  k.d = -1.0;
  return k;
}

double q_dagger(const CubicCoefficients& k, const SufficientStats& st, const NullModel& m) {
  if (k.a == 0.0) {
    if (k.b != 0.0 || k.c == 0.0) throw DegenerateCubic("q_dagger: degenerate linear case");
    return -k.d / k.c;
  }
  const std::vector<double> roots = cubic_real_roots(k);
  double best = roots.back();
  double best_ll = log_likelihood_ratio(best * st.gamma, st, m);
  for (std::size_t i = roots.size() - 1; i-- > 0;) {
    const double ll = log_likelihood_ratio(roots[i] * st.gamma, st, m);
    if (ll > best_ll) {
      best = roots[i];
      best_ll = ll;
    }
  }
  return best;
}

double q_dagger_asymptotic(const NullModel& m) {
  if (!(m.lambda_p_bar_sq > 0.0)) throw PilotFree("q_dagger_asymptotic: no pilot power toward the target");
  return m.frame_length / (m.lambda_p_bar_sq * m.beta_bar);
}

GlrtOutput glrt_statistic(const SufficientStats& st, const NullModel& m) {
  GlrtOutput out;
  if (!(st.gamma_abs_sq >= 1e-300)) {
    out.degenerate = true;
    out.statistic = log_likelihood_ratio(0.0, st, m);
    return out;
  }
  const CubicCoefficients k = cubic_for_alpha(st, m);
  out.q_dagger = q_dagger(k, st, m);
  out.alpha_hat = out.q_dagger * st.gamma;
  out.cubic_residual = std::abs(k.a == 0.0 ? k.c * out.q_dagger + k.d : k.evaluate(out.q_dagger));
  out.statistic = log_likelihood_ratio(out.alpha_hat, st, m);
  return out;
}

double glrt_statistic_substituted(double q, const SufficientStats& st, const NullModel& m) {
  const double g2 = st.gamma_abs_sq;
  const double ld = m.lambda_d_bar_sq;
  const double den = 1.0 + q * q * ld * g2 * m.beta;
  return (q * q * ld * g2 * st.mu_norm_sq + 2.0 * q * g2 - q * q * m.lambda_p_bar_sq * g2 * m.beta) /
             den -
         std::log(den);
}

double pilot_only_statistic(const SufficientStats& pilot_stats, const NullModel& pilot_model,
                            const TransmitPlan& plan) {
  cplx acc = 0.0;
  for (int i = 0; i < plan.frame.pilot_count(); ++i) {
    acc += pilot_stats.mu(plan.frame.pilot_positions[i]) * plan.s_p(i);
  }
  return std::norm(acc) / (pilot_model.frame_length * pilot_model.beta);
}

double pilot_only_statistic(const CMatrix& y, const NullModel& pilot_model, const TransmitPlan& plan) {
  return pilot_only_statistic(sufficient_stats(y, pilot_model, plan), pilot_model, plan);
}

double data_only_statistic(const SufficientStats& data_stats, const NullModel& data_model) {
  const double r = data_stats.mu_norm_sq / data_model.beta;
  if (r <= 0.0) return std::numeric_limits<double>::infinity();
  return r - 1.0 - std::log(r);
}

double data_only_statistic(const CMatrix& y, const NullModel& data_model, const TransmitPlan& plan) {
  return data_only_statistic(sufficient_stats(y, data_model, plan), data_model);
}

double asymptotic_slope(const NullModel& m) { return q_dagger_asymptotic(m); }

double asymptotic_offset_h0(const NullModel& m) {
  const double x = m.lambda_d_bar_sq / (m.frame_length * m.lambda_p_bar_sq);
  return x - std::log1p(x);
}

double asymptotic_offset_h1(const NullModel& m, cplx alpha) {
  const double x = (1.0 + std::norm(alpha) * m.lambda_p_bar_sq * m.beta_bar) * m.lambda_d_bar_sq /
                   (m.frame_length * m.lambda_p_bar_sq);
  return x - std::log1p(x);
}

double asymptotic_statistic(const SufficientStats& st, const NullModel& m, Hypothesis h, cplx alpha) {
  const double offset = h == Hypothesis::h0 ? asymptotic_offset_h0(m) : asymptotic_offset_h1(m, alpha);
  return asymptotic_slope(m) * st.gamma_abs_sq + offset;
}

Decision decide(double statistic, double log_threshold) {
  return {statistic, log_threshold, statistic > log_threshold};
}

}  // namespace isac
