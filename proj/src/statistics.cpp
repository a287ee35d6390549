#include "isac/statistics.hpp"

#include <cmath>

namespace isac {

namespace {

CMatrix pilot_mean(const Scenario& s, const TransmitPlan& plan) {
  return plan.frame.assemble(s.h_e * plan.pilot_block(),
                             CMatrix::Zero(s.h_e.rows(), plan.frame.data_count()));
}

}  // namespace

NullModel make_null_model(CMatrix u, const CMatrix& sigma, const Scenario& s,
                          const TransmitPlan& plan) {
  const int l = plan.frame.length;
  HermitianMatrix sig(sigma);
  HermitianMatrix sig_bar(sigma / double(l));
  CVector w = solve_hermitian(sig, s.a_t);
  const double beta = s.a_t.dot(w).real();  // dot conjugates the first argument

  const cplx lambda_p = s.b_t.dot(plan.f_p);
  const CVector ftb = plan.f_d.adjoint() * s.b_t;
  NullModel m{std::move(u),
              std::move(sig),
              std::move(sig_bar),
              s.a_t,
              std::move(w),
              beta,
              double(l) * beta,
              lambda_p,
              plan.frame.pilot_count() * std::norm(lambda_p),
              plan.frame.data_count() * ftb.squaredNorm(),
              l,
              plan.frame.pilot_count()};
  return m;
}

NullModel build_null_model(const Scenario& s, const TransmitPlan& plan, const SystemConfig& cfg) {
  const int l = plan.frame.length;
  const CMatrix hf = s.h_e * plan.f_d;
  CMatrix sigma = double(plan.frame.data_count()) * (hf * hf.adjoint());
  sigma.diagonal().array() += double(l) * cfg.noise_power_w();
  return make_null_model(pilot_mean(s, plan), sigma, s, plan);
}

NullModel build_pilot_null_model(const Scenario& s, const TransmitPlan& plan,
                                 const SystemConfig& cfg) {
  const int l = plan.frame.length;
  const CMatrix sigma = CMatrix::Identity(s.a_t.size(), s.a_t.size()) * (l * cfg.noise_power_w());
  return make_null_model(pilot_mean(s, plan), sigma, s, plan);
}

NullModel build_data_null_model(const Scenario& s, const TransmitPlan& plan,
                                const SystemConfig& cfg) {
  const int l = plan.frame.length;
  const CMatrix hf = s.h_e * plan.f_d;
  CMatrix sigma = double(l) * (hf * hf.adjoint());
  sigma.diagonal().array() += double(l) * cfg.noise_power_w();
  return make_null_model(pilot_mean(s, plan), sigma, s, plan);
}

cplx gamma_from_mu(const CVector& mu, const NullModel& m, const TransmitPlan& plan) {
  cplx acc = 0.0;
  for (int i = 0; i < plan.frame.pilot_count(); ++i) {
    acc += mu(plan.frame.pilot_positions[i]) * plan.s_p(i);
  }
  return std::conj(m.lambda_p) * std::conj(acc);
}

SufficientStats sufficient_stats(const CMatrix& y, const NullModel& m, const TransmitPlan& plan) {
  SufficientStats st;
  st.mu = (y - m.u).adjoint() * m.whitened_target;
  st.mu_norm_sq = st.mu.squaredNorm();
  st.gamma = gamma_from_mu(st.mu, m, plan);
  st.gamma_abs_sq = std::norm(st.gamma);
  return st;
}

CVector sherman_morrison_gain(const NullModel& m, cplx alpha) {
  const double t = std::norm(alpha) * m.lambda_d_bar_sq;
  return m.whitened_target / (1.0 + t * m.beta);
}

MomentsH0 moments_h0(const ModelScalars& m) {
  const double l = m.frame_length;
  const double g = m.lambda_p_bar_sq * m.beta_bar / (l * l);
  return {1.0, 1.0 / l, g, g * g};
}

MomentsH1 moments_h1(const ModelScalars& m, cplx alpha) {
  const double l = m.frame_length;
  const double a2 = std::norm(alpha);
  const double lp = m.lambda_p_bar_sq;
  const double ld = m.lambda_d_bar_sq;
  const double bb = m.beta_bar;
  MomentsH1 r;
  r.kappa = 1.0 + a2 * ld * bb / l;
  r.mu_mean = 1.0 + a2 * (lp + ld) * bb / l;
  r.mu_var = (r.kappa * r.kappa + 2.0 * r.kappa * a2 * lp * bb / l) / l;
  const double g = lp * bb / (l * l);
  r.gamma_mean = r.kappa * g + a2 * lp * bb * g;
  r.gamma_var = r.kappa * r.kappa * g * g + 2.0 * r.kappa * a2 * lp * bb * g * g;
  return r;
}

}  // namespace isac
