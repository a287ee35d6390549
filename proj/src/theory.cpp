#include "isac/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/math/distributions/gamma.hpp>

namespace isac {

double clamp_probability(double p, bool* clamped) {
  const bool out = !(p >= 0.0 && p <= 1.0);
  if (clamped != nullptr && out) *clamped = true;
  if (std::isnan(p)) return 0.0;
  return std::clamp(p, 0.0, 1.0);
}

double fap_closed_form(double log_eta, int frame_length, double ratio, bool* clamped) {
  const double l = frame_length;
  return clamp_probability(std::exp(-l * log_eta + ratio - l * std::log1p(ratio / l)), clamped);
}

double fap_lower_bound(double log_eta, int frame_length, bool* clamped) {
  return clamp_probability(std::exp(-double(frame_length) * log_eta), clamped);
}

double threshold_for_fap(double p_fa, int frame_length, double ratio) {
  if (!(p_fa > 0.0 && p_fa < 1.0)) {
    throw InvalidTarget("threshold_for_fap: target must lie in (0, 1), got " + std::to_string(p_fa));
  }
  const double l = frame_length;
  return ratio / l - std::log1p(ratio / l) - std::log(p_fa) / l;
}

DpTerms dp_terms(double p_fa, double alpha_abs_sq, const ModelScalars& m) {
  if (!(p_fa > 0.0 && p_fa <= 1.0)) throw InvalidTarget("dp_terms: p_fa must lie in (0, 1]");
  const double l = m.frame_length;
  const double xd = alpha_abs_sq * m.lambda_d_bar_sq * m.beta_bar;
  DpTerms t;
  t.a_d = alpha_abs_sq * m.lambda_p_bar_sq * m.beta_bar / (1.0 + xd / l);
  t.b_d = -std::log(p_fa) - (xd - l * std::log1p(xd / l));
  if (t.b_d < 0.0) {
    t.b_d = 0.0;
    t.b_d_clamped = true;
  }
  t.p_d = marcum_q1(std::sqrt(2.0 * t.a_d), std::sqrt(2.0 * t.b_d));
  return t;
}

double dp_closed_form(double p_fa, double alpha_abs_sq, const ModelScalars& m) {
  return dp_terms(p_fa, alpha_abs_sq, m).p_d;
}

double dp_upper_bound(double p_fa, double alpha_abs_sq, const ModelScalars& m) {
  if (!(p_fa > 0.0 && p_fa <= 1.0)) throw InvalidTarget("dp_upper_bound: p_fa must lie in (0, 1]");
  return marcum_q1(std::sqrt(2.0 * alpha_abs_sq * m.lambda_p_bar_sq * m.beta_bar),
                   std::sqrt(-2.0 * std::log(p_fa)));
}

double dp_asymptotic_at_threshold(double log_eta, double alpha_abs_sq, const ModelScalars& m) {
  const double l = m.frame_length;
  const double xd = alpha_abs_sq * m.lambda_d_bar_sq * m.beta_bar;
  const double kappa = 1.0 + xd / l;
  const double a_d = alpha_abs_sq * m.lambda_p_bar_sq * m.beta_bar / kappa;
  const double x = (1.0 + alpha_abs_sq * m.lambda_p_bar_sq * m.beta_bar) * m.lambda_d_bar_sq /
                   (l * m.lambda_p_bar_sq);
  const double zeta1 = x - std::log1p(x);
  const double b = std::max(0.0, l * (log_eta - zeta1) / kappa);
  return marcum_q1(std::sqrt(2.0 * a_d), std::sqrt(2.0 * b));
}

namespace {

// Root of r - 1 - log r = t on (lo, hi), where the function is monotone.
double gap_root(double t, double lo, double hi) {
  const bool decreasing = hi <= 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = mid - 1.0 - std::log(mid) - t;
    if ((f > 0.0) == decreasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double data_only_threshold(double p_fa, int frame_length) {
  if (!(p_fa > 0.0 && p_fa < 1.0)) throw InvalidTarget("data_only_threshold: target must lie in (0, 1)");
  const boost::math::gamma_distribution<double> r_law(frame_length, 1.0 / frame_length);
  auto tail = [&](double t) {
    const double r1 = gap_root(t, 0.0, 1.0);
    double hi = 2.0;
    while (hi - 1.0 - std::log(hi) < t) hi *= 2.0;
    const double r2 = gap_root(t, 1.0, hi);
    return boost::math::cdf(r_law, r1) + boost::math::cdf(boost::math::complement(r_law, r2));
  };
  double lo = 0.0;
  double hi = 1.0;
  while (tail(hi) > p_fa) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > p_fa ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double pilot_only_threshold(double p_fa, int frame_length) {
  if (!(p_fa > 0.0 && p_fa < 1.0)) throw InvalidTarget("pilot_only_threshold: target must lie in (0, 1)");
  return -std::log(p_fa) / frame_length;
}

double communication_rate(const TransmitPlan& plan, const Scenario& s, const SystemConfig& cfg) {
  (void)s;
  const int k_users = cfg.n_users;
  if (k_users < 1) return 0.0;
  const double g = path_gain_variance(cfg.user_distance_m, cfg, 0.0);
  const double sigma2 = cfg.noise_power_w();
  const CMatrix fbar = plan.fbar_d();
  double rate = 0.0;
  for (int k = 0; k < k_users; ++k) {
    const CVector h = steering_vector(cfg.user_aods_deg[k], cfg.n_tx);
    const Eigen::VectorXd power = (h.adjoint() * fbar).cwiseAbs2().transpose() * g;
    const double signal = power(k);
    const double interference = power.sum() - signal;
    rate += std::log2(1.0 + signal / (interference + sigma2));
  }
  return rate;
}

TheoryPoint theory_point(double log_eta, double alpha_abs_sq, const ModelScalars& m) {
  TheoryPoint p;
  p.log_eta = log_eta;
  bool clamped = false;
  p.p_fa = fap_closed_form(log_eta, m.frame_length, m.power_ratio(), &clamped);
  p.p_fa_lower_bound = fap_lower_bound(log_eta, m.frame_length, &clamped);
  if (p.p_fa > 0.0) {
    const DpTerms t = dp_terms(p.p_fa, alpha_abs_sq, m);
    p.p_d = t.p_d;
    p.a_d = t.a_d;
    p.b_d = t.b_d;
    clamped = clamped || t.b_d_clamped;
    p.p_d_upper_bound = dp_upper_bound(p.p_fa, alpha_abs_sq, m);
  }
  p.clamped = clamped;
  return p;
}

std::string theory_csv_header() { return "log_eta,p_fa,p_fa_lower_bound,p_d,p_d_upper_bound,a_d,b_d,clamped"; }

std::string theory_csv_row(const TheoryPoint& p) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%d", p.log_eta, p.p_fa,
                p.p_fa_lower_bound, p.p_d, p.p_d_upper_bound, p.a_d, p.b_d, p.clamped ? 1 : 0);
  return buf;
}

}  // namespace isac
