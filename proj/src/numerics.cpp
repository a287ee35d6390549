#include "isac/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace isac {

HermitianMatrix::HermitianMatrix(const CMatrix& m, double rel_tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("HermitianMatrix: matrix must be square and non-empty");
  }
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= rel_tol * scale)) {
    throw std::invalid_argument("HermitianMatrix: matrix is not Hermitian (asymmetry " +
                                std::to_string(asym / scale) + ")");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index n) { return scaled_identity(n, 1.0); }

HermitianMatrix HermitianMatrix::scaled_identity(Eigen::Index n, double value) {
  CMatrix m = CMatrix::Identity(n, n) * value;
  return HermitianMatrix(std::move(m), Trusted{});
}

CVector solve_hermitian(const HermitianMatrix& a, const CVector& v) {
  if (v.size() != a.dimension()) {
    throw std::invalid_argument("solve_hermitian: dimension mismatch");
  }
  Eigen::LLT<CMatrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("solve_hermitian: Cholesky factorization failed");
  }
  return llt.solve(v);
}

CMatrix hermitian_sqrt(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(a.matrix());
  if (eig.info() != Eigen::Success) {
    throw NumericError("hermitian_sqrt: eigendecomposition failed");
  }
  const Eigen::VectorXd& values = eig.eigenvalues();
  if (values.minCoeff() < -1e-9) {
    throw NegativeEigenvalue("hermitian_sqrt: eigenvalue " + std::to_string(values.minCoeff()) +
                             " is negative");
  }
  const Eigen::VectorXd roots = values.cwiseMax(0.0).cwiseSqrt();
  const CMatrix& vecs = eig.eigenvectors();
  return vecs * roots.cast<cplx>().asDiagonal() * vecs.adjoint();
}

CMatrix cholesky_factor(const HermitianMatrix& a) {
  Eigen::LLT<CMatrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("cholesky_factor: matrix is not positive definite");
  }
  return llt.matrixL();
}

// ---------------------------------------------------------------------------
// Cubic

CubicCoefficients CubicCoefficients::from(double a, double b, double c, double d) {
  if (a == 0.0 || !std::isfinite(a)) {
    throw DegenerateCubic("cubic leading coefficient must be finite and nonzero");
  }
  CubicCoefficients k;
  k.a = a;
  k.b = b;
  k.c = c;
  k.d = d;
  const double ra = b / a;
  k.delta1 = ra * (c / a) / 6.0 - ra * ra * ra / 27.0 - d / (2.0 * a);
  k.delta2 = c / (3.0 * a) - ra * ra / 9.0;
  return k;
}

namespace {

double newton_polish(const CubicCoefficients& k, double q) {
  double best = q;
  double best_res = std::abs(k.evaluate(q));
  for (int it = 0; it < 4 && best_res > 0.0; ++it) {
    const double slope = k.derivative(best);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    const double next = best - k.evaluate(best) / slope;
    const double res = std::abs(k.evaluate(next));
    if (!(res < best_res)) break;
    best = next;
    best_res = res;
  }
  return best;
}

}  // namespace

std::vector<double> cubic_real_roots(const CubicCoefficients& k) {
  const double shift = -k.b / (3.0 * k.a);
  const double disc = k.discriminant();
  std::vector<double> cardano;
  if (disc >= 0.0) {
    // Pick the cube-root argument with the larger magnitude and recover the
    // partner from u v = -delta2, which avoids cancellation between the two
    // cube roots when delta2^3 dominates.
    const double s = std::sqrt(disc);
    const double u = std::cbrt(k.delta1 + (k.delta1 >= 0.0 ? s : -s));
    const double v = (u != 0.0) ? -k.delta2 / u : 0.0;
    cardano.push_back(shift + u + v);
  } else {
    const double r = std::sqrt(-k.delta2);
    const double cos_arg = std::clamp(k.delta1 / (r * r * r), -1.0, 1.0);
    const double theta = std::acos(cos_arg);
    for (int j = 0; j < 3; ++j) {
      cardano.push_back(shift + 2.0 * r * std::cos((theta - 2.0 * std::numbers::pi * j) / 3.0));
    }
  }
  // The closed form is only accurate to a relative precision of the largest
  // root. Keep that root, divide it out from the constant end (stable when
  // the removed root is the largest), and take the rest from the quadratic.
  const double r1 = newton_polish(
      k, *std::max_element(cardano.begin(), cardano.end(),
                           [](double x, double y) { return std::abs(x) < std::abs(y); }));
  std::vector<double> roots{r1};
  double qa = k.a, qb = k.b, qc = k.c;
  if (r1 != 0.0) {
    qc = -k.d / r1;
    qb = (qc - k.c) / r1;
  }
  const double qdisc = qb * qb - 4.0 * qa * qc;
  if (qdisc >= 0.0) {
    const double t = -0.5 * (qb + std::copysign(std::sqrt(qdisc), qb));
    if (t != 0.0) {
      roots.push_back(newton_polish(k, t / qa));
      roots.push_back(newton_polish(k, qc / t));
    } else {
      roots.push_back(0.0);
      roots.push_back(0.0);
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

double cardano_real_root(const CubicCoefficients& k) { return cubic_real_roots(k).back(); }

// ---------------------------------------------------------------------------
// Marcum Q

std::vector<double> scaled_bessel_i_sequence(double x, int k_max) {
  if (x < 0.0 || k_max < 0) throw std::invalid_argument("scaled_bessel_i_sequence: bad argument");
  std::vector<double> out(static_cast<std::size_t>(k_max) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const int start = k_max + 30 + static_cast<int>(std::sqrt(40.0 * (k_max + 1))) +
                    static_cast<int>(12.0 * std::sqrt(x));
  // Backward recurrence I_{k-1} = (2k/x) I_k + I_{k+1}, normalized with
  // I_0 + 2 sum_{k>=1} I_k = e^x.
  double next = 0.0;
  double cur = 1e-280;
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = (2.0 * k / x) * cur + next;
    next = cur;
    cur = prev;
    if (k - 1 <= k_max) out[static_cast<std::size_t>(k - 1)] = cur;
    norm += 2.0 * next;
    if (cur > 1e250) {
      constexpr double shrink = 1e-250;
      cur *= shrink;
      next *= shrink;
      norm *= shrink;
      for (double& v : out) v *= shrink;
    }
  }
  norm += cur;  // the k = 0 term enters once
  for (double& v : out) v /= norm;
  return out;
}

namespace {

// exp(-z) I_0(z) for z >= 0.
double scaled_bessel_i0(double z) {
  if (z < 500.0) return std::cyl_bessel_i(0.0, z) * std::exp(-z);
  // Large-argument expansion: terms ((2k-1)!!)^2 / (k! (8z)^k).
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 12; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= odd * odd / (k * 8.0 * z);
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

double marcum_q1_quadrature(double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [a](double x) {
    return x * std::exp(-0.5 * (x - a) * (x - a)) * scaled_bessel_i0(a * x);
  };
  constexpr double reach = 40.0;
  if (b >= a) {
    const double hi = std::max(b, a) + reach;
    if (b >= hi) return 0.0;
    return gauss_kronrod<double, 61>::integrate(integrand, b, hi, 20, 1e-14);
  }
  const double lo = std::max(0.0, a - reach);
  if (b <= lo) return 1.0;
  return 1.0 - gauss_kronrod<double, 61>::integrate(integrand, lo, b, 20, 1e-14);
}

}  // namespace

double marcum_q1(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) {
    throw std::domain_error("marcum_q1: arguments must be nonnegative");
  }
  if (b == 0.0) return 1.0;
  if (std::isinf(b)) return 0.0;
  if (a == 0.0) return std::exp(-0.5 * b * b);
  if (std::isinf(a)) return 1.0;

  const double x = a * b;
  if (x > 1e4) return std::clamp(marcum_q1_quadrature(a, b), 0.0, 1.0);

  const double prefactor = std::exp(-0.5 * (a - b) * (a - b));
  if (prefactor == 0.0) return b > a ? 0.0 : 1.0;

  const bool upper = b >= a;
  const double rho = upper ? a / b : b / a;
  const int k_max = 40 + static_cast<int>(10.0 * std::sqrt(x));
  const std::vector<double> bessel = scaled_bessel_i_sequence(x, k_max);

  double sum = 0.0;
  double power = upper ? 1.0 : rho;
  for (int k = upper ? 0 : 1; k <= k_max; ++k) {
    const double term = power * bessel[static_cast<std::size_t>(k)];
    sum += term;
    if (term < 1e-14 * sum && k > 2) break;
    power *= rho;
  }
  const double q = upper ? prefactor * sum : 1.0 - prefactor * sum;
  return std::clamp(q, 0.0, 1.0);
}

CVector steering_vector(double angle_deg, int n) {
  if (n < 1) throw std::invalid_argument("steering_vector: need at least one element");
  const double phase = std::numbers::pi * std::sin(angle_deg * std::numbers::pi / 180.0);
  CVector v(n);
  for (int k = 0; k < n; ++k) v(k) = std::polar(1.0, phase * k);
  return v;
}

}  // namespace isac
