#pragma once

// Small numerical kernels: Hermitian solves and square roots, the real-root
// cubic solver behind the ML amplitude estimate, the first-order Marcum Q
// function, and ULA steering vectors.

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace isac {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotPositiveDefinite : NumericError {
  using NumericError::NumericError;
};
struct NegativeEigenvalue : NumericError {
  using NumericError::NumericError;
};
struct DegenerateCubic : NumericError {
  using NumericError::NumericError;
};

/// Square complex matrix known to equal its conjugate transpose.
///
/// Construction checks the Hermitian property to a relative tolerance and
/// then stores the exactly symmetrized matrix, so downstream factorizations
/// never see rounding asymmetry.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const CMatrix& m, double rel_tol = 1e-10);

  static HermitianMatrix identity(Eigen::Index n);
  static HermitianMatrix scaled_identity(Eigen::Index n, double value);

  Eigen::Index dimension() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  struct Trusted {};
  HermitianMatrix(CMatrix m, Trusted) : m_(std::move(m)) {}
  CMatrix m_;
};

/// Solves A x = v for positive definite A (Cholesky).
CVector solve_hermitian(const HermitianMatrix& a, const CVector& v);

/// Hermitian PSD square root S = V diag(sqrt(max(l, 0))) V^H, so S S^H = A.
/// Throws NegativeEigenvalue when the smallest eigenvalue is below -1e-9.
CMatrix hermitian_sqrt(const HermitianMatrix& a);

/// Lower-triangular C with C C^H = A. Also a valid square root for
/// sampling, and much cheaper than the eigendecomposition.
CMatrix cholesky_factor(const HermitianMatrix& a);

/// Coefficients of a Q^3 + b Q^2 + c Q + d = 0 together with the Cardano
/// auxiliaries delta1 = bc/6a^2 - b^3/27a^3 - d/2a and delta2 = c/3a - b^2/9a^2.
struct CubicCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;

  /// Throws DegenerateCubic when a == 0.
  static CubicCoefficients from(double a, double b, double c, double d);

  double evaluate(double q) const { return ((a * q + b) * q + c) * q + d; }
  double derivative(double q) const { return (3.0 * a * q + 2.0 * b) * q + c; }
  /// delta1^2 + delta2^3; negative means three distinct real roots.
  double discriminant() const { return delta1 * delta1 + delta2 * delta2 * delta2; }
};

/// All real roots in ascending order, each polished by Newton steps.
std::vector<double> cubic_real_roots(const CubicCoefficients& coeffs);

/// The Cardano root. With a single real root this is that root; with three
/// real roots it is the principal-branch value of the same formula (the
/// k = 0 trigonometric root, i.e. the largest one).
double cardano_real_root(const CubicCoefficients& coeffs);

/// First-order Marcum Q function Q1(a, b), absolute error below 1e-10.
double marcum_q1(double a, double b);

/// exp(-x) I_k(x) for k = 0..k_max (Miller backward recurrence).
std::vector<double> scaled_bessel_i_sequence(double x, int k_max);

/// Half-wavelength ULA response: element k is exp(j pi k sin(angle)).
CVector steering_vector(double angle_deg, int n);

}  // namespace isac
