#pragma once

// Reference computations used only by the tests. Each one reaches its answer
// by a different route than the library code it checks: bisection instead
// of Cardano, a Poisson mixture of Gamma tails instead of the Bessel series,
// full inverses instead of Sherman-Morrison, brute-force grids instead of
// the closed-form maximizer.

#include <complex>
#include <functional>
#include <vector>

#include "isac/numerics.hpp"
#include "isac/statistics.hpp"

namespace isac::oracle {

/// Largest real root of a x^3 + b x^2 + c x + d, a != 0, by bisection
/// inside the Cauchy bound, after locating the last sign change on a grid
/// refined around the critical points.
double largest_root_bisection(double a, double b, double c, double d);

/// All real roots from the companion matrix eigenvalues (imaginary part
/// below 1e-7 relative to the magnitude), ascending.
std::vector<double> companion_real_roots(double a, double b, double c, double d);

/// Q1(a, b) = sum_k Pois(k; a^2 / 2) P(Gamma(k + 1, 1) > b^2 / 2).
double marcum_q1_poisson(double a, double b);

/// Q1 by adaptive Simpson integration of the Rician density.
double marcum_q1_simpson(double a, double b);

/// The log-likelihood ratio written out from the Gaussian densities:
/// log det and quadratic forms with explicit inverses of Sigma and
/// Sigma + |alpha|^2 |lambda_d_bar|^2 a_t a_t^H.
double log_likelihood_direct(std::complex<double> alpha, const CMatrix& y, const NullModel& m,
                             const TransmitPlan& plan);

/// (Sigma + t a a^H)^-1 a by a full matrix inverse.
CVector shifted_solve_direct(const NullModel& m, double t);

struct GridMaximum {
  std::complex<double> arg;
  double value = 0.0;
};

/// Grid search of f over the disk |z| <= radius: an n x n lattice, then a
/// second n x n lattice spanning the best cell's neighbours.
GridMaximum grid_maximum(const std::function<double(std::complex<double>)>& f, double radius, int n = 101);

/// Central differences of f along Re and Im at z with step h.
std::complex<double> finite_difference_gradient(const std::function<double(std::complex<double>)>& f,
                                                std::complex<double> z, double h);

}  // namespace isac::oracle
