#include <doctest.h>

#include <cmath>
#include <random>

#include "isac/numerics.hpp"
#include "oracles.hpp"

using namespace isac;

TEST_SUITE("numerics") {

TEST_CASE("solve_hermitian matches a dense inverse") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  CMatrix g(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) g(i, j) = {n(rng), n(rng)};
  const CMatrix a = g * g.adjoint() + CMatrix::Identity(6, 6);
  CVector v(6);
  for (int i = 0; i < 6; ++i) v(i) = {n(rng), n(rng)};
  const CVector x = solve_hermitian(HermitianMatrix(a), v);
  CHECK((x - a.inverse() * v).norm() < 1e-12 * x.norm());
}

TEST_CASE("HermitianMatrix rejects asymmetric input") {
  CMatrix a = CMatrix::Identity(3, 3);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(HermitianMatrix{a}, std::invalid_argument);
}

TEST_CASE("square roots reproduce the matrix") {
  CMatrix a(3, 3);
  a << 4.0, cplx(1, 1), 0.0, cplx(1, -1), 3.0, cplx(0, 0.5), 0.0, cplx(0, -0.5), 2.0;
  const HermitianMatrix h(a);
  const CMatrix s = hermitian_sqrt(h);
  CHECK((s * s.adjoint() - a).norm() < 1e-12);
  CHECK((s - s.adjoint()).norm() < 1e-12);
  const CMatrix c = cholesky_factor(h);
  CHECK((c * c.adjoint() - a).norm() < 1e-12);
}

TEST_CASE("hermitian_sqrt of diag(4, 9) and rejection of negative eigenvalues") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 4.0;
  a(1, 1) = 9.0;
  const CMatrix s = hermitian_sqrt(HermitianMatrix(a));
  CHECK(std::abs(s(0, 0) - 2.0) < 1e-14);
  CHECK(std::abs(s(1, 1) - 3.0) < 1e-14);
  a(1, 1) = -1.0;
  CHECK_THROWS_AS(hermitian_sqrt(HermitianMatrix(a)), NegativeEigenvalue);
  CHECK_THROWS_AS(cholesky_factor(HermitianMatrix(a)), NotPositiveDefinite);
}

TEST_CASE("cubic roots against bisection and companion eigenvalues") {
  SUBCASE("known roots") {
    // (x - 1)(x - 2)(x - 3)
    const auto r = cubic_real_roots(CubicCoefficients::from(1, -6, 11, -6));
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r[1] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(r[2] == doctest::Approx(3.0).epsilon(1e-13));
    // x^3 - 1: one real root
    CHECK(cardano_real_root(CubicCoefficients::from(1, 0, 0, -1)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("random coefficients") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n;
    for (int i = 0; i < 2000; ++i) {
      const double a = n(rng), b = n(rng), c = n(rng), d = n(rng);
      if (std::abs(a) < 1e-3) continue;
      const auto k = CubicCoefficients::from(a, b, c, d);
      const double q = cardano_real_root(k);
      const double ref = oracle::largest_root_bisection(a, b, c, d);
      CHECK(std::abs(q - ref) <= 1e-8 * std::max(1.0, std::abs(ref)));
      const auto roots = cubic_real_roots(k);
      const auto comp = oracle::companion_real_roots(a, b, c, d);
      if (roots.size() == comp.size()) {
        for (std::size_t j = 0; j < roots.size(); ++j) {
          CHECK(std::abs(roots[j] - comp[j]) <= 1e-6 * std::max(1.0, std::abs(comp[j])));
        }
      }
    }
  }
  SUBCASE("detector-shaped cubics: a, b > 0, d = -1, wide scale") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-12.0, 12.0);
    for (int i = 0; i < 2000; ++i) {
      const double a = std::pow(10.0, u(rng));
      const double b = std::pow(10.0, u(rng) / 2);
      const double c = (i % 2 ? 1.0 : -1.0) * std::pow(10.0, u(rng) / 3);
      const auto k = CubicCoefficients::from(a, b, c, -1.0);
      const double q = cardano_real_root(k);
      CHECK(q > 0.0);
      const double terms = std::abs(a * q * q * q) + std::abs(b * q * q) + std::abs(c * q) + 1.0;
      CHECK(std::abs(k.evaluate(q)) <= 1e-13 * terms);
      const double ref = oracle::largest_root_bisection(a, b, c, -1.0);
      CHECK(std::abs(q - ref) <= 1e-8 * std::abs(ref));
    }
  }
  CHECK_THROWS_AS(CubicCoefficients::from(0.0, 1.0, 1.0, 1.0), DegenerateCubic);
}

TEST_CASE("Marcum Q1 special values") {
  for (double p : {1e-1, 1e-3, 1e-6}) {
    CHECK(marcum_q1(0.0, std::sqrt(-2.0 * std::log(p))) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(marcum_q1(3.0, 0.0) == 1.0);
  CHECK(marcum_q1(0.0, 0.0) == 1.0);
  CHECK(marcum_q1(2.0, INFINITY) == 0.0);
  CHECK_THROWS_AS(marcum_q1(-1.0, 1.0), std::domain_error);
}

TEST_CASE("Marcum Q1 against two independent oracles") {
  const double as[] = {0.1, 0.5, 1.0, 2.0, 4.0, 7.5, 12.0, 25.0};
  const double bs[] = {0.05, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 26.0};
  for (double a : as) {
    for (double b : bs) {
      const double q = marcum_q1(a, b);
      const double p = oracle::marcum_q1_poisson(a, b);
      const double s = oracle::marcum_q1_simpson(a, b);
      INFO("a=" << a << " b=" << b);
      CHECK(std::abs(q - p) < 1e-10);
      CHECK(std::abs(q - s) < 1e-9);
    }
  }
}

TEST_CASE("Marcum Q1 is monotone in both arguments") {
  double prev = 0.0;
  for (double a = 0.0; a < 10.0; a += 0.25) {
    const double q = marcum_q1(a, 3.0);
    CHECK(q >= prev - 1e-15);
    prev = q;
  }
  prev = 1.0;
  for (double b = 0.0; b < 10.0; b += 0.25) {
    const double q = marcum_q1(2.0, b);
    CHECK(q <= prev + 1e-15);
    prev = q;
  }
}

TEST_CASE("scaled Bessel sequence matches std::cyl_bessel_i") {
  for (double x : {0.3, 2.0, 15.0, 80.0}) {
    const auto seq = scaled_bessel_i_sequence(x, 10);
    for (int k = 0; k <= 10; ++k) {
      CHECK(seq[k] == doctest::Approx(std::cyl_bessel_i(double(k), x) * std::exp(-x)).epsilon(1e-11));
    }
  }
}

TEST_CASE("steering vector has unit-modulus entries and broadside ones") {
  const CVector v = steering_vector(30.0, 8);
  for (int k = 0; k < 8; ++k) CHECK(std::abs(v(k)) == doctest::Approx(1.0));
  CHECK(std::arg(v(1)) == doctest::Approx(M_PI * 0.5));
  const CVector b = steering_vector(0.0, 4);
  CHECK((b - CVector::Ones(4)).norm() < 1e-15);
}

}
