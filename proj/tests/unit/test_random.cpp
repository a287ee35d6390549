#include <doctest.h>

#include <cmath>

#include "isac/numerics.hpp"
#include "isac/random.hpp"

using namespace isac;

TEST_SUITE("random") {

TEST_CASE("same triple gives the same stream") {
  RandomStream a = derive_trial_stream(7, stable_hash("roc"), 42);
  RandomStream b = derive_trial_stream(7, stable_hash("roc"), 42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a() == b());
}

TEST_CASE("neighbouring trial streams are uncorrelated") {
  const std::uint64_t id = stable_hash("x");
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 8; ++t) {
    RandomStream a = derive_trial_stream(1, id, t);
    RandomStream b = derive_trial_stream(1, id, t + 1);
    ComplexNormal na(a), nb(b);
    const int n = 10000;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = na().real();
      const double y = nb().real();
      sab += x * y;
      saa += x * x;
      sbb += y * y;
    }
    const double rho = std::abs(sab / std::sqrt(saa * sbb));
    worst = std::max(worst, rho);
  }
  CHECK(worst < 0.04);  // |rho| ~ N(0, 1e-4): 0.04 is 4 sigma
}

TEST_CASE("adjacent streams over a long run") {
  RandomStream a = derive_trial_stream(1, stable_hash("x"), 0);
  RandomStream b = derive_trial_stream(1, stable_hash("x"), 1);
  ComplexNormal na(a), nb(b);
  const int n = 1000000;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx x = na();
    const cplx y = nb();
    sab += x.real() * y.real();
    saa += x.real() * x.real();
    sbb += y.real() * y.real();
  }
  CHECK(std::abs(sab / std::sqrt(saa * sbb)) < 0.01);  // 10 sigma at this length
}

TEST_CASE("streams differ across seeds, experiments and trials") {
  const auto first = [](RandomStream r) { return r(); };
  const std::uint64_t base = first(derive_trial_stream(1, 2, 3));
  CHECK(base != first(derive_trial_stream(2, 2, 3)));
  CHECK(base != first(derive_trial_stream(1, 3, 3)));
  CHECK(base != first(derive_trial_stream(1, 2, 4)));
  CHECK(stable_hash("roc") != stable_hash("fap"));
  CHECK(stable_hash("") == 0xcbf29ce484222325ULL);  // FNV-1a offset basis
}

TEST_CASE("complex normal moments") {
  RandomStream rng(9);
  ComplexNormal cn(rng);
  const int n = 100000;
  cplx mean = 0.0;
  double power = 0.0, re2 = 0.0, im2 = 0.0;
  cplx pseudo = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx z = cn(2.0);
    mean += z;
    power += std::norm(z);
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    pseudo += z * z;
  }
  CHECK(std::abs(mean / double(n)) < 0.02);
  CHECK(power / n == doctest::Approx(2.0).epsilon(0.02));
  CHECK(re2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(im2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(pseudo / double(n)) < 0.04);
}

}
