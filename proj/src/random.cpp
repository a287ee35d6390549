#include "isac/random.hpp"

#include <cmath>

namespace isac {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t experiment_id,
                          std::uint64_t trial_index) {
  return mix64(mix64(mix64(master_seed) ^ experiment_id) ^ trial_index);
}

RandomStream derive_trial_stream(std::uint64_t master_seed, std::uint64_t experiment_id,
                                 std::uint64_t trial_index) {
  return RandomStream(derive_seed(master_seed, experiment_id, trial_index));
}

std::complex<double> ComplexNormal::operator()(double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = normal_(*rng_);
  const double im = normal_(*rng_);
  return {s * re, s * im};
}

void ComplexNormal::fill(Eigen::MatrixXcd& out, double variance) {
  const double s = std::sqrt(0.5 * variance);
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double re = normal_(*rng_);
      const double im = normal_(*rng_);
      out(i, j) = {s * re, s * im};
    }
  }
}

}  // namespace isac
