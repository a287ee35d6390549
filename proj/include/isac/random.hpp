#pragma once

// Reproducible random streams. Every Monte Carlo trial owns a stream whose
// seed is a stable hash of (master seed, experiment id, trial index), so the
// draws a trial sees never depend on scheduling or thread count.

#include <complex>
#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <string_view>

#include <Eigen/Dense>

namespace isac {

using RandomStream = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a over the bytes of a label; used to turn experiment names into ids.
std::uint64_t stable_hash(std::string_view text);

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t experiment_id,
                          std::uint64_t trial_index);

RandomStream derive_trial_stream(std::uint64_t master_seed, std::uint64_t experiment_id,
                                 std::uint64_t trial_index);

/// Circular complex Gaussian source CN(0, variance).
class ComplexNormal {
 public:
  explicit ComplexNormal(RandomStream& rng) : rng_(&rng) {}

  std::complex<double> operator()(double variance = 1.0);
  void fill(Eigen::MatrixXcd& out, double variance = 1.0);

 private:
  RandomStream* rng_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};  // ziggurat
};

}  // namespace isac
