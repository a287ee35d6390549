#pragma once

// Hybrid transmit frame (pilot beam with unit-modulus symbols plus precoded
// random payload, placed by a pilot/data index partition) and received-frame
// synthesis under either hypothesis.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "isac/config.hpp"
#include "isac/numerics.hpp"
#include "isac/random.hpp"
#include "isac/scenario.hpp"

namespace isac {

struct InvalidSplit : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Hypothesis : std::uint8_t { h0 = 0, h1 = 1 };
enum class GenerationMode : std::uint8_t { physical = 0, statistical = 1 };

const char* to_string(Hypothesis h);
const char* to_string(GenerationMode m);

/// Partition of the L slots into pilot and data positions. The permutation
/// matrices J_p (L_p x L) and J_d (L_d x L) are the row selections by these
/// index lists, so J_p J_p^T = I and J_d J_d^T = I hold by construction.
struct FramePlan {
  int length = 0;
  std::vector<int> pilot_positions;
  std::vector<int> data_positions;

  int pilot_count() const { return static_cast<int>(pilot_positions.size()); }
  int data_count() const { return static_cast<int>(data_positions.size()); }

  /// X = X_p J_p + X_d J_d.
  CMatrix assemble(const CMatrix& x_p, const CMatrix& x_d) const;
  /// X J_p^T and X J_d^T.
  CMatrix pilot_columns(const CMatrix& x) const;
  CMatrix data_columns(const CMatrix& x) const;
};

/// prefix puts pilots at 0..L_p-1. interleaved spaces them ceil(L/L_p)
/// apart, falling back to floor(i L / L_p) when that stride overruns L.
FramePlan build_frame_plan(int length, int pilot_count, PilotPattern pattern);

struct TransmitPlan {
  CVector f_p;  // N, |f_p|^2 = P_p / L_p
  CVector s_p;  // L_p unit-modulus pilot symbols
  CMatrix f_d;  // N x N, |F_d|_F^2 = P_d / L_d
  FramePlan frame;

  CVector fbar_p() const;
  CMatrix fbar_d() const;
  /// X_p = f_p s_p^T (N x L_p).
  CMatrix pilot_block() const;
};

/// f_p is the matched beam sqrt(P_p / (L_p N)) b_t so that b_t^H f_p is
/// maximal; F_d holds matched beams toward the first K user angles in its
/// first K columns (the rest zero), scaled to |F_d|_F^2 = P_d / L_d. The
/// stream is only consumed when random_pilot_phases is set.
TransmitPlan build_transmit_plan(const SystemConfig& cfg, const Scenario& s, RandomStream& rng);

/// N x L_d matrix of i.i.d. CN(0, 1) symbols.
CMatrix draw_payload(const SystemConfig& cfg, RandomStream& rng);

struct ReceivedFrame {
  CMatrix y;  // M x L
  Hypothesis hypothesis = Hypothesis::h0;
  GenerationMode mode = GenerationMode::physical;
  std::uint64_t seed = 0;
};

/// Y = (H_e + [H1] alpha a_t b_t^H) (f_p s_p^T J_p + F_d S_d J_d) + W with
/// W i.i.d. CN(0, sigma^2). Draws the payload first, then the noise, so H0
/// and H1 from the same stream share both.
ReceivedFrame synthesize_physical(const Scenario& s, const TransmitPlan& plan, double noise_power,
                                  Hypothesis h, RandomStream& rng);

struct NullModel;

/// Gaussian idealization of the frame: Y = U + [H1] dU + C Z with
/// C C^H = Sigma_bar (+ L^-1 |alpha|^2 |lambda_d_bar|^2 a_t a_t^H under H1)
/// and Z i.i.d. CN(0, 1). The square root is the Cholesky factor.
class StatisticalGenerator {
 public:
  StatisticalGenerator(const NullModel& model, const TransmitPlan& plan, cplx alpha, Hypothesis h);

  ReceivedFrame draw(RandomStream& rng) const;
  /// The frame for a given Z, for tests.
  ReceivedFrame from_noise(const CMatrix& z) const;

  const CMatrix& mean() const { return mean_; }
  const CMatrix& root() const { return root_; }

 private:
  CMatrix mean_;
  CMatrix root_;
  Hypothesis hypothesis_;
};

ReceivedFrame synthesize_statistical(const NullModel& model, const TransmitPlan& plan, cplx alpha,
                                     Hypothesis h, RandomStream& rng);

/// Binary container: 8-byte magic "ISACFRM1", uint32 M, uint32 L,
/// uint8 hypothesis, uint8 mode, 6 reserved bytes, uint64 seed, then M*L
/// (re, im) float64 pairs in column-major order. Little-endian.
void write_frame(const std::filesystem::path& path, const ReceivedFrame& frame);
ReceivedFrame read_frame(const std::filesystem::path& path);

}  // namespace isac
