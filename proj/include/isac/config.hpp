#pragma once

// System configuration: antenna counts, frame split, powers, geometry and
// path-loss parameters, target amplitude and seed. Serialized as a flat
// sectioned key = value file; physical quantities carry their unit in the
// key name (..._dbm, ..._deg, ..._m).

#include <complex>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isac {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PilotPattern { prefix, interleaved };

struct AngleRange {
  double lo_deg = 0.0;
  double hi_deg = 0.0;
};

struct SystemConfig {
  int n_tx = 8;     // N
  int n_rx = 16;    // M
  int n_users = 3;  // K, follows user_aods_deg unless set explicitly
  double carrier_ghz = 28.0;

  int frame_length = 32;  // L
  int pilot_length = 8;   // L_p; the data block is L - L_p
  double pilot_to_data_ratio = 1.0 / 3.0;
  PilotPattern pilot_pattern = PilotPattern::interleaved;
  bool random_pilot_phases = false;

  double p_pilot_dbm = 30.0;
  double p_data_dbm = 30.0;
  double noise_dbm = -90.0;

  double target_aod_deg = 10.0;
  double target_aoa_deg = 10.0;
  std::vector<double> user_aods_deg{20.0, 25.0, 30.0};
  AngleRange clutter_aod_range_deg{50.0, 60.0};
  AngleRange clutter_aoa_range_deg{50.0, 60.0};
  int n_paths = 3;
  double tx_rx_distance_m = 40.0;
  double user_distance_m = 40.0;

  double pathloss_a = 61.4;
  double pathloss_b = 2.0;
  double shadow_sigma_db = 5.8;

  double alpha_abs = 0.0;
  double alpha_phase_deg = 0.0;

  std::uint64_t seed = 1;

  int data_length() const { return frame_length - pilot_length; }
  std::complex<double> alpha() const;
  double noise_power_w() const;
  double pilot_power_w() const;
  double data_power_w() const;

  /// Sets L and re-derives L_p from pilot_to_data_ratio.
  void set_frame_length(int length);

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  /// The simulation setup of the reference experiments (N = 8, M = 16,
  /// 28 GHz, 40 m, clutter in [50, 60] deg, users at 20/25/30 deg, target at
  /// 10 deg, -90 dBm noise, 30 dBm pilot and data power, L_p : L_d = 1 : 3).
  /// |alpha| is set for a 10 dB pilot SNR at the 30 dBm pilot power
  /// (0 dB at 20 dBm).
  static SystemConfig reference_defaults();
};

/// Pilot count for a frame of the given length, round(L r / (1 + r)) kept
/// inside [1, L - 1].
int pilot_length_for(int frame_length, double pilot_to_data_ratio);

/// |alpha| such that |alpha|^2 P_p N M / sigma^2 equals the given SNR, i.e.
/// the matched-beam pilot SNR |alpha|^2 |lambda_p_bar|^2 beta_bar without clutter.
double alpha_abs_for_snr(const SystemConfig& cfg, double snr_db);

/// Parses the key = value text and then applies "key=value" overrides,
/// last one wins. Accepted key forms: "section.key", "key", and the short
/// aliases N, M, K, L, L_p, seed.
SystemConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

/// Loads a file; the literal path "defaults" yields reference_defaults().
SystemConfig load_config(const std::filesystem::path& path,
                         const std::vector<std::string>& overrides = {});

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const SystemConfig& cfg);

std::uint64_t config_hash(const SystemConfig& cfg);

}  // namespace isac
