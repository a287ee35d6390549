#include "isac/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "isac/random.hpp"

namespace isac {

namespace {

double dbm_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = boost::algorithm::trim_copy(value);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw ConfigError("config key '" + key + "': '" + value + "' is not a number");
  }
  return x;
}

int parse_int(const std::string& key, const std::string& value) {
  const double x = parse_double(key, value);
  if (x != std::floor(x) || std::abs(x) > 1e9) {
    throw ConfigError("config key '" + key + "': '" + value + "' is not an integer");
  }
  return static_cast<int>(x);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, value, boost::is_any_of(","));
  std::vector<double> out;
  for (const auto& p : parts) {
    if (boost::algorithm::trim_copy(p).empty()) continue;
    out.push_back(parse_double(key, p));
  }
  return out;
}

AngleRange parse_range(const std::string& key, const std::string& value) {
  const auto v = parse_list(key, value);
  if (v.size() != 2) throw ConfigError("config key '" + key + "' needs two values 'lo, hi'");
  return {v[0], v[1]};
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(value));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': '" + value + "' is not a boolean");
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Setter = std::function<void(SystemConfig&, const std::string&, const std::string&)>;

// Order matters: keys are applied in this order so derived quantities
// (pilot length from the ratio, |alpha| from an SNR) see their inputs.
const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"n_tx", [](auto& c, auto& k, auto& v) { c.n_tx = parse_int(k, v); }},
      {"n_rx", [](auto& c, auto& k, auto& v) { c.n_rx = parse_int(k, v); }},
      {"user_aods_deg",
       [](auto& c, auto& k, auto& v) {
         c.user_aods_deg = parse_list(k, v);
         c.n_users = static_cast<int>(c.user_aods_deg.size());
       }},
      {"n_users", [](auto& c, auto& k, auto& v) { c.n_users = parse_int(k, v); }},
      {"carrier_ghz", [](auto& c, auto& k, auto& v) { c.carrier_ghz = parse_double(k, v); }},
      {"pilot_to_data_ratio",
       [](auto& c, auto& k, auto& v) {
         c.pilot_to_data_ratio = parse_double(k, v);
         c.set_frame_length(c.frame_length);
       }},
      {"frame_length", [](auto& c, auto& k, auto& v) { c.set_frame_length(parse_int(k, v)); }},
      {"pilot_length", [](auto& c, auto& k, auto& v) { c.pilot_length = parse_int(k, v); }},
      {"pilot_pattern",
       [](auto& c, auto& k, auto& v) {
         const std::string p = boost::algorithm::trim_copy(v);
         if (p == "prefix") {
           c.pilot_pattern = PilotPattern::prefix;
         } else if (p == "interleaved") {
           c.pilot_pattern = PilotPattern::interleaved;
         } else {
           throw ConfigError("config key '" + k + "': expected prefix or interleaved");
         }
       }},
      {"random_pilot_phases",
       [](auto& c, auto& k, auto& v) { c.random_pilot_phases = parse_bool(k, v); }},
      {"p_pilot_dbm", [](auto& c, auto& k, auto& v) { c.p_pilot_dbm = parse_double(k, v); }},
      {"p_data_dbm", [](auto& c, auto& k, auto& v) { c.p_data_dbm = parse_double(k, v); }},
      {"noise_dbm", [](auto& c, auto& k, auto& v) { c.noise_dbm = parse_double(k, v); }},
      {"target_aod_deg", [](auto& c, auto& k, auto& v) { c.target_aod_deg = parse_double(k, v); }},
      {"target_aoa_deg", [](auto& c, auto& k, auto& v) { c.target_aoa_deg = parse_double(k, v); }},
      {"clutter_aod_range_deg",
       [](auto& c, auto& k, auto& v) { c.clutter_aod_range_deg = parse_range(k, v); }},
      {"clutter_aoa_range_deg",
       [](auto& c, auto& k, auto& v) { c.clutter_aoa_range_deg = parse_range(k, v); }},
      {"n_paths", [](auto& c, auto& k, auto& v) { c.n_paths = parse_int(k, v); }},
      {"tx_rx_distance_m",
       [](auto& c, auto& k, auto& v) { c.tx_rx_distance_m = parse_double(k, v); }},
      {"user_distance_m", [](auto& c, auto& k, auto& v) { c.user_distance_m = parse_double(k, v); }},
      {"pathloss_a", [](auto& c, auto& k, auto& v) { c.pathloss_a = parse_double(k, v); }},
      {"pathloss_b", [](auto& c, auto& k, auto& v) { c.pathloss_b = parse_double(k, v); }},
      {"shadow_sigma_db", [](auto& c, auto& k, auto& v) { c.shadow_sigma_db = parse_double(k, v); }},
      {"alpha_abs", [](auto& c, auto& k, auto& v) { c.alpha_abs = parse_double(k, v); }},
      {"alpha_phase_deg", [](auto& c, auto& k, auto& v) { c.alpha_phase_deg = parse_double(k, v); }},
      {"alpha_snr_db",
       [](auto& c, auto& k, auto& v) { c.alpha_abs = alpha_abs_for_snr(c, parse_double(k, v)); }},
      {"seed",
       [](auto& c, auto& k, auto& v) {
         const std::string t = boost::algorithm::trim_copy(v);
         char* end = nullptr;
         const unsigned long long s = std::strtoull(t.c_str(), &end, 0);
         if (t.empty() || end != t.c_str() + t.size()) {
           throw ConfigError("config key '" + k + "': '" + v + "' is not an unsigned integer");
         }
         c.seed = s;
       }},
  };
  return table;
}

std::string canonical_key(std::string key) {
  boost::algorithm::trim(key);
  static const std::map<std::string, std::string> aliases = {
      {"N", "n_tx"},         {"M", "n_rx"}, {"K", "n_users"},
      {"L", "frame_length"}, {"L_p", "pilot_length"},
  };
  if (auto it = aliases.find(key); it != aliases.end()) return it->second;
  if (auto dot = key.rfind('.'); dot != std::string::npos) key = key.substr(dot + 1);
  for (const auto& [name, _] : setters()) {
    if (name == key) return key;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

std::complex<double> SystemConfig::alpha() const {
  return std::polar(alpha_abs, alpha_phase_deg * std::numbers::pi / 180.0);
}

double SystemConfig::noise_power_w() const { return dbm_to_w(noise_dbm); }
double SystemConfig::pilot_power_w() const { return dbm_to_w(p_pilot_dbm); }
double SystemConfig::data_power_w() const { return dbm_to_w(p_data_dbm); }

int pilot_length_for(int frame_length, double ratio) {
  const int lp = static_cast<int>(std::lround(frame_length * ratio / (1.0 + ratio)));
  return std::clamp(lp, 1, std::max(1, frame_length - 1));
}

void SystemConfig::set_frame_length(int length) {
  frame_length = length;
  pilot_length = pilot_length_for(length, pilot_to_data_ratio);
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid config: " + what); };
  if (n_tx < 1) fail("n_tx must be >= 1");
  if (n_rx < 1) fail("n_rx must be >= 1");
  if (n_users < 0) fail("n_users must be >= 0");
  if (n_users > n_tx) fail("n_users cannot exceed n_tx (precoder has n_tx columns)");
  if (n_users > static_cast<int>(user_aods_deg.size())) fail("n_users exceeds user_aods_deg");
  if (frame_length < 2) fail("frame_length must be >= 2");
  if (pilot_length < 1 || pilot_length >= frame_length) fail("need 0 < pilot_length < frame_length");
  if (!(pilot_to_data_ratio > 0.0) || !std::isfinite(pilot_to_data_ratio)) {
    fail("pilot_to_data_ratio must be positive");
  }
  if (!std::isfinite(p_pilot_dbm)) fail("p_pilot_dbm must be finite");
  if (std::isnan(p_data_dbm) || p_data_dbm == INFINITY) fail("p_data_dbm must be finite or -inf");
  if (!std::isfinite(noise_dbm)) fail("noise_dbm must be finite");
  if (n_paths < 0) fail("n_paths must be >= 0");
  if (!(tx_rx_distance_m > 0.0)) fail("tx_rx_distance_m must be positive");
  if (!(user_distance_m > 0.0)) fail("user_distance_m must be positive");
  if (!(shadow_sigma_db >= 0.0)) fail("shadow_sigma_db must be >= 0");
  if (clutter_aod_range_deg.lo_deg > clutter_aod_range_deg.hi_deg ||
      clutter_aoa_range_deg.lo_deg > clutter_aoa_range_deg.hi_deg) {
    fail("clutter angle ranges need lo <= hi");
  }
  if (!(alpha_abs >= 0.0) || !std::isfinite(alpha_abs)) fail("alpha_abs must be finite and >= 0");
}

SystemConfig SystemConfig::reference_defaults() {
  SystemConfig c;
  c.alpha_abs = alpha_abs_for_snr(c, 10.0);
  return c;
}

double alpha_abs_for_snr(const SystemConfig& cfg, double snr_db) {
  const double snr = std::pow(10.0, snr_db / 10.0);
  return std::sqrt(snr * cfg.noise_power_w() / (cfg.pilot_power_w() * cfg.n_tx * cfg.n_rx));
}

SystemConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }

  std::map<std::string, std::string> values;
  auto put = [&values](const std::string& key, const std::string& value) {
    values[canonical_key(key)] = value;
  };
  for (const auto& [section, node] : tree) {
    if (node.empty()) {
      put(section, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) put(section + "." + key, leaf.data());
  }
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + item + "' is not key=value");
    put(item.substr(0, eq), item.substr(eq + 1));
  }

  SystemConfig cfg = SystemConfig::reference_defaults();
  for (const auto& [name, setter] : setters()) {
    if (auto it = values.find(name); it != values.end()) setter(cfg, name, it->second);
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path,
                         const std::vector<std::string>& overrides) {
  if (path == "defaults") return parse_config("", overrides);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string serialize_config(const SystemConfig& c) {
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
  };
  auto range = [](const AngleRange& r) { return fmt(r.lo_deg) + ", " + fmt(r.hi_deg); };
  std::ostringstream o;
  o << "[array]\n"
    << "n_tx = " << c.n_tx << "\n"
    << "n_rx = " << c.n_rx << "\n"
    << "user_aods_deg = " << list(c.user_aods_deg) << "\n"
    << "n_users = " << c.n_users << "\n\n"
    << "[frame]\n"
    << "pilot_to_data_ratio = " << fmt(c.pilot_to_data_ratio) << "\n"
    << "frame_length = " << c.frame_length << "\n"
    << "pilot_length = " << c.pilot_length << "\n"
    << "pilot_pattern = " << (c.pilot_pattern == PilotPattern::prefix ? "prefix" : "interleaved")
    << "\n"
    << "random_pilot_phases = " << (c.random_pilot_phases ? "true" : "false") << "\n\n"
    << "[power]\n"
    << "p_pilot_dbm = " << fmt(c.p_pilot_dbm) << "\n"
    << "p_data_dbm = " << fmt(c.p_data_dbm) << "\n"
    << "noise_dbm = " << fmt(c.noise_dbm) << "\n\n"
    << "[geometry]\n"
    << "carrier_ghz = " << fmt(c.carrier_ghz) << "\n"
    << "target_aod_deg = " << fmt(c.target_aod_deg) << "\n"
    << "target_aoa_deg = " << fmt(c.target_aoa_deg) << "\n"
    << "clutter_aod_range_deg = " << range(c.clutter_aod_range_deg) << "\n"
    << "clutter_aoa_range_deg = " << range(c.clutter_aoa_range_deg) << "\n"
    << "n_paths = " << c.n_paths << "\n"
    << "tx_rx_distance_m = " << fmt(c.tx_rx_distance_m) << "\n"
    << "user_distance_m = " << fmt(c.user_distance_m) << "\n\n"
    << "[pathloss]\n"
    << "pathloss_a = " << fmt(c.pathloss_a) << "\n"
    << "pathloss_b = " << fmt(c.pathloss_b) << "\n"
    << "shadow_sigma_db = " << fmt(c.shadow_sigma_db) << "\n\n"
    << "[target]\n"
    << "alpha_abs = " << fmt(c.alpha_abs) << "\n"
    << "alpha_phase_deg = " << fmt(c.alpha_phase_deg) << "\n\n"
    << "[run]\n"
    << "seed = " << c.seed << "\n";
  return o.str();
}

std::uint64_t config_hash(const SystemConfig& cfg) { return stable_hash(serialize_config(cfg)); }

}  // namespace isac
