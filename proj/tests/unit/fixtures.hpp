#pragma once

#include "isac/config.hpp"
#include "isac/random.hpp"
#include "isac/scenario.hpp"
#include "isac/statistics.hpp"
#include "isac/waveform.hpp"

namespace isac::testing {

struct World {
  SystemConfig cfg;
  Scenario scenario;
  TransmitPlan plan;
  NullModel model;
};

inline World make_world(SystemConfig cfg, std::uint64_t seed = 1) {
  RandomStream rng(seed);
  Scenario s = generate_scenario(cfg, rng);
  TransmitPlan p = build_transmit_plan(cfg, s, rng);
  NullModel m = build_null_model(s, p, cfg);
  return {std::move(cfg), std::move(s), std::move(p), std::move(m)};
}

inline World default_world(std::uint64_t seed = 1) { return make_world(SystemConfig::reference_defaults(), seed); }

}  // namespace isac::testing
