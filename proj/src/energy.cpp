#include "aeris/energy.hpp"

#include <cmath>

namespace aeris {

void EnergyParams::validate() const {
  if (eta_i <= 0.0 || eta_b <= 0.0 || v_tip <= 0.0 || v0 <= 0.0 || f0 <= 0.0 ||
      rotor_solidity <= 0.0 || air_density <= 0.0 || rotor_disc_area <= 0.0)
    throw ConfigError("energy: all rotor constants must be strictly positive");
}

double propulsion_power(double speed_mps, const EnergyParams& p) {
  if (speed_mps < 0.0) throw DomainError("propulsion_power: negative speed");
  double v2 = speed_mps * speed_mps;
  double induced =
      p.eta_i * std::sqrt(std::sqrt(1.0 + v2 * v2 / (4.0 * p.v0 * p.v0 * p.v0 * p.v0)) -
                          v2 / (2.0 * p.v0 * p.v0));
  double blade = p.eta_b * (1.0 + 3.0 * v2 / (p.v_tip * p.v_tip));
  double parasite = 0.5 * p.f0 * p.air_density * p.rotor_solidity *
                    p.rotor_disc_area * v2 * speed_mps;
  return induced + blade + parasite;
}

double step_energy(double speed_mps, double dt_s, const EnergyParams& p) {
  if (dt_s <= 0.0) throw DomainError("step_energy: slot duration must be positive");
  if (speed_mps < 0.0) throw DomainError("step_energy: negative speed");
  if (speed_mps == 0.0) return hover_power(p) * dt_s;
  return propulsion_power(speed_mps, p) * dt_s;
}

BatteryState battery_step(const BatteryState& battery, double energy_j) {
  if (energy_j < 0.0) throw DomainError("battery_step: negative energy");
  BatteryState next = battery;
  next.level_j -= energy_j;
  return next;
}

}  // namespace aeris
