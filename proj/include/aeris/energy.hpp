#pragma once

#include "aeris/common.hpp"

namespace aeris {

// Rotary-wing propulsion constants. Defaults are the canonical values for
// this power model; all configurable.
struct EnergyParams {
  double eta_i = 88.63;          // W, multiplies the induced-power radical
  double eta_b = 79.86;          // W, multiplies the blade-profile term
  double v_tip = 120.0;          // rotor blade tip speed, m/s
  double v0 = 4.03;              // mean rotor induced velocity, m/s
  double f0 = 0.6;               // fuselage drag ratio
  double rotor_solidity = 0.05;
  double air_density = 1.225;    // kg/m^3
  double rotor_disc_area = 0.503;  // m^2

  void validate() const;
};

struct BatteryState {
  double capacity_j = 0.0;  // level at mission start
  double level_j = 0.0;
  double reserve_j = 0.0;   // floor needed to return to the station
};

inline BatteryState make_battery(double init_j, double reserve_j) {
  BatteryState b;
  b.capacity_j = init_j + reserve_j;
  b.level_j = b.capacity_j;
  b.reserve_j = reserve_j;
  return b;
}

// Induced + blade-profile + parasite power at forward speed v.
double propulsion_power(double speed_mps, const EnergyParams& p);

inline double hover_power(const EnergyParams& p) { return p.eta_i + p.eta_b; }

// Energy spent over one slot: hover branch at v == 0, propulsion otherwise.
double step_energy(double speed_mps, double dt_s, const EnergyParams& p);

// Plain deduction; constraint checking happens in the environment.
BatteryState battery_step(const BatteryState& battery, double energy_j);

}  // namespace aeris
