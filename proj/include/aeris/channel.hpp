#pragma once

#include <array>
#include <complex>
#include <vector>

#include "aeris/common.hpp"
#include "aeris/scenario.hpp"

namespace aeris {

using Complex = std::complex<double>;
using ComplexChannelVector = std::vector<Complex>;

// Every link-level constant in one place. Powers and gains are linear
// (watts / ratios); thresholds are in dB per service class.
struct ChannelParams {
  double omega1 = 11.95;   // urban environment constant
  double omega2 = 0.14;
  double alpha1 = 2.2;     // path loss exponent
  double alpha2 = 0.2;     // extra NLoS attenuation, dimensionless
  double mu = 1e-3;        // reference path loss power gain at d0 = 1 m
  double rician_k = 10.0;  // linear
  double carrier_wavelength_m = 0.299792458;     // 1 GHz carrier
  double element_spacing_m = 0.299792458 / 2.0;  // half wavelength
  double noise_power_w = 1e-20;                  // -170 dBm
  double tx_power_w = 0.1;
  double bandwidth_hz = 1e6;
  std::array<double, 3> thresholds_db{30.0, 25.0, 20.0};  // video, data, audio

  void validate() const;
};

// Quantized phase vector of one RIS. All entries are members of the discrete
// set psi = { 2*pi*k / 2^bits : k = 0 .. 2^bits - 1 }.
struct PhaseConfig {
  std::vector<double> phases_rad;
  int phase_bits = 1;

  static PhaseConfig zeros(int element_count, int phase_bits);
  int level_count() const { return 1 << phase_bits; }
};

// Canonical representation of the k-th quantized phase level; quantizer and
// membership checks must both use this expression so equality is bitwise.
inline double psi_value(int level, int level_count) {
  return (kTwoPi * level) / level_count;
}

bool is_psi_member(double phase, int phase_bits);

// Angle between the UAV-UE ray and the ground plane, degrees in (0, 90].
double elevation_angle_deg(const Vec3& uav, const Vec3& ue);

double los_probability(double theta_deg, const ChannelParams& p);

// Probability-weighted LoS/NLoS blend at distance d.
double direct_gain_blend(double p_los, double d, const ChannelParams& p);

// Direct-link power gain between a UAV and a ground UE.
double direct_gain(const Vec3& uav, const Vec3& ue, const ChannelParams& p);

// Linear array response for a given direction cosine; unit-modulus entries.
ComplexChannelVector array_response(double cosine_angle, int element_count,
                                    const ChannelParams& p);

// Rician LoS component of the link between `from` and `to` through an
// M-element linear array; direction cosine is (from.x - to.x) / d.
ComplexChannelVector cascade_channel(const Vec3& from, const Vec3& to,
                                     const ChannelParams& p, int element_count);

// Combined direct + reflected SNR. `direct_amplitude` enters as a zero-phase
// real amplitude added coherently to the reflected sum.
double snr(double direct_amplitude, const ComplexChannelVector& uav_ris,
           const ComplexChannelVector& ris_ue, const PhaseConfig& phases,
           const ChannelParams& p);

// Full pipeline for one (UAV, RIS, UE) triple.
double link_snr(const Vec3& uav, const Vec3& ue, const RisDescriptor& ris,
                const PhaseConfig& phases, const ChannelParams& p);

bool is_covered(double snr_linear, ServiceClass service_class,
                const ChannelParams& p);

double data_rate(double snr_linear, const ChannelParams& p);

struct BestLink {
  int uav_index = -1;  // 0-based positions in the input vectors
  int ris_index = -1;
  double snr = 0.0;
  double rate = 0.0;
};

// Strongest (UAV, RIS) pair for a UE; ties break to the lowest index pair.
BestLink best_link(const UserElement& ue, const std::vector<UavPose>& uavs,
                   const std::vector<RisDescriptor>& ris_list,
                   const std::vector<PhaseConfig>& phase_configs,
                   const ChannelParams& p);

}  // namespace aeris
