#include "aeris/channel.hpp"

#include <cmath>

namespace aeris {

void ChannelParams::validate() const {
  if (omega1 <= 0.0 || omega2 <= 0.0)
    throw ConfigError("channel: omega constants must be positive");
  if (alpha1 <= 0.0) throw ConfigError("channel: alpha1 must be positive");
  if (alpha2 <= 0.0 || alpha2 > 1.0)
    throw ConfigError("channel: alpha2 must lie in (0, 1]");
  if (mu <= 0.0) throw ConfigError("channel: mu must be positive");
  if (rician_k < 0.0) throw ConfigError("channel: Rician K must be >= 0");
  if (carrier_wavelength_m <= 0.0 || element_spacing_m <= 0.0)
    throw ConfigError("channel: wavelength and element spacing must be positive");
  if (noise_power_w <= 0.0 || tx_power_w <= 0.0 || bandwidth_hz <= 0.0)
    throw ConfigError("channel: powers and bandwidth must be positive");
  if (!(thresholds_db[0] >= thresholds_db[1] &&
        thresholds_db[1] >= thresholds_db[2]))
    throw ConfigError(
        "channel: thresholds must be ordered video >= data >= audio");
}

PhaseConfig PhaseConfig::zeros(int element_count, int phase_bits) {
  if (element_count < 1 || phase_bits < 1)
    throw ConfigError("PhaseConfig: element count and bits must be >= 1");
  PhaseConfig c;
  c.phases_rad.assign(element_count, 0.0);
  c.phase_bits = phase_bits;
  return c;
}

bool is_psi_member(double phase, int phase_bits) {
  int levels = 1 << phase_bits;
  for (int k = 0; k < levels; ++k)
    if (phase == psi_value(k, levels)) return true;
  return false;
}

double elevation_angle_deg(const Vec3& uav, const Vec3& ue) {
  double d = distance(uav, ue);
  if (d <= 0.0)
    throw DomainError("elevation_angle: coincident UAV and UE positions");
  double dz = uav.z - ue.z;
  return (180.0 / kPi) * std::asin(dz / d);
}

double los_probability(double theta_deg, const ChannelParams& p) {
  return 1.0 / (1.0 + p.omega1 * std::exp(-p.omega2 * (theta_deg - p.omega1)));
}

double direct_gain_blend(double p_los, double d, const ChannelParams& p) {
  if (d <= 0.0) throw DomainError("direct_gain: zero link distance");
  double path = std::pow(d, -p.alpha1);
  return p_los * path + (1.0 - p_los) * p.alpha2 * path;
}

double direct_gain(const Vec3& uav, const Vec3& ue, const ChannelParams& p) {
  double d = distance(uav, ue);
  double p_los = los_probability(elevation_angle_deg(uav, ue), p);
  return direct_gain_blend(p_los, d, p);
}

ComplexChannelVector array_response(double cosine_angle, int element_count,
                                    const ChannelParams& p) {
  if (std::abs(cosine_angle) > 1.0)
    throw DomainError("array_response: direction cosine outside [-1, 1]");
  if (element_count < 1)
    throw DomainError("array_response: need at least one element");
  ComplexChannelVector v(element_count);
  double step = -(kTwoPi / p.carrier_wavelength_m) * p.element_spacing_m *
                cosine_angle;
  for (int m = 0; m < element_count; ++m)
    v[m] = std::polar(1.0, step * m);
  return v;
}

ComplexChannelVector cascade_channel(const Vec3& from, const Vec3& to,
                                     const ChannelParams& p,
                                     int element_count) {
  double d = distance(from, to);
  if (d <= 0.0) throw DomainError("cascade_channel: zero link distance");
  double magnitude = std::sqrt(p.mu * std::pow(d, -p.alpha1)) *
                     std::sqrt(p.rician_k / (p.rician_k + 1.0));
  double cosine = (from.x - to.x) / d;
  ComplexChannelVector v = array_response(cosine, element_count, p);
  for (auto& e : v) e *= magnitude;
  return v;
}

double snr(double direct_amplitude, const ComplexChannelVector& uav_ris,
           const ComplexChannelVector& ris_ue, const PhaseConfig& phases,
           const ChannelParams& p) {
  if (uav_ris.size() != ris_ue.size() ||
      uav_ris.size() != phases.phases_rad.size())
    throw ContractError("snr: channel vector / phase length mismatch (" +
                        std::to_string(uav_ris.size()) + ", " +
                        std::to_string(ris_ue.size()) + ", " +
                        std::to_string(phases.phases_rad.size()) + ")");
  Complex sum(direct_amplitude, 0.0);
  for (std::size_t m = 0; m < uav_ris.size(); ++m)
    sum += std::conj(uav_ris[m]) * std::polar(1.0, phases.phases_rad[m]) *
           ris_ue[m];
  return p.tx_power_w * std::norm(sum) / p.noise_power_w;
}

double link_snr(const Vec3& uav, const Vec3& ue, const RisDescriptor& ris,
                const PhaseConfig& phases, const ChannelParams& p) {
  ChannelParams local = p;
  local.element_spacing_m = ris.element_spacing_m;
  double amp = std::sqrt(direct_gain(uav, ue, p));
  ComplexChannelVector h_ur =
      cascade_channel(uav, ris.position, local, ris.element_count);
  ComplexChannelVector h_ri =
      cascade_channel(ris.position, ue, local, ris.element_count);
  return snr(amp, h_ur, h_ri, phases, local);
}

bool is_covered(double snr_linear, ServiceClass service_class,
                const ChannelParams& p) {
  if (snr_linear < 0.0) throw DomainError("is_covered: negative SNR");
  if (snr_linear == 0.0) return false;
  return to_db(snr_linear) >= p.thresholds_db[class_index(service_class)];
}

double data_rate(double snr_linear, const ChannelParams& p) {
  if (snr_linear < 0.0) throw DomainError("data_rate: negative SNR");
  return p.bandwidth_hz * std::log2(1.0 + snr_linear);
}

BestLink best_link(const UserElement& ue, const std::vector<UavPose>& uavs,
                   const std::vector<RisDescriptor>& ris_list,
                   const std::vector<PhaseConfig>& phase_configs,
                   const ChannelParams& p) {
  if (uavs.empty() || ris_list.empty())
    throw ContractError("best_link: empty UAV or RIS set");
  if (phase_configs.size() != ris_list.size())
    throw ContractError("best_link: phase config count does not match RIS count");
  BestLink best;
  for (std::size_t u = 0; u < uavs.size(); ++u) {
    for (std::size_t r = 0; r < ris_list.size(); ++r) {
      double g = link_snr(uavs[u].position, ue.position, ris_list[r],
                          phase_configs[r], p);
      if (g > best.snr || best.uav_index < 0) {
        best.uav_index = static_cast<int>(u);
        best.ris_index = static_cast<int>(r);
        best.snr = g;
      }
    }
  }
  best.rate = data_rate(best.snr, p);
  return best;
}

}  // namespace aeris
