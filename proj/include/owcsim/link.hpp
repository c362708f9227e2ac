#pragma once

// APD receiver noise stack and the DCO-OFDM rate model. Noise terms consume
// the optical power incident on the photodiode before avalanche gain; the
// gain enters explicitly where it belongs (G^2 on shot noise, G on the signal
// and RIN currents), so gain is never double counted.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace owcsim {

struct ApdNoiseLedger {
  double b_l = 1.5e9;                       // modulation bandwidth, Hz
  double a_eff = kPi * 0.25 * 0.25 * 1e-4;  // detector effective area, m^2
  double psi_c = deg2rad(60.0);             // receiver field of view
  double g_apd = 30.0;
  double r_apd = 0.9;                       // responsivity, A/W
  double rin = std::pow(10.0, -15.5);       // relative intensity noise, 1/Hz
  double r_f = 50.0;                        // TIA feedback resistance, ohm
  double temperature = 300.0;               // K
  double k_a = 0.7;                         // ionization ratio
  double p_n = 1e-6;                        // ambient optical power, W

  static constexpr double k_boltzmann = 1.380649e-23;
  static constexpr double q_electron = 1.602176634e-19;
};

struct OfdmParams {
  int m_sub = 512;     // subcarriers, even
  double kappa = 3.0;  // DC-bias clipping factor
};

inline void validate(const OfdmParams& ofdm) {
  if (ofdm.m_sub < 4 || ofdm.m_sub % 2 != 0)
    throw std::invalid_argument("OfdmParams: subcarrier count must be even and >= 4");
  if (ofdm.kappa <= 0.0) throw std::invalid_argument("OfdmParams: kappa must be positive");
}

// McIntyre excess noise factor of the avalanche process.
inline double excess_noise_factor(const ApdNoiseLedger& led) {
  if (led.g_apd < 1.0) throw std::invalid_argument("excess_noise_factor: gain below unity");
  return led.k_a * led.g_apd + (1.0 - led.k_a) * (2.0 - 1.0 / led.g_apd);
}

struct NoisePsd {
  double thermal = 0.0;  // A^2/Hz at the TIA input
  double shot = 0.0;
  double rin = 0.0;

  double total() const { return thermal + shot + rin; }
};

// One-sided current noise PSDs for pre-gain optical signal power p_opt.
inline NoisePsd noise_psd_components(const ApdNoiseLedger& led, double p_opt) {
  if (p_opt < 0.0) throw std::invalid_argument("noise_psd_components: negative power");
  NoisePsd psd;
  psd.thermal = 4.0 * ApdNoiseLedger::k_boltzmann * led.temperature / led.r_f;
  psd.shot = 2.0 * ApdNoiseLedger::q_electron * led.g_apd * led.g_apd *
             excess_noise_factor(led) * led.r_apd * (p_opt + led.p_n);
  double i_sig = led.r_apd * led.g_apd * p_opt;
  psd.rin = led.rin * i_sig * i_sig;
  return psd;
}

// Per-subcarrier noise variance: total PSD times the subcarrier spacing B_L/M.
inline double total_noise_per_subcarrier(const ApdNoiseLedger& led, const OfdmParams& ofdm,
                                         double p_opt) {
  validate(ofdm);
  return noise_psd_components(led, p_opt).total() * led.b_l / ofdm.m_sub;
}

// Electrical SNR per data subcarrier of DCO-OFDM for a given noise variance.
inline double snr_given_noise(const ApdNoiseLedger& led, const OfdmParams& ofdm, double p_opt,
                              double sigma_sq) {
  validate(ofdm);
  if (sigma_sq <= 0.0) throw std::invalid_argument("snr_given_noise: noise must be positive");
  double i_sig = led.r_apd * led.g_apd * p_opt;
  return i_sig * i_sig / ((ofdm.m_sub - 2.0) * ofdm.kappa * ofdm.kappa * sigma_sq);
}

inline double snr_per_subcarrier(const ApdNoiseLedger& led, const OfdmParams& ofdm,
                                 double p_opt) {
  return snr_given_noise(led, ofdm, p_opt, total_noise_per_subcarrier(led, ofdm, p_opt));
}

// SINR when other active beams leak onto the detector. Interfering powers are
// pre-gain optical like the signal; each interferer contributes its squared
// electrical current under the same per-subcarrier normalization, which then
// cancels against the signal's and leaves the noise term scaled as usual.
inline double sinr_with_ici_given_noise(const ApdNoiseLedger& led, const OfdmParams& ofdm,
                                        double p_signal, const std::vector<double>& p_int,
                                        double sigma_sq) {
  validate(ofdm);
  if (sigma_sq <= 0.0) throw std::invalid_argument("sinr_with_ici: noise must be positive");
  double rg = led.r_apd * led.g_apd;
  double sig = rg * p_signal;
  double denom = (ofdm.m_sub - 2.0) * ofdm.kappa * ofdm.kappa * sigma_sq;
  for (double p : p_int) {
    if (p < 0.0) throw std::invalid_argument("sinr_with_ici: negative interferer power");
    double c = rg * p;
    denom += c * c;
  }
  return sig * sig / denom;
}

inline double sinr_with_ici(const ApdNoiseLedger& led, const OfdmParams& ofdm, double p_signal,
                            const std::vector<double>& p_int) {
  return sinr_with_ici_given_noise(led, ofdm, p_signal, p_int,
                                   total_noise_per_subcarrier(led, ofdm, p_signal));
}

// Shannon-capped DCO-OFDM rate: only M/2 - 1 subcarriers carry data.
inline double data_rate(const OfdmParams& ofdm, double b_l, double gamma) {
  validate(ofdm);
  if (b_l <= 0.0) throw std::invalid_argument("data_rate: bandwidth must be positive");
  if (gamma < 0.0) throw std::invalid_argument("data_rate: negative SNR");
  double frac = (0.5 * ofdm.m_sub - 1.0) / ofdm.m_sub;
  return frac * b_l * std::log2(1.0 + gamma);
}

}  // namespace owcsim
