#pragma once

// Closed-form layer for a single vertical beam serving a circular cell of the
// same area as the grid cell: the SNR profile over the cell, the exact and
// uniform-approximation SNR densities, the high-SNR average-rate formula, and
// the multi-user occupancy bounds the simulator is validated against.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "channel.hpp"
#include "lambertw.hpp"
#include "link.hpp"

namespace owcsim {

// Parameters of the central-beam model. gamma0 bundles every range-independent
// factor, so snr = gamma0 / (h^2 + r^2) * exp(-4 r^2 / w_h^2).
struct CentralBeamParams {
  double h = 0.0;       // vertical Tx-to-UE-plane drop, m
  double radius = 0.0;  // equivalent cell radius R = sqrt(d_cell^2 / pi), m
  double w_h = 0.0;     // beam radius at the user plane, m
  double gamma0 = 0.0;
};

inline void validate(const CentralBeamParams& cb) {
  if (cb.h <= 0.0 || cb.radius <= 0.0 || cb.w_h <= 0.0 || cb.gamma0 <= 0.0)
    throw std::invalid_argument("CentralBeamParams: all fields must be positive");
}

// Build the model from the physical stack, freezing the noise at the power
// received on the beam axis so the profile matches the simulator's reference
// noise convention exactly.
inline CentralBeamParams make_central_beam_params(const BeamParams& beam,
                                                  const ApdNoiseLedger& led,
                                                  const OfdmParams& ofdm, double h,
                                                  double d_cell) {
  if (h <= 0.0 || d_cell <= 0.0)
    throw std::invalid_argument("make_central_beam_params: h and d_cell must be positive");
  CentralBeamParams cb;
  cb.h = h;
  cb.radius = std::sqrt(d_cell * d_cell / kPi);
  cb.w_h = beam_width(beam, h);
  double p_center = gaussian_intensity(beam, h, 0.0) * led.a_eff;
  double sigma_sq = total_noise_per_subcarrier(led, ofdm, p_center);
  double i0 = led.r_apd * led.g_apd * p_center;
  cb.gamma0 = i0 * i0 * h * h / ((ofdm.m_sub - 2.0) * ofdm.kappa * ofdm.kappa * sigma_sq);
  validate(cb);
  return cb;
}

// Same model pinned to a target on-axis SNR in dB (replication mode).
inline CentralBeamParams make_calibrated_central_beam_params(double h, double d_cell,
                                                             double w_h, double peak_db) {
  CentralBeamParams cb;
  cb.h = h;
  cb.radius = std::sqrt(d_cell * d_cell / kPi);
  cb.w_h = w_h;
  cb.gamma0 = std::pow(10.0, peak_db / 10.0) * h * h;
  validate(cb);
  return cb;
}

inline double snr_central(const CentralBeamParams& cb, double r) {
  if (r < 0.0) throw std::invalid_argument("snr_central: negative radius");
  return cb.gamma0 / (cb.h * cb.h + r * r) * std::exp(-4.0 * r * r / (cb.w_h * cb.w_h));
}

inline double snr_db_central(const CentralBeamParams& cb, double r) {
  return 10.0 * std::log10(snr_central(cb, r));
}

struct SnrSupport {
  double lo_db = 0.0;  // at the cell rim
  double hi_db = 0.0;  // on the axis
};

inline SnrSupport snr_db_support(const CentralBeamParams& cb) {
  return {snr_db_central(cb, cb.radius), snr_db_central(cb, 0.0)};
}

// Radius at which the profile passes gamma_db; inverse of snr_db_central on
// [0, R]. Solved exactly with the Lambert W principal branch.
inline double radius_from_snr_db(const CentralBeamParams& cb, double gamma_db) {
  validate(cb);
  double w2 = cb.w_h * cb.w_h;
  double h2 = cb.h * cb.h;
  // Log of the Lambert argument; 4 h^2 / w^2 alone overflows exp() for
  // desk-scale geometry, so keep everything in log space.
  double larg = std::log(4.0 * cb.gamma0 / w2) + 4.0 * h2 / w2 -
                gamma_db * std::log(10.0) / 10.0;
  double u = 0.25 * w2 * lambert_w0_exp(larg);  // u = h^2 + r0^2
  double r2 = u - h2;
  if (r2 < 0.0) {
    if (r2 > -1e-12 * h2) return 0.0;  // rounding at the on-axis endpoint
    throw std::domain_error("radius_from_snr_db: gamma above the on-axis peak");
  }
  return std::sqrt(r2);
}

// Probability density of the received SNR in dB for a UE uniform over the
// disk, by the change of variables through r0(gamma).
inline double snr_pdf_exact(const CentralBeamParams& cb, double gamma_db) {
  SnrSupport sup = snr_db_support(cb);
  if (gamma_db < sup.lo_db || gamma_db > sup.hi_db) return 0.0;
  double r0 = radius_from_snr_db(cb, gamma_db);
  double w2 = cb.w_h * cb.w_h;
  double h2 = cb.h * cb.h;
  double r2 = cb.radius * cb.radius;
  return std::log(10.0) * (h2 + r0 * r0) * w2 /
         (10.0 * r2 * (4.0 * h2 + 4.0 * r0 * r0 + w2));
}

// Flat density obtained by dropping r0 against h; integrates to one over the
// support width to within the same small correction.
inline double snr_pdf_uniform(const CentralBeamParams& cb, double gamma_db) {
  SnrSupport sup = snr_db_support(cb);
  if (gamma_db < sup.lo_db || gamma_db > sup.hi_db) return 0.0;
  double w2 = cb.w_h * cb.w_h;
  double h2 = cb.h * cb.h;
  double r2 = cb.radius * cb.radius;
  return std::log(10.0) * h2 * w2 / (10.0 * r2 * (4.0 * h2 + w2));
}

// CDF companion of snr_pdf_exact, used for goodness-of-fit tests.
inline double snr_cdf_exact(const CentralBeamParams& cb, double gamma_db) {
  SnrSupport sup = snr_db_support(cb);
  if (gamma_db <= sup.lo_db) return 0.0;
  if (gamma_db >= sup.hi_db) return 1.0;
  double r0 = radius_from_snr_db(cb, gamma_db);
  return 1.0 - r0 * r0 / (cb.radius * cb.radius);
}

struct AvgRateResult {
  double rate = 0.0;   // bit/s
  bool low_snr = false;  // set when the rim SNR drops under 15 dB
};

// High-SNR closed form for the cell-average rate of the central beam.
inline AvgRateResult avg_rate_central(const CentralBeamParams& cb, const OfdmParams& ofdm,
                                      double b_l) {
  validate(cb);
  validate(ofdm);
  if (b_l <= 0.0) throw std::invalid_argument("avg_rate_central: bandwidth must be positive");
  double h2 = cb.h * cb.h;
  double r2 = cb.radius * cb.radius;
  double w2 = cb.w_h * cb.w_h;
  double bracket = (h2 + r2) * std::log(cb.gamma0 / (h2 + r2)) + r2 -
                   h2 * std::log(cb.gamma0 / h2) - 2.0 * r2 * r2 / w2;
  double pre = (ofdm.m_sub - 2.0) / (2.0 * std::log(2.0) * ofdm.m_sub * r2) * b_l;
  AvgRateResult out;
  out.rate = pre * bracket;
  out.low_snr = snr_db_central(cb, cb.radius) < 15.0;
  return out;
}

// The system-wide single-user average can never beat the central beam's cell
// average; checks the simulated per-beam averages and returns the bound.
inline double single_user_upper_bound(const std::vector<double>& per_beam_rates,
                                      std::size_t central_index) {
  if (per_beam_rates.empty())
    throw std::invalid_argument("single_user_upper_bound: no beams");
  if (central_index >= per_beam_rates.size())
    throw std::invalid_argument("single_user_upper_bound: bad central index");
  return per_beam_rates[central_index];
}

// Expected number of beams serving at least one of n_ue uniformly dropped
// UEs, out of n_beam equally likely beams.
inline double avg_active_beams(int n_beam, int n_ue) {
  if (n_beam < 1) throw std::invalid_argument("avg_active_beams: need at least one beam");
  if (n_ue < 0) throw std::invalid_argument("avg_active_beams: negative UE count");
  double n = static_cast<double>(n_beam);
  return n - n * std::pow(1.0 - 1.0 / n, n_ue);
}

// SDMA ceiling: every active beam serving at the central beam's cell average.
inline double multi_user_upper_bound(const CentralBeamParams& cb, const OfdmParams& ofdm,
                                     double b_l, int n_beam, int n_ue) {
  return avg_active_beams(n_beam, n_ue) * avg_rate_central(cb, ofdm, b_l).rate;
}

}  // namespace owcsim
