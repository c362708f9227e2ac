#pragma once

// Laser eye-safety limits for the two supported bands (850 nm and 1550 nm):
// maximum permissible exposure tables, pupil-averaged exposure of a Gaussian
// beam, and the resulting transmit power ceiling.

#include <cmath>
#include <stdexcept>

#include "channel.hpp"

namespace owcsim {

// Closest credible eye approach used for the power ceiling, m.
inline constexpr double kMostHazardousPosition = 0.1;

struct MpeResult {
  double e_mpe = 0.0;      // permitted irradiance, W/m^2
  double aperture = 0.0;   // measurement aperture diameter, m
};

// Irradiance limit and measurement aperture versus exposure time. Exposure
// times cover [0.35 s, 1000 s] at 1550 nm and [1 ms, 1000 s] at 850 nm.
inline MpeResult mpe_lookup(double wavelength, double t_exp) {
  constexpr double tol = 1e-12;
  bool band_1550 = std::abs(wavelength - 1550e-9) < tol;
  bool band_850 = std::abs(wavelength - 850e-9) < tol;
  if (!band_1550 && !band_850)
    throw std::out_of_range("mpe_lookup: unsupported wavelength");

  MpeResult out;
  if (band_1550) {
    if (t_exp < 0.35 || t_exp > 1e3)
      throw std::out_of_range("mpe_lookup: exposure time out of range for 1550 nm");
    if (t_exp < 10.0) {
      out.e_mpe = 1e4 / t_exp;
      out.aperture = 1.5e-3 * std::pow(t_exp, 3.0 / 8.0);
    } else {
      out.e_mpe = 1000.0;
      out.aperture = 3.5e-3;
    }
  } else {
    if (t_exp < 1e-3 || t_exp > 1e3)
      throw std::out_of_range("mpe_lookup: exposure time out of range for 850 nm");
    double c4 = std::pow(10.0, 0.002 * (850.0 - 700.0));
    double c7 = 1.0;
    if (t_exp < 10.0) {
      out.e_mpe = 18.0 * std::pow(t_exp, 0.75) * c4 / t_exp;
    } else {
      out.e_mpe = 10.0 * c4 * c7;
    }
    out.aperture = 7e-3;
  }
  return out;
}

// Exposure of a pupil of diameter d_a centered on the beam axis at range z:
// the fraction of power entering the pupil, averaged over the pupil area.
inline double exposure_level(const BeamParams& beam, double p_tx, double z, double d_a) {
  if (p_tx < 0.0) throw std::invalid_argument("exposure_level: negative power");
  if (z < 0.0) throw std::invalid_argument("exposure_level: negative range");
  if (d_a <= 0.0) throw std::invalid_argument("exposure_level: aperture must be positive");
  double w = beam_width(beam, z);
  double frac = 1.0 - std::exp(-d_a * d_a / (2.0 * w * w));
  return p_tx / (kPi * 0.25 * d_a * d_a) * frac;
}

// Largest transmit power whose exposure at the most hazardous position stays
// at or below the permitted irradiance.
inline double max_transmit_power(double wavelength, double theta_fwhm, double t_exp) {
  MpeResult mpe = mpe_lookup(wavelength, t_exp);
  BeamParams beam = BeamParams::from_fwhm(wavelength, theta_fwhm, 1.0);
  double w = beam_width(beam, kMostHazardousPosition);
  double d_a = mpe.aperture;
  double frac = 1.0 - std::exp(-d_a * d_a / (2.0 * w * w));
  return kPi * d_a * d_a * mpe.e_mpe / (4.0 * frac);
}

// Deployment default: the eye-safe ceiling floored to a whole milliwatt.
inline double default_transmit_power(double wavelength, double theta_fwhm,
                                     double t_exp = 100.0) {
  double p = max_transmit_power(wavelength, theta_fwhm, t_exp);
  return std::floor(p * 1e3) / 1e3;
}

}  // namespace owcsim
