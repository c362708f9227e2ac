#pragma once

// Optical channel models: Gaussian beam propagation and downlink reception,
// the omnidirectional uplink transmitter (ODTx), a single-LED uplink variant,
// and the corner-cube retroreflector (CCR) probing path.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "vec3.hpp"

namespace owcsim {

// Gaussian beam described by its wavelength, full width at half maximum of
// the far-field divergence, and optical transmit power.
struct BeamParams {
  double wavelength = 1550e-9;  // m
  double theta_fwhm = 0.0;      // rad
  double theta_beam = 0.0;      // 1/e^2 half-divergence, rad
  double waist = 0.0;           // w0, m
  double p_tx_opt = 0.0;        // W

  static BeamParams from_fwhm(double wavelength, double theta_fwhm, double p_tx_opt) {
    if (wavelength <= 0.0) throw std::invalid_argument("BeamParams: wavelength must be positive");
    if (theta_fwhm <= 0.0 || theta_fwhm >= kPi)
      throw std::invalid_argument("BeamParams: theta_fwhm out of range");
    if (p_tx_opt < 0.0) throw std::invalid_argument("BeamParams: negative transmit power");
    BeamParams b;
    b.wavelength = wavelength;
    b.theta_fwhm = theta_fwhm;
    b.theta_beam = theta_fwhm / std::sqrt(2.0 * std::log(2.0));
    b.waist = wavelength / (kPi * b.theta_beam);
    b.p_tx_opt = p_tx_opt;
    return b;
  }
};

// 1/e^2 beam radius at axial distance z from the waist.
inline double beam_width(const BeamParams& beam, double z) {
  if (z < 0.0) throw std::invalid_argument("beam_width: negative axial distance");
  double zr = kPi * beam.waist * beam.waist / beam.wavelength;  // Rayleigh range
  double t = z / zr;
  return beam.waist * std::sqrt(1.0 + t * t);
}

// Irradiance at range d and radiance angle phi off the beam axis. The axial
// coordinate is d*cos(phi), the transverse offset d*sin(phi). Behind the
// launch plane (phi >= pi/2) the field is zero.
inline double gaussian_intensity(const BeamParams& beam, double d, double phi) {
  if (d <= 0.0) throw std::invalid_argument("gaussian_intensity: range must be positive");
  if (phi < 0.0) throw std::invalid_argument("gaussian_intensity: negative angle");
  if (phi >= 0.5 * kPi) return 0.0;
  double axial = d * std::cos(phi);
  double w = beam_width(beam, axial);
  double r = d * std::sin(phi);
  return 2.0 * beam.p_tx_opt / (kPi * w * w) * std::exp(-2.0 * r * r / (w * w));
}

struct DownlinkPower {
  double pre_gain = 0.0;  // optical power on the photodiode, W
  double at_ue = 0.0;     // after APD gain, W
};

// Received downlink power at a detector of effective area a_eff behind an APD
// of gain g_apd, with a hard field-of-view cutoff at incidence psi_c.
inline DownlinkPower received_power_downlink(const BeamParams& beam, const AnglesResult& a,
                                             double a_eff, double g_apd, double psi_c) {
  if (a_eff <= 0.0) throw std::invalid_argument("received_power_downlink: a_eff must be positive");
  if (g_apd < 1.0) throw std::invalid_argument("received_power_downlink: APD gain below unity");
  DownlinkPower out;
  if (a.incidence > psi_c || a.incidence >= 0.5 * kPi) return out;
  double inten = gaussian_intensity(beam, a.distance, a.radiance);
  out.pre_gain = inten * a_eff * std::cos(a.incidence);
  out.at_ue = out.pre_gain * g_apd;
  return out;
}

// Uplink: omnidirectional transmitter worn by the UE, received by a ceiling
// photodiode behind an idealized concentrator (refractive index n_ref, field
// of view psi_fov). The UE's orientation does not enter.
struct OdtxParams {
  double lambertian_order = 2.0;
  double p_tx_od = 10e-3;            // W
  double a_od = 1e-4;                // PD physical area, m^2
  double n_ref = 1.5;
  double psi_fov = deg2rad(60.0);
};

struct CeilingPd {
  Vec3 position;
  Vec3 normal;  // unit, pointing into the room
};

inline double received_power_uplink(const OdtxParams& od, const Vec3& ue_pos,
                                    const CeilingPd& pd) {
  Vec3 d = ue_pos - pd.position;
  double dist = norm(d);
  if (dist <= 0.0) throw std::invalid_argument("received_power_uplink: UE at the PD");
  double psi = angle_between(normalize(pd.normal), {d.x / dist, d.y / dist, d.z / dist});
  if (psi > od.psi_fov) return 0.0;
  double s = std::sin(od.psi_fov);
  return (od.lambertian_order + 1.0) * od.p_tx_od * od.a_od * od.n_ref * od.n_ref *
         std::cos(psi) / (2.0 * kPi * dist * dist * s * s);
}

// Uplink ablation: a single Lambertian LED pointing along the device normal,
// received through the same PD/concentrator. Unlike the ODTx this depends on
// the irradiance angle at the LED, so device orientation matters.
inline double received_power_single_led(const OdtxParams& od, const Vec3& ue_pos,
                                        const Vec3& led_normal, const CeilingPd& pd) {
  Vec3 d = pd.position - ue_pos;
  double dist = norm(d);
  if (dist <= 0.0) throw std::invalid_argument("received_power_single_led: UE at the PD");
  Vec3 dir = {d.x / dist, d.y / dist, d.z / dist};
  double phi_irr = angle_between(normalize(led_normal), dir);
  if (phi_irr >= 0.5 * kPi) return 0.0;
  double psi = angle_between(normalize(pd.normal), {-dir.x, -dir.y, -dir.z});
  if (psi > od.psi_fov) return 0.0;
  double s = std::sin(od.psi_fov);
  double m = od.lambertian_order;
  return (m + 1.0) * od.p_tx_od * std::pow(std::cos(phi_irr), m) * od.a_od * od.n_ref *
         od.n_ref * std::cos(psi) / (2.0 * kPi * dist * dist * s * s);
}

// Corner-cube retroreflector worn face-up by the UE.
struct CcrParams {
  double depth = 5e-3;            // vertex-to-face depth L, m
  double n_re = 1.5;              // fill refractive index
  double l_ccr = 5e-3;            // active-area scale, m
  double aperture_radius = 2.5e-3;
  double acceptance = deg2rad(45.0);  // incidence beyond this reflects nothing
  double reflectivity = 1.0;
};

// Internal refraction angle of a ray arriving at incidence psi.
inline double ccr_refraction(double psi, double n_re) {
  if (n_re < 1.0) throw std::invalid_argument("ccr_refraction: n_re below 1");
  if (psi < 0.0 || psi > 0.5 * kPi) throw std::invalid_argument("ccr_refraction: bad incidence");
  return std::asin(std::sin(psi) / n_re);
}

// Overlap area of two circles with radii r1, r2 and center distance dist.
inline double circle_overlap_area(double r1, double r2, double dist) {
  if (r1 < 0.0 || r2 < 0.0 || dist < 0.0)
    throw std::invalid_argument("circle_overlap_area: negative argument");
  if (dist >= r1 + r2) return 0.0;
  double rmin = std::min(r1, r2);
  if (dist <= std::abs(r1 - r2)) return kPi * rmin * rmin;
  double d1 = (dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist);
  double d2 = dist - d1;
  double a1 = r1 * r1 * std::acos(std::min(1.0, std::max(-1.0, d1 / r1)));
  double a2 = r2 * r2 * std::acos(std::min(1.0, std::max(-1.0, d2 / r2)));
  double tri = d1 * std::sqrt(std::max(0.0, r1 * r1 - d1 * d1)) +
               d2 * std::sqrt(std::max(0.0, r2 * r2 - d2 * d2));
  return a1 + a2 - tri;
}

// Fraction of the entrance aperture still retroreflecting at incidence psi.
// Oblique rays walk across the cube by D = 2 L tan(phi'), shearing the exit
// aperture against the entrance aperture; the active area is their overlap.
inline double ccr_active_area_fraction(const CcrParams& ccr, double psi) {
  if (psi > ccr.acceptance) return 0.0;
  double phi_i = ccr_refraction(psi, ccr.n_re);
  double shift = 2.0 * ccr.depth * std::tan(phi_i);
  double r = ccr.aperture_radius;
  return circle_overlap_area(r, r, shift) / (kPi * r * r);
}

// AP-side receive apertures paired with each beam, and the model of the
// retroreflected return spot back at the AP plane.
struct RxApParams {
  double capture_diameter = 5e-3;       // RxAP aperture, m
  double offset = 5e-3;                 // Tx-to-RxAP center distance, m
  double return_divergence = 2e-3;      // residual return-beam divergence, rad
  double detection_threshold = 1e-9;    // entries below this read as zero, W
};

// Probe powers collected by each beam's RxAP when every beam illuminates the
// CCR at ue_pos (face normal vertical). Entry n covers only beam n's own
// return: the beam pitch is chosen so returns never reach a neighbour's RxAP.
inline std::vector<double> rxap_power_matrix(const BeamArrayLayout& layout,
                                             const BeamParams& beam, const Vec3& ue_pos,
                                             const CcrParams& ccr, const RxApParams& rxap) {
  if (layout.d_beam < ccr.l_ccr + rxap.capture_diameter)
    throw std::invalid_argument("rxap_power_matrix: beam pitch below L_CCR + d_RxAP");
  std::vector<double> out(layout.n_beams(), 0.0);
  Vec3 up = {0.0, 0.0, 1.0};
  double a_ccr = kPi * ccr.aperture_radius * ccr.aperture_radius;
  double r_rx = 0.5 * rxap.capture_diameter;
  for (std::size_t n = 0; n < layout.n_beams(); ++n) {
    const BeamSite& site = layout.beams[n];
    AnglesResult a = angles(site.p_tx, site.n_tx, ue_pos, up);
    if (a.incidence > ccr.acceptance || a.incidence >= 0.5 * kPi) continue;
    double inten = gaussian_intensity(beam, a.distance, a.radiance);
    double p_in = inten * a_ccr * std::cos(a.incidence);
    double p_back = p_in * ccr_active_area_fraction(ccr, a.incidence) * ccr.reflectivity;
    if (p_back <= 0.0) continue;
    // Return footprint at the AP plane: the corner cube re-images the source
    // point-symmetrically, so the bundle comes back around the transmitter
    // with radius ~l_ccr, widened by the residual divergence over the range.
    double r_spot = ccr.l_ccr + a.distance * std::tan(rxap.return_divergence);
    double capture = circle_overlap_area(r_spot, r_rx, rxap.offset) / (kPi * r_spot * r_spot);
    double p_rx = p_back * capture;
    out[n] = (p_rx >= rxap.detection_threshold) ? p_rx : 0.0;
  }
  return out;
}

}  // namespace owcsim
