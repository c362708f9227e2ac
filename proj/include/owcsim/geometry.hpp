#pragma once

// Desk-scale scene geometry: the beam array on the ceiling AP, the cell grid
// on the user plane, link angles, receiver orientation models and random
// waypoint mobility.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rng.hpp"
#include "vec3.hpp"

namespace owcsim {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct Rect {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
};

// One transmitter of the array: launch point at the AP, aimed cell center on
// the user plane, unit aiming direction.
struct BeamSite {
  Vec3 p_tx;
  Vec3 p_cell;
  Vec3 n_tx;
};

// n_side x n_side beams on a d_beam pitch at the AP, each aimed at the center
// of its cell on a d_cell pitch on the user plane. Row-major indexing
// (ix = row * n_side + col), rows along +y, cols along +x.
struct BeamArrayLayout {
  int n_side = 0;
  double d_cell = 0.0;
  double d_beam = 0.0;
  Vec3 ap_center;
  double ue_height = 0.0;
  std::vector<BeamSite> beams;

  std::size_t n_beams() const { return beams.size(); }

  // Footprint of the cell grid on the user plane.
  Rect footprint() const {
    double half = 0.5 * n_side * d_cell;
    return {ap_center.x - half, ap_center.x + half, ap_center.y - half, ap_center.y + half};
  }

  // Cell that contains (x, y), or nothing outside the footprint.
  std::optional<std::size_t> cell_index_of(double x, double y) const {
    Rect fp = footprint();
    if (!fp.contains(x, y)) return std::nullopt;
    int col = static_cast<int>((x - fp.xmin) / d_cell);
    int row = static_cast<int>((y - fp.ymin) / d_cell);
    if (col >= n_side) col = n_side - 1;  // x exactly on the upper edge
    if (row >= n_side) row = n_side - 1;
    return static_cast<std::size_t>(row * n_side + col);
  }
};

inline BeamArrayLayout build_grid_array(int n_side, double d_cell, double ap_height,
                                        double ue_height, double d_beam) {
  if (n_side <= 0) throw std::invalid_argument("build_grid_array: n_side must be positive");
  if (d_cell <= 0.0) throw std::invalid_argument("build_grid_array: d_cell must be positive");
  if (d_beam <= 0.0) throw std::invalid_argument("build_grid_array: d_beam must be positive");
  if (ap_height <= ue_height)
    throw std::invalid_argument("build_grid_array: AP must sit above the user plane");

  BeamArrayLayout layout;
  layout.n_side = n_side;
  layout.d_cell = d_cell;
  layout.d_beam = d_beam;
  layout.ap_center = {0.0, 0.0, ap_height};
  layout.ue_height = ue_height;
  layout.beams.reserve(static_cast<std::size_t>(n_side) * n_side);

  double off = 0.5 * (n_side - 1);
  for (int row = 0; row < n_side; ++row) {
    for (int col = 0; col < n_side; ++col) {
      BeamSite site;
      site.p_tx = {(col - off) * d_beam, (row - off) * d_beam, ap_height};
      site.p_cell = {(col - off) * d_cell, (row - off) * d_cell, ue_height};
      site.n_tx = normalize(site.p_cell - site.p_tx);
      layout.beams.push_back(site);
    }
  }
  return layout;
}

// Link angles between a transmitter and a receiver:
//  distance   Tx-to-receiver range
//  radiance   angle between the Tx aiming direction and the Tx->Rx ray
//  incidence  angle between the receiver normal and the Rx->Tx ray
struct AnglesResult {
  double distance = 0.0;
  double radiance = 0.0;
  double incidence = 0.0;
};

inline AnglesResult angles(const Vec3& p_tx, const Vec3& n_tx, const Vec3& p_rx,
                           const Vec3& n_rx) {
  Vec3 d = p_rx - p_tx;
  double dist = norm(d);
  if (dist <= 0.0) throw std::invalid_argument("angles: coincident transmitter and receiver");
  Vec3 dir = {d.x / dist, d.y / dist, d.z / dist};
  AnglesResult out;
  out.distance = dist;
  out.radiance = angle_between(normalize(n_tx), dir);
  out.incidence = angle_between(normalize(n_rx), {-dir.x, -dir.y, -dir.z});
  return out;
}

// Receiver orientation models. "Elevation" is the polar angle between the
// device normal and the vertical, so 0 means facing straight up.
enum class OrientationKind { fixed_up, gaussian_elevation, uniform_elevation };

struct OrientationModel {
  OrientationKind kind = OrientationKind::fixed_up;
  double mean_elev = deg2rad(41.0);  // gaussian_elevation
  double std_elev = deg2rad(7.7);
  double max_elev = deg2rad(45.0);   // uniform_elevation
};

inline Vec3 sample_orientation(const OrientationModel& model, RngStream& rng) {
  double elev = 0.0;
  switch (model.kind) {
    case OrientationKind::fixed_up:
      return {0.0, 0.0, 1.0};
    case OrientationKind::gaussian_elevation: {
      // Redraw until inside [0, pi/2); the default parameters make rejection rare.
      do {
        elev = rng.normal(model.mean_elev, model.std_elev);
      } while (elev < 0.0 || elev >= 0.5 * kPi);
      break;
    }
    case OrientationKind::uniform_elevation:
      elev = rng.uniform(0.0, model.max_elev);
      break;
  }
  double azim = rng.uniform(0.0, 2.0 * kPi);
  double s = std::sin(elev);
  return {s * std::cos(azim), s * std::sin(azim), std::cos(elev)};
}

// Random waypoint mobility on the user plane.
struct MobilityParams {
  double speed = 1.0;       // m/s
  Rect bounds;              // waypoints drawn uniformly here
  double pause_time = 0.0;  // dwell at each waypoint, seconds
};

struct UeState {
  Vec3 position;
  Vec3 rx_normal = {0.0, 0.0, 1.0};
  Vec3 waypoint;
  double pause_remaining = 0.0;
  bool has_waypoint = false;
};

// Advance one time step. Movement is piecewise linear toward the current
// waypoint; on arrival the walker pauses, then draws the next waypoint.
inline UeState random_waypoint_step(UeState state, const MobilityParams& mob, double dt,
                                    RngStream& rng) {
  if (dt < 0.0) throw std::invalid_argument("random_waypoint_step: negative dt");
  if (mob.speed < 0.0) throw std::invalid_argument("random_waypoint_step: negative speed");
  if (mob.speed == 0.0 || dt == 0.0) return state;

  double remaining = dt;
  while (remaining > 0.0) {
    if (state.pause_remaining > 0.0) {
      double used = std::min(state.pause_remaining, remaining);
      state.pause_remaining -= used;
      remaining -= used;
      continue;
    }
    if (!state.has_waypoint) {
      state.waypoint = {rng.uniform(mob.bounds.xmin, mob.bounds.xmax),
                        rng.uniform(mob.bounds.ymin, mob.bounds.ymax), state.position.z};
      state.has_waypoint = true;
    }
    Vec3 to_wp = state.waypoint - state.position;
    double dist = norm(to_wp);
    double step = mob.speed * remaining;
    if (step >= dist) {
      state.position = state.waypoint;
      state.has_waypoint = false;
      state.pause_remaining = mob.pause_time;
      remaining -= (mob.speed > 0.0) ? dist / mob.speed : remaining;
      if (dist == 0.0 && mob.pause_time == 0.0) {
        // Zero-length leg with no pause: consume the step to guarantee progress.
        remaining = 0.0;
      }
    } else {
      state.position = state.position + (step / dist) * to_wp;
      remaining = 0.0;
    }
  }
  return state;
}

}  // namespace owcsim
