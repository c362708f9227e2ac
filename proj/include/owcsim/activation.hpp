#pragma once

// Beam activation: strongest-signal selection, the CCR probing variant, the
// signaling overhead of the probing handshake, uplink feature datasets for
// the neural selector, and the delayed/noisy benchmark schemes.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "channel.hpp"
#include "geometry.hpp"
#include "link.hpp"
#include "rng.hpp"

namespace owcsim {

// Index of the strongest entry; ties resolve to the lowest index, an all-zero
// vector means no coverage.
inline std::optional<std::size_t> select_beam_sss(const std::vector<double>& powers) {
  if (powers.empty()) throw std::invalid_argument("select_beam_sss: empty power vector");
  std::size_t best = 0;
  bool any = false;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    if (powers[i] < 0.0) throw std::invalid_argument("select_beam_sss: negative power");
    if (powers[i] > 0.0 && (!any || powers[i] > powers[best])) {
      best = i;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return best;
}

// CCR activation consumes the RxAP probe vector the same way.
inline std::optional<std::size_t> select_beam_ccr(const std::vector<double>& rxap_powers) {
  return select_beam_sss(rxap_powers);
}

// Downlink received powers (pre-gain) over all beams for a UE with the given
// receiver normal.
inline std::vector<double> downlink_powers(const BeamArrayLayout& layout,
                                           const BeamParams& beam, const ApdNoiseLedger& led,
                                           const Vec3& ue_pos, const Vec3& ue_normal) {
  std::vector<double> out(layout.n_beams(), 0.0);
  for (std::size_t n = 0; n < layout.n_beams(); ++n) {
    const BeamSite& site = layout.beams[n];
    AnglesResult a = angles(site.p_tx, site.n_tx, ue_pos, ue_normal);
    out[n] = received_power_downlink(beam, a, led.a_eff, led.g_apd, led.psi_c).pre_gain;
  }
  return out;
}

// Strongest beam for an upward-facing UE at pos; full scan over the array.
inline std::optional<std::size_t> select_beam_at_position(const BeamArrayLayout& layout,
                                                          const BeamParams& beam,
                                                          const ApdNoiseLedger& led,
                                                          const Vec3& pos) {
  return select_beam_sss(downlink_powers(layout, beam, led, pos, {0.0, 0.0, 1.0}));
}

// Same result restricted to the 3x3 cell neighbourhood of pos; the Gaussian
// profile decays monotonically with the transverse offset, so beams two or
// more cells away can never win. Positions outside the footprint fall back to
// the full scan.
inline std::optional<std::size_t> select_beam_near(const BeamArrayLayout& layout,
                                                   const BeamParams& beam,
                                                   const ApdNoiseLedger& led, const Vec3& pos) {
  auto home = layout.cell_index_of(pos.x, pos.y);
  if (!home) return select_beam_at_position(layout, beam, led, pos);
  int n = layout.n_side;
  int row = static_cast<int>(*home) / n;
  int col = static_cast<int>(*home) % n;
  Vec3 up = {0.0, 0.0, 1.0};
  double best_p = 0.0;
  std::size_t best = 0;
  bool any = false;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      int r = row + dr, c = col + dc;
      if (r < 0 || r >= n || c < 0 || c >= n) continue;
      std::size_t ix = static_cast<std::size_t>(r * n + c);
      const BeamSite& site = layout.beams[ix];
      AnglesResult a = angles(site.p_tx, site.n_tx, pos, up);
      double p = received_power_downlink(beam, a, led.a_eff, led.g_apd, led.psi_c).pre_gain;
      if (p > 0.0 && (!any || p > best_p || (p == best_p && ix < best))) {
        best_p = p;
        best = ix;
        any = true;
      }
    }
  }
  if (!any) return std::nullopt;
  return best;
}

// Probing handshake timing around each data frame.
struct TimingParams {
  double t_ts = 0.3e-6;       // test signal, s
  double t_delta = 3e-9;      // propagation + detection
  double t_rs = 0.3e-6;       // report signal
  double t_sifs = 2e-6;       // interframe spacing, applied twice
  double l_data = 65536.0 * 8.0;  // payload bits per frame
};

struct EffectiveThroughput {
  double t_data = 0.0;
  double t_delay = 0.0;
  double t_total = 0.0;
  double factor = 0.0;      // t_data / t_total
  double throughput = 0.0;  // factor * downlink rate
};

inline EffectiveThroughput effective_throughput(const TimingParams& t, double zeta_down) {
  if (zeta_down <= 0.0)
    throw std::invalid_argument("effective_throughput: rate must be positive");
  EffectiveThroughput out;
  out.t_data = t.l_data / zeta_down;
  out.t_delay = t.t_ts + t.t_delta + t.t_rs + 2.0 * t.t_sifs;
  out.t_total = out.t_data + out.t_delay;
  out.factor = out.t_data / out.t_total;
  out.throughput = out.factor * zeta_down;
  return out;
}

// Ceiling photodiode constellation for uplink reception: one facing straight
// down plus four tilted toward +-x/+-y.
inline std::vector<CeilingPd> make_ceiling_pds(const Vec3& ap_center, double tilt) {
  std::vector<CeilingPd> pds;
  pds.push_back({ap_center, {0.0, 0.0, -1.0}});
  double s = std::sin(tilt), c = std::cos(tilt);
  pds.push_back({ap_center, {s, 0.0, -c}});
  pds.push_back({ap_center, {-s, 0.0, -c}});
  pds.push_back({ap_center, {0.0, s, -c}});
  pds.push_back({ap_center, {0.0, -s, -c}});
  return pds;
}

// Supervised rows for the neural selector: uplink received powers at each
// ceiling PD, the strongest downlink beam as the label, and the position
// normalized to the footprint for the regression variant.
struct RssDataset {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::vector<std::vector<double>> positions_norm;
  std::size_t n_train = 0;  // rows [0, n_train) train, the rest test
};

enum class UplinkKind { odtx, single_led };

inline RssDataset generate_training_set(const BeamArrayLayout& layout, const BeamParams& beam,
                                        const ApdNoiseLedger& led, const OdtxParams& od,
                                        const std::vector<CeilingPd>& pds,
                                        const OrientationModel& orientation, std::size_t n,
                                        std::uint64_t seed, double train_fraction = 0.8,
                                        UplinkKind uplink = UplinkKind::odtx) {
  if (n < 2) throw std::invalid_argument("generate_training_set: need at least two rows");
  if (pds.empty()) throw std::invalid_argument("generate_training_set: no ceiling PDs");
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw std::invalid_argument("generate_training_set: train fraction must be in (0,1)");
  RssDataset ds;
  ds.features.reserve(n);
  ds.labels.reserve(n);
  ds.positions_norm.reserve(n);
  Rect fp = layout.footprint();
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng = derive_stream(seed, stream_id::dataset, i);
    Vec3 pos = {rng.uniform(fp.xmin, fp.xmax), rng.uniform(fp.ymin, fp.ymax),
                layout.ue_height};
    Vec3 normal = sample_orientation(orientation, rng);
    std::vector<double> row(pds.size());
    for (std::size_t k = 0; k < pds.size(); ++k) {
      row[k] = (uplink == UplinkKind::odtx)
                   ? received_power_uplink(od, pos, pds[k])
                   : received_power_single_led(od, pos, normal, pds[k]);
    }
    auto label = select_beam_at_position(layout, beam, led, pos);
    if (!label) continue;  // outside coverage; cannot happen inside the footprint
    ds.features.push_back(std::move(row));
    ds.labels.push_back(static_cast<int>(*label));
    ds.positions_norm.push_back({(pos.x - fp.xmin) / (fp.xmax - fp.xmin),
                                 (pos.y - fp.ymin) / (fp.ymax - fp.ymin)});
  }
  ds.n_train = static_cast<std::size_t>(train_fraction * ds.features.size());
  return ds;
}

// Benchmark activation schemes for the mobility study. CCR reacts to the
// current position; the others act on a position stale by their delay, the
// vision-positioning flavor with an extra 2-D Gaussian error of total
// standard deviation pos_error (per-axis pos_error / sqrt(2)).
enum class SchemeKind { ccr, odtx, isvlp };

struct BenchmarkScheme {
  SchemeKind kind = SchemeKind::ccr;
  double delay = 0.0;      // s
  double pos_error = 0.0;  // m
};

inline Vec3 scheme_observed_position(const BenchmarkScheme& s, const Vec3& pos_now,
                                     const Vec3& pos_stale, RngStream& rng) {
  switch (s.kind) {
    case SchemeKind::ccr:
      return pos_now;
    case SchemeKind::odtx:
      return pos_stale;
    case SchemeKind::isvlp: {
      double sig = s.pos_error / std::sqrt(2.0);
      Vec3 p = pos_stale;
      p.x += rng.normal(0.0, sig);
      p.y += rng.normal(0.0, sig);
      return p;
    }
  }
  throw std::logic_error("scheme_observed_position: unknown scheme");
}

inline std::optional<std::size_t> benchmark_select(const BenchmarkScheme& s,
                                                   const BeamArrayLayout& layout,
                                                   const BeamParams& beam,
                                                   const ApdNoiseLedger& led,
                                                   const Vec3& pos_now, const Vec3& pos_stale,
                                                   RngStream& rng) {
  Vec3 obs = scheme_observed_position(s, pos_now, pos_stale, rng);
  return select_beam_near(layout, beam, led, obs);
}

}  // namespace owcsim
