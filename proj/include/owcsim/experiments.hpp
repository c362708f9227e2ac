#pragma once

// Experiment runners: each takes a ScenarioConfig, runs a deterministic
// (optionally parallel) sweep or Monte-Carlo study, and returns a ResultTable
// plus the summary numbers the test suite asserts on.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "owcsim/activation.hpp"
#include "owcsim/analysis.hpp"
#include "owcsim/channel.hpp"
#include "owcsim/config.hpp"
#include "owcsim/eyesafety.hpp"
#include "owcsim/geometry.hpp"
#include "owcsim/link.hpp"
#include "owcsim/mlp.hpp"
#include "owcsim/parallel.hpp"
#include "owcsim/rng.hpp"
#include "owcsim/table.hpp"

namespace owcsim {

inline constexpr const char* kBuildTag = "owcsim-0.1.0";

// Noise handling shared by all experiments. In "reference" mode the
// per-subcarrier noise is frozen at the central beam's on-axis received power,
// so SNR maps and closed-form cross-checks share one noise floor. In
// "calibrated" mode an additional flat noise term is added on top of that
// floor so the on-axis SNR hits a configured target (never below the physical
// floor). In "full" mode the noise tracks each sample's own received power.
struct LinkBudget {
    BeamParams beam;
    ApdNoiseLedger led;
    OfdmParams ofdm;
    NoiseMode mode = NoiseMode::reference;
    double h = 0.0;         // vertical Tx-to-UE-plane drop
    double p0 = 0.0;        // on-axis pre-gain received power at h
    double sigma_sq = 0.0;  // frozen per-subcarrier noise (reference/calibrated)

    double gamma_from_power(double p_pre) const {
        if (p_pre <= 0.0) return 0.0;
        if (mode == NoiseMode::full) return snr_per_subcarrier(led, ofdm, p_pre);
        return snr_given_noise(led, ofdm, p_pre, sigma_sq);
    }

    double gamma_with_ici(double p_pre, const std::vector<double>& p_int) const {
        if (p_pre <= 0.0) return 0.0;
        if (mode == NoiseMode::full)
            return sinr_with_ici(led, ofdm, p_pre, p_int);
        return sinr_with_ici_given_noise(led, ofdm, p_pre, p_int, sigma_sq);
    }

    double rate_from_gamma(double gamma) const {
        if (gamma <= 0.0) return 0.0;
        return data_rate(ofdm, led.b_l, gamma);
    }
};

inline LinkBudget make_link_budget(const ScenarioConfig& cfg, std::size_t theta_index) {
    LinkBudget lb;
    lb.beam = cfg.make_beam(theta_index);
    lb.led = cfg.make_ledger();
    lb.ofdm = cfg.make_ofdm();
    lb.mode = cfg.noise_mode();
    lb.h = cfg.layout.ap_height_m - cfg.layout.ue_height_m;
    lb.p0 = gaussian_intensity(lb.beam, lb.h, 0.0) * lb.led.a_eff;
    double sigma_ref = total_noise_per_subcarrier(lb.led, lb.ofdm, lb.p0);
    lb.sigma_sq = sigma_ref;
    if (lb.mode == NoiseMode::calibrated) {
        double target_db = cfg.noise.calibration_peaks_db.at(theta_index);
        double gamma_t = std::pow(10.0, target_db / 10.0);
        double i0 = lb.led.r_apd * lb.led.g_apd * lb.p0;
        double sigma_t = i0 * i0 /
            ((static_cast<double>(lb.ofdm.m_sub) - 2.0) * lb.ofdm.kappa * lb.ofdm.kappa * gamma_t);
        lb.sigma_sq = std::max(sigma_ref, sigma_t);
    }
    return lb;
}

// Central-beam closed-form parameters consistent with this budget's noise mode.
inline CentralBeamParams central_params(const LinkBudget& lb, double d_cell) {
    CentralBeamParams cb;
    cb.h = lb.h;
    cb.radius = std::sqrt(d_cell * d_cell / kPi);
    cb.w_h = beam_width(lb.beam, lb.h);
    cb.gamma0 = lb.gamma_from_power(lb.p0) * lb.h * lb.h;
    return cb;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

inline void add_standard_metadata(ResultTable& t, const ScenarioConfig& cfg,
                                  const std::string& experiment) {
    t.add_metadata("experiment", experiment);
    t.add_metadata("build", kBuildTag);
    t.add_metadata("seed", std::to_string(cfg.seed));
    t.add_metadata("config_hash", hash_hex(cfg.config_hash()));
    t.add_metadata("noise_mode", cfg.noise.mode);
}

// Pre-gain received power from one beam site for an upward-facing receiver.
inline double pre_gain_power_at(const BeamSite& site, const BeamParams& beam,
                                const ApdNoiseLedger& led, const Vec3& pos) {
    AnglesResult a = angles(site.p_tx, site.n_tx, pos, {0.0, 0.0, 1.0});
    return received_power_downlink(beam, a, led.a_eff, led.g_apd, led.psi_c).pre_gain;
}

// ---------------------------------------------------------------------------
// SNR map

struct SnrMapSummary {
    double theta_deg = 0.0;
    double peak_db = 0.0;            // on-axis SNR of the boresight beam
    double corner_falloff_db = 0.0;  // peak minus square-cell corner SNR
};

struct SnrMapResult {
    ResultTable table;
    std::vector<SnrMapSummary> summary;
};

inline SnrMapResult run_snr_map(const ScenarioConfig& cfg, int workers = 0) {
    ResultTable table({"map", "theta_fwhm_deg", "x_m", "y_m", "snr_db"});
    add_standard_metadata(table, cfg, "snr-map");
    SnrMapResult out{std::move(table), {}};

    const double d = cfg.layout.d_cell_m;
    const double ue_h = cfg.layout.ue_height_m;
    const int gn = cfg.snr_map.grid_n;
    const Vec3 p_tx{0.0, 0.0, cfg.layout.ap_height_m};
    const Vec3 n_tx{0.0, 0.0, -1.0};
    const Vec3 up{0.0, 0.0, 1.0};

    for (std::size_t ti = 0; ti < cfg.beam.theta_fwhm_deg.size(); ++ti) {
        LinkBudget lb = make_link_budget(cfg, ti);
        BeamSite central{p_tx, {0.0, 0.0, ue_h}, n_tx};

        std::vector<double> vals(static_cast<std::size_t>(gn) * gn);
        parallel_for(vals.size(), [&](std::size_t k) {
            int iy = static_cast<int>(k) / gn;
            int ix = static_cast<int>(k) % gn;
            double x = -d / 2.0 + d * ix / (gn - 1);
            double y = -d / 2.0 + d * iy / (gn - 1);
            double p = pre_gain_power_at(central, lb.beam, lb.led, {x, y, ue_h});
            vals[k] = 10.0 * std::log10(lb.gamma_from_power(p));
        }, workers);
        for (std::size_t k = 0; k < vals.size(); ++k) {
            int iy = static_cast<int>(k) / gn;
            int ix = static_cast<int>(k) % gn;
            double x = -d / 2.0 + d * ix / (gn - 1);
            double y = -d / 2.0 + d * iy / (gn - 1);
            out.table.add_row({std::string("central"), cfg.beam.theta_fwhm_deg[ti], x, y, vals[k]});
        }

        SnrMapSummary s;
        s.theta_deg = cfg.beam.theta_fwhm_deg[ti];
        double p_peak = pre_gain_power_at(central, lb.beam, lb.led, {0.0, 0.0, ue_h});
        double p_corner = pre_gain_power_at(central, lb.beam, lb.led, {d / 2.0, d / 2.0, ue_h});
        s.peak_db = 10.0 * std::log10(lb.gamma_from_power(p_peak));
        s.corner_falloff_db = s.peak_db - 10.0 * std::log10(lb.gamma_from_power(p_corner));
        out.summary.push_back(s);

        if (cfg.snr_map.include_array && cfg.layout.n_side > 1) {
            BeamArrayLayout layout = cfg.make_layout();
            Rect fp = layout.footprint();
            std::vector<double> avals(static_cast<std::size_t>(gn) * gn);
            parallel_for(avals.size(), [&](std::size_t k) {
                int iy = static_cast<int>(k) / gn;
                int ix = static_cast<int>(k) % gn;
                double x = fp.xmin + (fp.xmax - fp.xmin) * ix / (gn - 1);
                double y = fp.ymin + (fp.ymax - fp.ymin) * iy / (gn - 1);
                Vec3 pos{x, y, ue_h};
                auto sel = select_beam_near(layout, lb.beam, lb.led, pos);
                if (!sel) {
                    avals[k] = -std::numeric_limits<double>::infinity();
                    return;
                }
                double p = pre_gain_power_at(layout.beams[*sel], lb.beam, lb.led, pos);
                avals[k] = 10.0 * std::log10(lb.gamma_from_power(p));
            }, workers);
            for (std::size_t k = 0; k < avals.size(); ++k) {
                int iy = static_cast<int>(k) / gn;
                int ix = static_cast<int>(k) % gn;
                double x = fp.xmin + (fp.xmax - fp.xmin) * ix / (gn - 1);
                double y = fp.ymin + (fp.ymax - fp.ymin) * iy / (gn - 1);
                out.table.add_row({std::string("array"), cfg.beam.theta_fwhm_deg[ti], x, y, avals[k]});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// SNR probability density over the central cell

struct PdfResult {
    ResultTable table;
    double ks_exact = 0.0;
    double ks_uniform = 0.0;
    double max_rel_density_gap = 0.0;  // exact vs flat approximation, analytic
    double support_lo_db = 0.0;
    double support_hi_db = 0.0;
};

inline PdfResult run_pdf_experiment(const ScenarioConfig& cfg, int workers = 0) {
    std::size_t ti = cfg.theta_index_of(cfg.pdf.theta_fwhm_deg);
    LinkBudget lb = make_link_budget(cfg, ti);
    const double d = cfg.layout.d_cell_m;
    const double ue_h = cfg.layout.ue_height_m;
    const double radius = std::sqrt(d * d / kPi);
    const std::size_t n = static_cast<std::size_t>(cfg.pdf.n_samples);
    BeamSite central{{0.0, 0.0, cfg.layout.ap_height_m}, {0.0, 0.0, ue_h}, {0.0, 0.0, -1.0}};

    std::vector<double> samples(n);
    parallel_for(n, [&](std::size_t i) {
        RngStream rng = derive_stream(cfg.seed, stream_id::pdf_samples, i);
        double r = radius * std::sqrt(rng.uniform());
        double p = pre_gain_power_at(central, lb.beam, lb.led, {r, 0.0, ue_h});
        samples[i] = 10.0 * std::log10(lb.gamma_from_power(p));
    }, workers);

    CentralBeamParams cb = central_params(lb, d);
    SnrSupport sup = snr_db_support(cb);

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double ks_exact = 0.0, ks_uniform = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double fe = snr_cdf_exact(cb, sorted[i]);
        double fu = std::clamp((sorted[i] - sup.lo_db) / (sup.hi_db - sup.lo_db), 0.0, 1.0);
        double lo_step = static_cast<double>(i) / sorted.size();
        double hi_step = static_cast<double>(i + 1) / sorted.size();
        ks_exact = std::max({ks_exact, std::abs(fe - lo_step), std::abs(fe - hi_step)});
        ks_uniform = std::max({ks_uniform, std::abs(fu - lo_step), std::abs(fu - hi_step)});
    }

    // Analytic exact-vs-flat density gap, relative to the peak density.
    double peak_density = 0.0, max_gap = 0.0;
    const int grid = 2001;
    for (int g = 1; g < grid - 1; ++g) {
        double x = sup.lo_db + (sup.hi_db - sup.lo_db) * g / (grid - 1);
        double pe = snr_pdf_exact(cb, x);
        double pu = snr_pdf_uniform(cb, x);
        peak_density = std::max(peak_density, pe);
        max_gap = std::max(max_gap, std::abs(pe - pu));
    }

    ResultTable table({"bin_center_db", "density_empirical", "density_exact", "density_uniform"});
    add_standard_metadata(table, cfg, "pdf");
    int nb = cfg.pdf.n_bins;
    double bw = (sup.hi_db - sup.lo_db) / nb;
    std::vector<std::size_t> counts(nb, 0);
    for (double v : samples) {
        int b = static_cast<int>((v - sup.lo_db) / bw);
        b = std::clamp(b, 0, nb - 1);
        counts[static_cast<std::size_t>(b)]++;
    }
    for (int b = 0; b < nb; ++b) {
        double center = sup.lo_db + (b + 0.5) * bw;
        double emp = counts[static_cast<std::size_t>(b)] / (bw * static_cast<double>(n));
        table.add_row({center, emp, snr_pdf_exact(cb, center), snr_pdf_uniform(cb, center)});
    }
    table.add_metadata("ks_exact", format_double_17g(ks_exact));
    table.add_metadata("ks_uniform", format_double_17g(ks_uniform));

    PdfResult out{std::move(table), ks_exact, ks_uniform,
                  max_gap / peak_density, sup.lo_db, sup.hi_db};
    return out;
}

// ---------------------------------------------------------------------------
// Average rate of a single cell vs cell size, Monte Carlo vs closed form

struct RateCellRow {
    double theta_deg = 0.0;
    double d_cell_m = 0.0;
    double rate_mc_bps = 0.0;
    double rate_closed_bps = 0.0;
    bool low_snr = false;
};

struct RateCellResult {
    ResultTable table;
    std::vector<RateCellRow> rows;
};

inline RateCellResult run_avg_rate_vs_cell_size(const ScenarioConfig& cfg, int workers = 0) {
    ResultTable table({"theta_fwhm_deg", "d_cell_m", "rate_mc_bps",
                       "rate_closed_bps", "rel_err", "low_snr"});
    add_standard_metadata(table, cfg, "rate-vs-cell");
    RateCellResult out{std::move(table), {}};

    const double ue_h = cfg.layout.ue_height_m;
    const std::size_t n = static_cast<std::size_t>(cfg.rate_cell.n_samples);
    const std::size_t n_d = cfg.rate_cell.d_cell_list_m.size();

    for (std::size_t ti = 0; ti < cfg.beam.theta_fwhm_deg.size(); ++ti) {
        LinkBudget lb = make_link_budget(cfg, ti);
        BeamSite central{{0.0, 0.0, cfg.layout.ap_height_m}, {0.0, 0.0, ue_h}, {0.0, 0.0, -1.0}};
        for (std::size_t di = 0; di < n_d; ++di) {
            double d = cfg.rate_cell.d_cell_list_m[di];
            double radius = std::sqrt(d * d / kPi);
            std::uint64_t base = (ti * n_d + di) * n;
            std::vector<double> rates(n);
            parallel_for(n, [&](std::size_t i) {
                RngStream rng = derive_stream(cfg.seed, stream_id::rate_mc, base + i);
                double r = radius * std::sqrt(rng.uniform());
                double p = pre_gain_power_at(central, lb.beam, lb.led, {r, 0.0, ue_h});
                rates[i] = lb.rate_from_gamma(lb.gamma_from_power(p));
            }, workers);
            double mc = pairwise_mean(rates);
            AvgRateResult closed = avg_rate_central(central_params(lb, d), lb.ofdm, lb.led.b_l);
            RateCellRow row{cfg.beam.theta_fwhm_deg[ti], d, mc, closed.rate, closed.low_snr};
            out.rows.push_back(row);
            out.table.add_row({row.theta_deg, row.d_cell_m, row.rate_mc_bps,
                               row.rate_closed_bps,
                               (row.rate_mc_bps - row.rate_closed_bps) / row.rate_closed_bps,
                               static_cast<long long>(row.low_snr ? 1 : 0)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// System average rate vs array size, with the central-cell upper bound

struct RateArrayRow {
    double theta_deg = 0.0;
    int n_side = 0;
    double rate_mc_bps = 0.0;
    double bound_bps = 0.0;
};

struct RateArrayResult {
    ResultTable table;
    std::vector<RateArrayRow> rows;
};

inline RateArrayResult run_avg_rate_vs_array(const ScenarioConfig& cfg, int workers = 0) {
    ResultTable table({"theta_fwhm_deg", "n_side", "rate_mc_bps", "bound_bps", "ratio"});
    add_standard_metadata(table, cfg, "rate-vs-array");
    RateArrayResult out{std::move(table), {}};

    const double ue_h = cfg.layout.ue_height_m;
    const std::size_t n = static_cast<std::size_t>(cfg.rate_array.n_samples);
    const std::size_t n_list = cfg.rate_array.n_side_list.size();

    for (std::size_t ti = 0; ti < cfg.beam.theta_fwhm_deg.size(); ++ti) {
        LinkBudget lb = make_link_budget(cfg, ti);
        double bound = avg_rate_central(central_params(lb, cfg.layout.d_cell_m),
                                        lb.ofdm, lb.led.b_l).rate;
        for (std::size_t ni = 0; ni < n_list; ++ni) {
            int n_side = cfg.rate_array.n_side_list[ni];
            BeamArrayLayout layout = build_grid_array(n_side, cfg.layout.d_cell_m,
                                                      cfg.layout.ap_height_m, ue_h,
                                                      cfg.layout.d_beam_m);
            Rect fp = layout.footprint();
            std::uint64_t base = (ti * n_list + ni) * n;
            std::vector<double> rates(n);
            parallel_for(n, [&](std::size_t i) {
                RngStream rng = derive_stream(cfg.seed, stream_id::array_mc, base + i);
                Vec3 pos{rng.uniform(fp.xmin, fp.xmax), rng.uniform(fp.ymin, fp.ymax), ue_h};
                auto sel = select_beam_near(layout, lb.beam, lb.led, pos);
                if (!sel) {
                    rates[i] = 0.0;
                    return;
                }
                double p = pre_gain_power_at(layout.beams[*sel], lb.beam, lb.led, pos);
                rates[i] = lb.rate_from_gamma(lb.gamma_from_power(p));
            }, workers);
            double mc = pairwise_mean(rates);
            RateArrayRow row{cfg.beam.theta_fwhm_deg[ti], n_side, mc, bound};
            out.rows.push_back(row);
            out.table.add_row({row.theta_deg, static_cast<long long>(n_side),
                               row.rate_mc_bps, row.bound_bps, mc / bound});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Multi-user SDMA totals with and without inter-cell interference

struct MultiuserRow {
    double theta_deg = 0.0;
    int n_ue = 0;
    double total_noici_bps = 0.0;
    double total_ici_bps = 0.0;
    double bound_bps = 0.0;
    double n_active_mean = 0.0;
};

struct MultiuserResult {
    ResultTable table;
    std::vector<MultiuserRow> rows;
};

inline MultiuserResult run_multiuser(const ScenarioConfig& cfg, int workers = 0) {
    ResultTable table({"theta_fwhm_deg", "n_ue", "total_noici_bps", "total_ici_bps",
                       "bound_bps", "n_active_mean"});
    add_standard_metadata(table, cfg, "multiuser");
    MultiuserResult out{std::move(table), {}};

    const double ue_h = cfg.layout.ue_height_m;
    BeamArrayLayout layout = cfg.make_layout();
    Rect fp = layout.footprint();
    const std::size_t trials = static_cast<std::size_t>(cfg.multiuser.trials);
    const std::size_t n_list = cfg.multiuser.n_ue_list.size();

    for (std::size_t ti = 0; ti < cfg.beam.theta_fwhm_deg.size(); ++ti) {
        LinkBudget lb = make_link_budget(cfg, ti);
        CentralBeamParams cb = central_params(lb, cfg.layout.d_cell_m);
        double zeta1 = avg_rate_central(cb, lb.ofdm, lb.led.b_l).rate;
        for (std::size_t nu = 0; nu < n_list; ++nu) {
            int n_ue = cfg.multiuser.n_ue_list[nu];
            std::uint64_t base = (ti * n_list + nu) * trials;
            std::vector<double> noici(trials), ici(trials), nact(trials);
            parallel_for(trials, [&](std::size_t t) {
                RngStream rng = derive_stream(cfg.seed, stream_id::multiuser, base + t);
                std::vector<std::vector<double>> powers(static_cast<std::size_t>(n_ue));
                std::vector<std::optional<std::size_t>> sel(static_cast<std::size_t>(n_ue));
                std::vector<int> count(layout.n_beams(), 0);
                for (int u = 0; u < n_ue; ++u) {
                    Vec3 pos{rng.uniform(fp.xmin, fp.xmax), rng.uniform(fp.ymin, fp.ymax), ue_h};
                    powers[u] = downlink_powers(layout, lb.beam, lb.led, pos, {0.0, 0.0, 1.0});
                    sel[u] = select_beam_sss(powers[u]);
                    if (sel[u]) count[*sel[u]]++;
                }
                std::vector<std::size_t> active;
                for (std::size_t b = 0; b < count.size(); ++b)
                    if (count[b] > 0) active.push_back(b);
                double sum_no = 0.0, sum_ici = 0.0;
                for (int u = 0; u < n_ue; ++u) {
                    if (!sel[u]) continue;
                    double share = 1.0 / count[*sel[u]];
                    double p_own = powers[u][*sel[u]];
                    sum_no += lb.rate_from_gamma(lb.gamma_from_power(p_own)) * share;
                    std::vector<double> p_int;
                    p_int.reserve(active.size());
                    for (std::size_t b : active)
                        if (b != *sel[u]) p_int.push_back(powers[u][b]);
                    sum_ici += lb.rate_from_gamma(lb.gamma_with_ici(p_own, p_int)) * share;
                }
                noici[t] = sum_no;
                ici[t] = sum_ici;
                nact[t] = static_cast<double>(active.size());
            }, workers);
            MultiuserRow row;
            row.theta_deg = cfg.beam.theta_fwhm_deg[ti];
            row.n_ue = n_ue;
            row.total_noici_bps = pairwise_mean(noici);
            row.total_ici_bps = pairwise_mean(ici);
            row.bound_bps = avg_active_beams(static_cast<int>(layout.n_beams()), n_ue) * zeta1;
            row.n_active_mean = pairwise_mean(nact);
            out.rows.push_back(row);
            out.table.add_row({row.theta_deg, static_cast<long long>(n_ue),
                               row.total_noici_bps, row.total_ici_bps, row.bound_bps,
                               row.n_active_mean});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mobility: throughput and outage vs speed for the activation schemes

struct MobilityRow {
    std::string scheme;
    double speed_mps = 0.0;
    double system_throughput_bps = 0.0;  // sum over users of time-mean throughput
    double outage = 0.0;                 // P(per-user throughput < R_T)
};

struct MobilityResult {
    ResultTable table;
    std::vector<MobilityRow> rows;
    double ccr_slope = 0.0;      // regression slope of ccr throughput vs speed
    double ccr_slope_se = 0.0;   // its standard error
    double ccr_rel_range = 0.0;  // (max-min)/mean of the ccr throughputs
};

namespace expdetail {

struct MobilityCaseOut {
    double system_thr = 0.0;
    double outage = 0.0;
};

inline MobilityCaseOut simulate_mobility_case(
    const ScenarioConfig& cfg, const LinkBudget& lb, const BeamArrayLayout& layout,
    const BenchmarkScheme& scheme, bool apply_signaling, const TimingParams& timing,
    std::size_t speed_idx, std::size_t task_idx) {
    const double dt = cfg.mobility.dt_s;
    const double speed = cfg.mobility.speeds_mps[speed_idx];
    const int n_ue = cfg.mobility.n_ue;
    const std::size_t n_steps =
        static_cast<std::size_t>(std::llround(cfg.mobility.duration_s / dt));
    const double ue_h = cfg.layout.ue_height_m;
    Rect fp = layout.footprint();
    MobilityParams mob{speed, fp, cfg.mobility.pause_s};

    std::size_t delay_steps = static_cast<std::size_t>(std::llround(scheme.delay / dt));
    std::size_t cap = delay_steps + 1;

    std::vector<UeState> ues(static_cast<std::size_t>(n_ue));
    std::vector<RngStream> path_rng, noise_rng;
    std::vector<std::vector<Vec3>> hist(static_cast<std::size_t>(n_ue));
    for (int u = 0; u < n_ue; ++u) {
        path_rng.push_back(derive_stream(cfg.seed, stream_id::mobility_path,
                                         speed_idx * 1024 + static_cast<std::size_t>(u)));
        noise_rng.push_back(derive_stream(cfg.seed, stream_id::mobility_noise,
                                          task_idx * 1024 + static_cast<std::size_t>(u)));
        Vec3 start{path_rng[u].uniform(fp.xmin, fp.xmax),
                   path_rng[u].uniform(fp.ymin, fp.ymax), ue_h};
        ues[u].position = start;
        hist[u].assign(cap, start);
    }

    std::vector<std::optional<std::size_t>> sel(static_cast<std::size_t>(n_ue));
    double sum_thr = 0.0;
    std::size_t outage_count = 0;
    for (std::size_t step = 0; step < n_steps; ++step) {
        for (int u = 0; u < n_ue; ++u) {
            ues[u] = random_waypoint_step(ues[u], mob, dt, path_rng[u]);
            Vec3 now = ues[u].position;
            Vec3 stale = (delay_steps == 0) ? now : hist[u][(step + 1) % cap];
            hist[u][step % cap] = now;
            sel[u] = benchmark_select(scheme, layout, lb.beam, lb.led, now, stale, noise_rng[u]);
        }
        for (int u = 0; u < n_ue; ++u) {
            double thr = 0.0;
            if (sel[u]) {
                int share = 0;
                for (int v = 0; v < n_ue; ++v)
                    if (sel[v] && *sel[v] == *sel[u]) share++;
                const Vec3& pos = ues[u].position;
                auto own_cell = layout.cell_index_of(pos.x, pos.y);
                if (own_cell && *own_cell == *sel[u]) {
                    double p = pre_gain_power_at(layout.beams[*sel[u]], lb.beam, lb.led, pos);
                    double rate = lb.rate_from_gamma(lb.gamma_from_power(p)) / share;
                    if (rate > 0.0 && apply_signaling)
                        rate = effective_throughput(timing, rate).throughput;
                    thr = rate;
                }
            }
            sum_thr += thr;
            if (thr < cfg.r_threshold_bps) outage_count++;
        }
    }
    MobilityCaseOut out;
    out.system_thr = sum_thr / static_cast<double>(n_steps);
    out.outage = static_cast<double>(outage_count) /
                 (static_cast<double>(n_steps) * static_cast<double>(n_ue));
    return out;
}

} // namespace expdetail

inline MobilityResult run_mobility_throughput(const ScenarioConfig& cfg, int workers = 0) {
    ResultTable table({"scheme", "speed_mps", "system_throughput_bps", "outage"});
    add_standard_metadata(table, cfg, "mobility");
    MobilityResult out{std::move(table), {}, 0.0, 0.0, 0.0};

    std::size_t ti = cfg.theta_index_of(cfg.mobility.theta_fwhm_deg);
    LinkBudget lb = make_link_budget(cfg, ti);
    BeamArrayLayout layout = cfg.make_layout();
    TimingParams timing = cfg.make_timing();

    struct Case {
        std::string name;
        BenchmarkScheme scheme;
        bool signaling;
    };
    std::vector<Case> cases = {
        {"ccr", {SchemeKind::ccr, 0.0, 0.0}, true},
        {"odtx", {SchemeKind::odtx, cfg.mobility.odtx_delay_ms * 1e-3, 0.0}, false},
        {"isvlp-coarse",
         {SchemeKind::isvlp, cfg.mobility.isvlp_delay_ms * 1e-3, cfg.mobility.isvlp_sigma_coarse_m},
         false},
        {"isvlp-fine",
         {SchemeKind::isvlp, cfg.mobility.isvlp_delay_ms * 1e-3, cfg.mobility.isvlp_sigma_fine_m},
         false},
    };
    const std::size_t n_speeds = cfg.mobility.speeds_mps.size();
    std::vector<expdetail::MobilityCaseOut> results(cases.size() * n_speeds);
    parallel_for(results.size(), [&](std::size_t task) {
        std::size_t ci = task / n_speeds;
        std::size_t vi = task % n_speeds;
        results[task] = expdetail::simulate_mobility_case(
            cfg, lb, layout, cases[ci].scheme, cases[ci].signaling, timing, vi, task);
    }, workers);

    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        for (std::size_t vi = 0; vi < n_speeds; ++vi) {
            const auto& r = results[ci * n_speeds + vi];
            MobilityRow row{cases[ci].name, cfg.mobility.speeds_mps[vi], r.system_thr, r.outage};
            out.rows.push_back(row);
            out.table.add_row({row.scheme, row.speed_mps, row.system_throughput_bps, row.outage});
        }
    }

    // Least-squares slope of the ccr throughputs vs speed, with its standard
    // error, as the flatness evidence.
    {
        std::vector<double> v = cfg.mobility.speeds_mps, y;
        for (std::size_t vi = 0; vi < n_speeds; ++vi)
            y.push_back(results[0 * n_speeds + vi].system_thr);
        double vm = 0.0, ym = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) { vm += v[i]; ym += y[i]; }
        vm /= v.size(); ym /= y.size();
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            sxx += (v[i] - vm) * (v[i] - vm);
            sxy += (v[i] - vm) * (y[i] - ym);
        }
        double slope = (sxx > 0.0) ? sxy / sxx : 0.0;
        double ss_res = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            double pred = ym + slope * (v[i] - vm);
            ss_res += (y[i] - pred) * (y[i] - pred);
        }
        out.ccr_slope = slope;
        out.ccr_slope_se = (v.size() > 2 && sxx > 0.0)
                               ? std::sqrt(ss_res / (v.size() - 2) / sxx)
                               : 0.0;
        double mn = *std::min_element(y.begin(), y.end());
        double mx = *std::max_element(y.begin(), y.end());
        out.ccr_rel_range = (ym > 0.0) ? (mx - mn) / ym : 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Eye-safety power ceilings

struct EyeSafetyRow {
    double theta_deg = 0.0;
    double p_max_mw = 0.0;
    double p_floor_mw = 0.0;
};

struct EyeSafetyResult {
    ResultTable table;
    std::vector<EyeSafetyRow> rows;
};

inline EyeSafetyResult run_eyesafety(const ScenarioConfig& cfg) {
    ResultTable table({"theta_fwhm_deg", "lambda_nm", "t_exp_s", "p_max_mw",
                       "p_default_mw", "mpe_w_m2", "aperture_mm"});
    add_standard_metadata(table, cfg, "eyesafety");
    EyeSafetyResult out{std::move(table), {}};
    double lam = cfg.beam.wavelength_nm * 1e-9;
    MpeResult mpe = mpe_lookup(lam, cfg.beam.t_exp_s);
    for (double theta_deg : cfg.beam.theta_fwhm_deg) {
        double theta = deg2rad(theta_deg);
        double p_max = max_transmit_power(lam, theta, cfg.beam.t_exp_s);
        double p_floor = default_transmit_power(lam, theta, cfg.beam.t_exp_s);
        out.rows.push_back({theta_deg, p_max * 1e3, p_floor * 1e3});
        out.table.add_row({theta_deg, cfg.beam.wavelength_nm, cfg.beam.t_exp_s,
                           p_max * 1e3, p_floor * 1e3, mpe.e_mpe, mpe.aperture * 1e3});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Beam-activation classifier training

struct AnnRow {
    std::string uplink;       // "odtx" or "single"
    std::string orientation;  // "fixed", "gaussian", "uniform"
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    double accuracy = 0.0;
    double final_loss = 0.0;
    MlpModel model;
};

struct AnnResult {
    ResultTable table;
    std::vector<AnnRow> rows;
};

inline AnnResult run_train_ann(const ScenarioConfig& cfg, int workers = 0) {
    ResultTable table({"uplink", "orientation", "n_train", "n_test", "accuracy", "final_loss"});
    add_standard_metadata(table, cfg, "train-ann");
    AnnResult out{std::move(table), {}};

    BeamArrayLayout layout = build_grid_array(cfg.ann.n_side, cfg.ann.d_cell_m,
                                              cfg.layout.ap_height_m, cfg.layout.ue_height_m,
                                              cfg.layout.d_beam_m);
    LinkBudget lb = make_link_budget(cfg, 0);
    OdtxParams od = cfg.make_odtx();
    std::vector<CeilingPd> pds =
        make_ceiling_pds({0.0, 0.0, cfg.layout.ap_height_m}, deg2rad(cfg.odtx.pd_tilt_deg));

    struct Combo {
        UplinkKind uplink;
        OrientationKind orient;
        std::string uplink_name;
        std::string orient_name;
    };
    std::vector<Combo> combos = {
        {UplinkKind::odtx, OrientationKind::fixed_up, "odtx", "fixed"},
        {UplinkKind::odtx, OrientationKind::gaussian_elevation, "odtx", "gaussian"},
        {UplinkKind::odtx, OrientationKind::uniform_elevation, "odtx", "uniform"},
    };
    if (cfg.ann.include_single_tx) {
        combos.push_back({UplinkKind::single_led, OrientationKind::fixed_up, "single", "fixed"});
        combos.push_back(
            {UplinkKind::single_led, OrientationKind::gaussian_elevation, "single", "gaussian"});
        combos.push_back(
            {UplinkKind::single_led, OrientationKind::uniform_elevation, "single", "uniform"});
    }

    std::vector<AnnRow> rows(combos.size());
    parallel_for(combos.size(), [&](std::size_t c) {
        const Combo& combo = combos[c];
        OrientationModel orient = cfg.make_orientation(combo.orient);
        RssDataset ds = generate_training_set(layout, lb.beam, lb.led, od, pds, orient,
                                              static_cast<std::size_t>(cfg.ann.dataset_size),
                                              cfg.seed, cfg.ann.train_fraction, combo.uplink);
        TrainOptions opt;
        opt.epochs = cfg.ann.epochs;
        opt.batch = cfg.ann.batch;
        opt.learning_rate = cfg.ann.learning_rate;
        opt.seed = mix64(cfg.seed + 0xA11C0000ull + c);
        TrainResult tr = train_classifier(ds.features, ds.labels,
                                          static_cast<int>(layout.n_beams()),
                                          cfg.ann.n_hidden, opt);
        AnnRow row;
        row.uplink = combo.uplink_name;
        row.orientation = combo.orient_name;
        row.n_train = ds.n_train;
        row.n_test = ds.features.size() - ds.n_train;
        row.accuracy = classification_accuracy(tr.model, ds.features, ds.labels, ds.n_train,
                                               ds.features.size());
        row.final_loss = tr.epoch_loss.back();
        row.model = std::move(tr.model);
        rows[c] = std::move(row);
    }, workers);

    for (auto& row : rows) {
        out.table.add_row({row.uplink, row.orientation,
                           static_cast<long long>(row.n_train),
                           static_cast<long long>(row.n_test), row.accuracy, row.final_loss});
        out.rows.push_back(std::move(row));
    }
    return out;
}

} // namespace owcsim
