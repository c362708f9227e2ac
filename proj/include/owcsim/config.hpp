#pragma once

// Scenario configuration: strict JSON (unknown keys rejected with a field
// path), dotted --set overrides, and conversion to the typed parameter
// structs used by the library modules.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "owcsim/activation.hpp"
#include "owcsim/channel.hpp"
#include "owcsim/eyesafety.hpp"
#include "owcsim/geometry.hpp"
#include "owcsim/link.hpp"

namespace owcsim {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace cfgdetail {

inline void require_object(const json& j, const std::string& path) {
    if (!j.is_object())
        throw ConfigError(path + ": expected an object");
}

inline void reject_unknown(const json& j, const std::string& path,
                           std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* a : allowed)
            if (it.key() == a) { known = true; break; }
        if (!known)
            throw ConfigError(path + "." + it.key() + ": unknown key");
    }
}

inline void read(const json& j, const std::string& path, const char* key, double& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number())
        throw ConfigError(path + "." + key + ": expected a number");
    out = v.get<double>();
}

inline void read(const json& j, const std::string& path, const char* key, int& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        throw ConfigError(path + "." + key + ": expected an integer");
    out = v.get<int>();
}

inline void read(const json& j, const std::string& path, const char* key, long long& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        throw ConfigError(path + "." + key + ": expected an integer");
    out = v.get<long long>();
}

inline void read(const json& j, const std::string& path, const char* key, std::uint64_t& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)))
        throw ConfigError(path + "." + key + ": expected a nonnegative integer");
    out = v.get<std::uint64_t>();
}

inline void read(const json& j, const std::string& path, const char* key, bool& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_boolean())
        throw ConfigError(path + "." + key + ": expected a boolean");
    out = v.get<bool>();
}

inline void read(const json& j, const std::string& path, const char* key, std::string& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_string())
        throw ConfigError(path + "." + key + ": expected a string");
    out = v.get<std::string>();
}

inline void read(const json& j, const std::string& path, const char* key,
                 std::vector<double>& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array())
        throw ConfigError(path + "." + key + ": expected an array of numbers");
    std::vector<double> tmp;
    for (const json& e : v) {
        if (!e.is_number())
            throw ConfigError(path + "." + key + ": expected an array of numbers");
        tmp.push_back(e.get<double>());
    }
    out = std::move(tmp);
}

inline void read(const json& j, const std::string& path, const char* key,
                 std::vector<int>& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array())
        throw ConfigError(path + "." + key + ": expected an array of integers");
    std::vector<int> tmp;
    for (const json& e : v) {
        if (!e.is_number_integer())
            throw ConfigError(path + "." + key + ": expected an array of integers");
        tmp.push_back(e.get<int>());
    }
    out = std::move(tmp);
}

inline void check_positive(double v, const std::string& path) {
    if (!(v > 0.0))
        throw ConfigError(path + ": must be positive");
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace cfgdetail

enum class NoiseMode { reference, full, calibrated };

inline std::string noise_mode_name(NoiseMode m) {
    switch (m) {
        case NoiseMode::reference: return "reference";
        case NoiseMode::full: return "full";
        case NoiseMode::calibrated: return "calibrated";
    }
    return "reference";
}

struct ScenarioConfig {
    std::uint64_t seed = 1;
    double r_threshold_bps = 2.5e9;

    struct Layout {
        int n_side = 10;
        double d_cell_m = 0.10;
        double ap_height_m = 3.0;
        double ue_height_m = 1.0;
        double d_beam_m = 0.02;
    } layout;

    struct Beam {
        double wavelength_nm = 1550.0;
        std::vector<double> theta_fwhm_deg = {2.0, 4.0, 6.0};
        std::vector<double> p_tx_mw;   // empty: eye-safe default per theta
        double t_exp_s = 100.0;
    } beam;

    struct Apd {
        double b_l_hz = 1.5e9;
        double aperture_mm = 5.0;
        double psi_c_deg = 60.0;
        double g_apd = 30.0;
        double r_apd = 0.9;
        double rin_db_hz = -155.0;
        double r_f_ohm = 50.0;
        double temperature_k = 300.0;
        double k_a = 0.7;
        double p_n_uw = 1.0;
    } apd;

    struct Ofdm {
        int m_sub = 512;
        double kappa = 3.0;
    } ofdm;

    struct Noise {
        std::string mode = "reference";
        std::vector<double> calibration_peaks_db = {27.7, 23.7, 22.7};
    } noise;

    struct Timing {
        double t_ts_us = 0.3;
        double t_delta_ns = 3.0;
        double t_rs_us = 0.3;
        double t_sifs_us = 2.0;
        long long l_data_bytes = 65536;
    } timing;

    struct Orientation {
        double mean_elev_deg = 41.0;
        double std_elev_deg = 7.7;
        double max_elev_deg = 45.0;
    } orientation;

    struct Odtx {
        double p_tx_mw = 10.0;
        double a_od_mm2 = 100.0;
        double n_ref = 1.5;
        double psi_fov_deg = 60.0;
        double lambertian_order = 2.0;
        double pd_tilt_deg = 30.0;
    } odtx;

    struct Ccr {
        double depth_mm = 5.0;
        double n_re = 1.5;
        double l_ccr_mm = 5.0;
        double aperture_mm = 5.0;
        double acceptance_deg = 45.0;
        double reflectivity = 1.0;
    } ccr;

    struct RxAp {
        double capture_mm = 5.0;
        double offset_mm = 5.0;
        double divergence_mrad = 2.0;
        double threshold_nw = 1.0;
    } rxap;

    struct SnrMap {
        int grid_n = 41;
        bool include_array = true;
    } snr_map;

    struct Pdf {
        long long n_samples = 1000000;
        int n_bins = 60;
        double theta_fwhm_deg = 4.0;
    } pdf;

    struct RateCell {
        long long n_samples = 200000;
        std::vector<double> d_cell_list_m = {0.02, 0.04, 0.06, 0.08, 0.10,
                                             0.14, 0.18, 0.22, 0.26, 0.30};
    } rate_cell;

    struct RateArray {
        long long n_samples = 120000;
        std::vector<int> n_side_list = {1, 2, 3, 5, 10};
    } rate_array;

    struct Multiuser {
        std::vector<int> n_ue_list = {1, 2, 4, 5, 6, 10, 20, 50};
        int trials = 400;
    } multiuser;

    struct Mobility {
        std::vector<double> speeds_mps = {0.1, 0.5, 1.0, 1.5, 2.0};
        double duration_s = 240.0;
        double dt_s = 0.001;
        int n_ue = 5;
        double pause_s = 0.0;
        double theta_fwhm_deg = 4.0;
        double odtx_delay_ms = 30.0;
        double isvlp_delay_ms = 44.3;
        double isvlp_sigma_coarse_m = 0.0397;
        double isvlp_sigma_fine_m = 0.005;
    } mobility;

    struct Ann {
        int n_side = 3;
        double d_cell_m = 0.10;
        int n_hidden = 5;
        int epochs = 60;
        int batch = 128;
        double learning_rate = 0.005;
        long long dataset_size = 20000;
        double train_fraction = 0.8;
        bool include_single_tx = true;
    } ann;

    static ScenarioConfig from_json(const json& j);
    json to_json() const;
    void validate() const;

    // Typed views consumed by the simulation modules.

    BeamArrayLayout make_layout() const {
        return build_grid_array(layout.n_side, layout.d_cell_m,
                                layout.ap_height_m, layout.ue_height_m,
                                layout.d_beam_m);
    }

    double transmit_power_w(size_t theta_index) const {
        double theta = deg2rad(beam.theta_fwhm_deg.at(theta_index));
        if (!beam.p_tx_mw.empty())
            return beam.p_tx_mw.at(theta_index) * 1e-3;
        return default_transmit_power(beam.wavelength_nm * 1e-9, theta, beam.t_exp_s);
    }

    BeamParams make_beam(size_t theta_index) const {
        return BeamParams::from_fwhm(beam.wavelength_nm * 1e-9,
                                     deg2rad(beam.theta_fwhm_deg.at(theta_index)),
                                     transmit_power_w(theta_index));
    }

    ApdNoiseLedger make_ledger() const {
        ApdNoiseLedger led;
        led.b_l = apd.b_l_hz;
        double r_ap = 0.5 * apd.aperture_mm * 1e-3;
        led.a_eff = kPi * r_ap * r_ap;
        led.psi_c = deg2rad(apd.psi_c_deg);
        led.g_apd = apd.g_apd;
        led.r_apd = apd.r_apd;
        led.rin = std::pow(10.0, apd.rin_db_hz / 10.0);
        led.r_f = apd.r_f_ohm;
        led.temperature = apd.temperature_k;
        led.k_a = apd.k_a;
        led.p_n = apd.p_n_uw * 1e-6;
        return led;
    }

    OfdmParams make_ofdm() const {
        OfdmParams o;
        o.m_sub = ofdm.m_sub;
        o.kappa = ofdm.kappa;
        return o;
    }

    NoiseMode noise_mode() const {
        if (noise.mode == "reference") return NoiseMode::reference;
        if (noise.mode == "full") return NoiseMode::full;
        if (noise.mode == "calibrated") return NoiseMode::calibrated;
        throw ConfigError("noise.mode: must be one of reference/full/calibrated");
    }

    TimingParams make_timing() const {
        TimingParams t;
        t.t_ts = timing.t_ts_us * 1e-6;
        t.t_delta = timing.t_delta_ns * 1e-9;
        t.t_rs = timing.t_rs_us * 1e-6;
        t.t_sifs = timing.t_sifs_us * 1e-6;
        t.l_data = static_cast<double>(timing.l_data_bytes) * 8.0;
        return t;
    }

    OrientationModel make_orientation(OrientationKind kind) const {
        OrientationModel m;
        m.kind = kind;
        m.mean_elev = deg2rad(orientation.mean_elev_deg);
        m.std_elev = deg2rad(orientation.std_elev_deg);
        m.max_elev = deg2rad(orientation.max_elev_deg);
        return m;
    }

    OdtxParams make_odtx() const {
        OdtxParams o;
        o.p_tx_od = odtx.p_tx_mw * 1e-3;
        o.a_od = odtx.a_od_mm2 * 1e-6;
        o.n_ref = odtx.n_ref;
        o.psi_fov = deg2rad(odtx.psi_fov_deg);
        o.lambertian_order = odtx.lambertian_order;
        return o;
    }

    CcrParams make_ccr() const {
        CcrParams c;
        c.depth = ccr.depth_mm * 1e-3;
        c.n_re = ccr.n_re;
        c.l_ccr = ccr.l_ccr_mm * 1e-3;
        c.aperture_radius = 0.5 * ccr.aperture_mm * 1e-3;
        c.acceptance = deg2rad(ccr.acceptance_deg);
        c.reflectivity = ccr.reflectivity;
        return c;
    }

    RxApParams make_rxap() const {
        RxApParams r;
        r.capture_diameter = rxap.capture_mm * 1e-3;
        r.offset = rxap.offset_mm * 1e-3;
        r.return_divergence = rxap.divergence_mrad * 1e-3;
        r.detection_threshold = rxap.threshold_nw * 1e-9;
        return r;
    }

    size_t theta_index_of(double theta_deg) const {
        for (size_t i = 0; i < beam.theta_fwhm_deg.size(); ++i)
            if (std::abs(beam.theta_fwhm_deg[i] - theta_deg) < 1e-9) return i;
        throw ConfigError("beam.theta_fwhm_deg: list does not contain " +
                          std::to_string(theta_deg));
    }

    std::uint64_t config_hash() const {
        return cfgdetail::fnv1a64(to_json().dump());
    }
};

inline ScenarioConfig ScenarioConfig::from_json(const json& j) {
    using namespace cfgdetail;
    ScenarioConfig c;
    require_object(j, "config");
    reject_unknown(j, "config",
                   {"seed", "r_threshold_bps", "layout", "beam", "apd", "ofdm",
                    "noise", "timing", "orientation", "odtx", "ccr", "rxap",
                    "snr_map", "pdf", "rate_cell", "rate_array", "multiuser",
                    "mobility", "ann"});
    read(j, "config", "seed", c.seed);
    read(j, "config", "r_threshold_bps", c.r_threshold_bps);

    if (j.contains("layout")) {
        const json& s = j.at("layout");
        require_object(s, "layout");
        reject_unknown(s, "layout",
                       {"n_side", "d_cell_m", "ap_height_m", "ue_height_m", "d_beam_m"});
        read(s, "layout", "n_side", c.layout.n_side);
        read(s, "layout", "d_cell_m", c.layout.d_cell_m);
        read(s, "layout", "ap_height_m", c.layout.ap_height_m);
        read(s, "layout", "ue_height_m", c.layout.ue_height_m);
        read(s, "layout", "d_beam_m", c.layout.d_beam_m);
    }
    if (j.contains("beam")) {
        const json& s = j.at("beam");
        require_object(s, "beam");
        reject_unknown(s, "beam",
                       {"wavelength_nm", "theta_fwhm_deg", "p_tx_mw", "t_exp_s"});
        read(s, "beam", "wavelength_nm", c.beam.wavelength_nm);
        read(s, "beam", "theta_fwhm_deg", c.beam.theta_fwhm_deg);
        read(s, "beam", "p_tx_mw", c.beam.p_tx_mw);
        read(s, "beam", "t_exp_s", c.beam.t_exp_s);
    }
    if (j.contains("apd")) {
        const json& s = j.at("apd");
        require_object(s, "apd");
        reject_unknown(s, "apd",
                       {"b_l_hz", "aperture_mm", "psi_c_deg", "g_apd", "r_apd",
                        "rin_db_hz", "r_f_ohm", "temperature_k", "k_a", "p_n_uw"});
        read(s, "apd", "b_l_hz", c.apd.b_l_hz);
        read(s, "apd", "aperture_mm", c.apd.aperture_mm);
        read(s, "apd", "psi_c_deg", c.apd.psi_c_deg);
        read(s, "apd", "g_apd", c.apd.g_apd);
        read(s, "apd", "r_apd", c.apd.r_apd);
        read(s, "apd", "rin_db_hz", c.apd.rin_db_hz);
        read(s, "apd", "r_f_ohm", c.apd.r_f_ohm);
        read(s, "apd", "temperature_k", c.apd.temperature_k);
        read(s, "apd", "k_a", c.apd.k_a);
        read(s, "apd", "p_n_uw", c.apd.p_n_uw);
    }
    if (j.contains("ofdm")) {
        const json& s = j.at("ofdm");
        require_object(s, "ofdm");
        reject_unknown(s, "ofdm", {"m_sub", "kappa"});
        read(s, "ofdm", "m_sub", c.ofdm.m_sub);
        read(s, "ofdm", "kappa", c.ofdm.kappa);
    }
    if (j.contains("noise")) {
        const json& s = j.at("noise");
        require_object(s, "noise");
        reject_unknown(s, "noise", {"mode", "calibration_peaks_db"});
        read(s, "noise", "mode", c.noise.mode);
        read(s, "noise", "calibration_peaks_db", c.noise.calibration_peaks_db);
    }
    if (j.contains("timing")) {
        const json& s = j.at("timing");
        require_object(s, "timing");
        reject_unknown(s, "timing",
                       {"t_ts_us", "t_delta_ns", "t_rs_us", "t_sifs_us", "l_data_bytes"});
        read(s, "timing", "t_ts_us", c.timing.t_ts_us);
        read(s, "timing", "t_delta_ns", c.timing.t_delta_ns);
        read(s, "timing", "t_rs_us", c.timing.t_rs_us);
        read(s, "timing", "t_sifs_us", c.timing.t_sifs_us);
        read(s, "timing", "l_data_bytes", c.timing.l_data_bytes);
    }
    if (j.contains("orientation")) {
        const json& s = j.at("orientation");
        require_object(s, "orientation");
        reject_unknown(s, "orientation",
                       {"mean_elev_deg", "std_elev_deg", "max_elev_deg"});
        read(s, "orientation", "mean_elev_deg", c.orientation.mean_elev_deg);
        read(s, "orientation", "std_elev_deg", c.orientation.std_elev_deg);
        read(s, "orientation", "max_elev_deg", c.orientation.max_elev_deg);
    }
    if (j.contains("odtx")) {
        const json& s = j.at("odtx");
        require_object(s, "odtx");
        reject_unknown(s, "odtx",
                       {"p_tx_mw", "a_od_mm2", "n_ref", "psi_fov_deg",
                        "lambertian_order", "pd_tilt_deg"});
        read(s, "odtx", "p_tx_mw", c.odtx.p_tx_mw);
        read(s, "odtx", "a_od_mm2", c.odtx.a_od_mm2);
        read(s, "odtx", "n_ref", c.odtx.n_ref);
        read(s, "odtx", "psi_fov_deg", c.odtx.psi_fov_deg);
        read(s, "odtx", "lambertian_order", c.odtx.lambertian_order);
        read(s, "odtx", "pd_tilt_deg", c.odtx.pd_tilt_deg);
    }
    if (j.contains("ccr")) {
        const json& s = j.at("ccr");
        require_object(s, "ccr");
        reject_unknown(s, "ccr",
                       {"depth_mm", "n_re", "l_ccr_mm", "aperture_mm",
                        "acceptance_deg", "reflectivity"});
        read(s, "ccr", "depth_mm", c.ccr.depth_mm);
        read(s, "ccr", "n_re", c.ccr.n_re);
        read(s, "ccr", "l_ccr_mm", c.ccr.l_ccr_mm);
        read(s, "ccr", "aperture_mm", c.ccr.aperture_mm);
        read(s, "ccr", "acceptance_deg", c.ccr.acceptance_deg);
        read(s, "ccr", "reflectivity", c.ccr.reflectivity);
    }
    if (j.contains("rxap")) {
        const json& s = j.at("rxap");
        require_object(s, "rxap");
        reject_unknown(s, "rxap",
                       {"capture_mm", "offset_mm", "divergence_mrad", "threshold_nw"});
        read(s, "rxap", "capture_mm", c.rxap.capture_mm);
        read(s, "rxap", "offset_mm", c.rxap.offset_mm);
        read(s, "rxap", "divergence_mrad", c.rxap.divergence_mrad);
        read(s, "rxap", "threshold_nw", c.rxap.threshold_nw);
    }
    if (j.contains("snr_map")) {
        const json& s = j.at("snr_map");
        require_object(s, "snr_map");
        reject_unknown(s, "snr_map", {"grid_n", "include_array"});
        read(s, "snr_map", "grid_n", c.snr_map.grid_n);
        read(s, "snr_map", "include_array", c.snr_map.include_array);
    }
    if (j.contains("pdf")) {
        const json& s = j.at("pdf");
        require_object(s, "pdf");
        reject_unknown(s, "pdf", {"n_samples", "n_bins", "theta_fwhm_deg"});
        read(s, "pdf", "n_samples", c.pdf.n_samples);
        read(s, "pdf", "n_bins", c.pdf.n_bins);
        read(s, "pdf", "theta_fwhm_deg", c.pdf.theta_fwhm_deg);
    }
    if (j.contains("rate_cell")) {
        const json& s = j.at("rate_cell");
        require_object(s, "rate_cell");
        reject_unknown(s, "rate_cell", {"n_samples", "d_cell_list_m"});
        read(s, "rate_cell", "n_samples", c.rate_cell.n_samples);
        read(s, "rate_cell", "d_cell_list_m", c.rate_cell.d_cell_list_m);
    }
    if (j.contains("rate_array")) {
        const json& s = j.at("rate_array");
        require_object(s, "rate_array");
        reject_unknown(s, "rate_array", {"n_samples", "n_side_list"});
        read(s, "rate_array", "n_samples", c.rate_array.n_samples);
        read(s, "rate_array", "n_side_list", c.rate_array.n_side_list);
    }
    if (j.contains("multiuser")) {
        const json& s = j.at("multiuser");
        require_object(s, "multiuser");
        reject_unknown(s, "multiuser", {"n_ue_list", "trials"});
        read(s, "multiuser", "n_ue_list", c.multiuser.n_ue_list);
        read(s, "multiuser", "trials", c.multiuser.trials);
    }
    if (j.contains("mobility")) {
        const json& s = j.at("mobility");
        require_object(s, "mobility");
        reject_unknown(s, "mobility",
                       {"speeds_mps", "duration_s", "dt_s", "n_ue", "pause_s",
                        "theta_fwhm_deg", "odtx_delay_ms", "isvlp_delay_ms",
                        "isvlp_sigma_coarse_m", "isvlp_sigma_fine_m"});
        read(s, "mobility", "speeds_mps", c.mobility.speeds_mps);
        read(s, "mobility", "duration_s", c.mobility.duration_s);
        read(s, "mobility", "dt_s", c.mobility.dt_s);
        read(s, "mobility", "n_ue", c.mobility.n_ue);
        read(s, "mobility", "pause_s", c.mobility.pause_s);
        read(s, "mobility", "theta_fwhm_deg", c.mobility.theta_fwhm_deg);
        read(s, "mobility", "odtx_delay_ms", c.mobility.odtx_delay_ms);
        read(s, "mobility", "isvlp_delay_ms", c.mobility.isvlp_delay_ms);
        read(s, "mobility", "isvlp_sigma_coarse_m", c.mobility.isvlp_sigma_coarse_m);
        read(s, "mobility", "isvlp_sigma_fine_m", c.mobility.isvlp_sigma_fine_m);
    }
    if (j.contains("ann")) {
        const json& s = j.at("ann");
        require_object(s, "ann");
        reject_unknown(s, "ann",
                       {"n_side", "d_cell_m", "n_hidden", "epochs", "batch",
                        "learning_rate", "dataset_size", "train_fraction",
                        "include_single_tx"});
        read(s, "ann", "n_side", c.ann.n_side);
        read(s, "ann", "d_cell_m", c.ann.d_cell_m);
        read(s, "ann", "n_hidden", c.ann.n_hidden);
        read(s, "ann", "epochs", c.ann.epochs);
        read(s, "ann", "batch", c.ann.batch);
        read(s, "ann", "learning_rate", c.ann.learning_rate);
        read(s, "ann", "dataset_size", c.ann.dataset_size);
        read(s, "ann", "train_fraction", c.ann.train_fraction);
        read(s, "ann", "include_single_tx", c.ann.include_single_tx);
    }
    c.validate();
    return c;
}

inline json ScenarioConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["r_threshold_bps"] = r_threshold_bps;
    j["layout"] = {{"n_side", layout.n_side},
                   {"d_cell_m", layout.d_cell_m},
                   {"ap_height_m", layout.ap_height_m},
                   {"ue_height_m", layout.ue_height_m},
                   {"d_beam_m", layout.d_beam_m}};
    j["beam"] = {{"wavelength_nm", beam.wavelength_nm},
                 {"theta_fwhm_deg", beam.theta_fwhm_deg},
                 {"p_tx_mw", beam.p_tx_mw},
                 {"t_exp_s", beam.t_exp_s}};
    j["apd"] = {{"b_l_hz", apd.b_l_hz},
                {"aperture_mm", apd.aperture_mm},
                {"psi_c_deg", apd.psi_c_deg},
                {"g_apd", apd.g_apd},
                {"r_apd", apd.r_apd},
                {"rin_db_hz", apd.rin_db_hz},
                {"r_f_ohm", apd.r_f_ohm},
                {"temperature_k", apd.temperature_k},
                {"k_a", apd.k_a},
                {"p_n_uw", apd.p_n_uw}};
    j["ofdm"] = {{"m_sub", ofdm.m_sub}, {"kappa", ofdm.kappa}};
    j["noise"] = {{"mode", noise.mode},
                  {"calibration_peaks_db", noise.calibration_peaks_db}};
    j["timing"] = {{"t_ts_us", timing.t_ts_us},
                   {"t_delta_ns", timing.t_delta_ns},
                   {"t_rs_us", timing.t_rs_us},
                   {"t_sifs_us", timing.t_sifs_us},
                   {"l_data_bytes", timing.l_data_bytes}};
    j["orientation"] = {{"mean_elev_deg", orientation.mean_elev_deg},
                        {"std_elev_deg", orientation.std_elev_deg},
                        {"max_elev_deg", orientation.max_elev_deg}};
    j["odtx"] = {{"p_tx_mw", odtx.p_tx_mw},
                 {"a_od_mm2", odtx.a_od_mm2},
                 {"n_ref", odtx.n_ref},
                 {"psi_fov_deg", odtx.psi_fov_deg},
                 {"lambertian_order", odtx.lambertian_order},
                 {"pd_tilt_deg", odtx.pd_tilt_deg}};
    j["ccr"] = {{"depth_mm", ccr.depth_mm},
                {"n_re", ccr.n_re},
                {"l_ccr_mm", ccr.l_ccr_mm},
                {"aperture_mm", ccr.aperture_mm},
                {"acceptance_deg", ccr.acceptance_deg},
                {"reflectivity", ccr.reflectivity}};
    j["rxap"] = {{"capture_mm", rxap.capture_mm},
                 {"offset_mm", rxap.offset_mm},
                 {"divergence_mrad", rxap.divergence_mrad},
                 {"threshold_nw", rxap.threshold_nw}};
    j["snr_map"] = {{"grid_n", snr_map.grid_n},
                    {"include_array", snr_map.include_array}};
    j["pdf"] = {{"n_samples", pdf.n_samples},
                {"n_bins", pdf.n_bins},
                {"theta_fwhm_deg", pdf.theta_fwhm_deg}};
    j["rate_cell"] = {{"n_samples", rate_cell.n_samples},
                      {"d_cell_list_m", rate_cell.d_cell_list_m}};
    j["rate_array"] = {{"n_samples", rate_array.n_samples},
                       {"n_side_list", rate_array.n_side_list}};
    j["multiuser"] = {{"n_ue_list", multiuser.n_ue_list},
                      {"trials", multiuser.trials}};
    j["mobility"] = {{"speeds_mps", mobility.speeds_mps},
                     {"duration_s", mobility.duration_s},
                     {"dt_s", mobility.dt_s},
                     {"n_ue", mobility.n_ue},
                     {"pause_s", mobility.pause_s},
                     {"theta_fwhm_deg", mobility.theta_fwhm_deg},
                     {"odtx_delay_ms", mobility.odtx_delay_ms},
                     {"isvlp_delay_ms", mobility.isvlp_delay_ms},
                     {"isvlp_sigma_coarse_m", mobility.isvlp_sigma_coarse_m},
                     {"isvlp_sigma_fine_m", mobility.isvlp_sigma_fine_m}};
    j["ann"] = {{"n_side", ann.n_side},
                {"d_cell_m", ann.d_cell_m},
                {"n_hidden", ann.n_hidden},
                {"epochs", ann.epochs},
                {"batch", ann.batch},
                {"learning_rate", ann.learning_rate},
                {"dataset_size", ann.dataset_size},
                {"train_fraction", ann.train_fraction},
                {"include_single_tx", ann.include_single_tx}};
    return j;
}

inline void ScenarioConfig::validate() const {
    using cfgdetail::check_positive;
    if (layout.n_side < 1) throw ConfigError("layout.n_side: must be >= 1");
    check_positive(layout.d_cell_m, "layout.d_cell_m");
    check_positive(layout.d_beam_m, "layout.d_beam_m");
    if (!(layout.ap_height_m > layout.ue_height_m))
        throw ConfigError("layout.ap_height_m: must exceed layout.ue_height_m");
    check_positive(beam.wavelength_nm, "beam.wavelength_nm");
    if (beam.theta_fwhm_deg.empty())
        throw ConfigError("beam.theta_fwhm_deg: must not be empty");
    for (double t : beam.theta_fwhm_deg)
        if (!(t > 0.0 && t < 90.0))
            throw ConfigError("beam.theta_fwhm_deg: entries must lie in (0, 90)");
    if (!beam.p_tx_mw.empty() && beam.p_tx_mw.size() != beam.theta_fwhm_deg.size())
        throw ConfigError("beam.p_tx_mw: length must match beam.theta_fwhm_deg");
    for (double p : beam.p_tx_mw) check_positive(p, "beam.p_tx_mw");
    check_positive(beam.t_exp_s, "beam.t_exp_s");
    check_positive(apd.b_l_hz, "apd.b_l_hz");
    check_positive(apd.aperture_mm, "apd.aperture_mm");
    if (!(apd.psi_c_deg > 0.0 && apd.psi_c_deg <= 90.0))
        throw ConfigError("apd.psi_c_deg: must lie in (0, 90]");
    if (!(apd.g_apd >= 1.0)) throw ConfigError("apd.g_apd: must be >= 1");
    check_positive(apd.r_apd, "apd.r_apd");
    check_positive(apd.r_f_ohm, "apd.r_f_ohm");
    check_positive(apd.temperature_k, "apd.temperature_k");
    if (!(apd.k_a >= 0.0 && apd.k_a <= 1.0))
        throw ConfigError("apd.k_a: must lie in [0, 1]");
    if (apd.p_n_uw < 0.0) throw ConfigError("apd.p_n_uw: must be nonnegative");
    if (ofdm.m_sub < 4 || ofdm.m_sub % 2 != 0)
        throw ConfigError("ofdm.m_sub: must be an even integer >= 4");
    check_positive(ofdm.kappa, "ofdm.kappa");
    if (noise.mode != "reference" && noise.mode != "full" && noise.mode != "calibrated")
        throw ConfigError("noise.mode: must be one of reference/full/calibrated");
    if (noise.calibration_peaks_db.size() != beam.theta_fwhm_deg.size() &&
        noise.mode == "calibrated")
        throw ConfigError("noise.calibration_peaks_db: length must match beam.theta_fwhm_deg");
    if (timing.t_ts_us < 0 || timing.t_delta_ns < 0 || timing.t_rs_us < 0 ||
        timing.t_sifs_us < 0)
        throw ConfigError("timing: intervals must be nonnegative");
    check_positive(static_cast<double>(timing.l_data_bytes), "timing.l_data_bytes");
    check_positive(orientation.std_elev_deg, "orientation.std_elev_deg");
    if (!(orientation.max_elev_deg > 0.0 && orientation.max_elev_deg <= 90.0))
        throw ConfigError("orientation.max_elev_deg: must lie in (0, 90]");
    check_positive(odtx.p_tx_mw, "odtx.p_tx_mw");
    check_positive(odtx.a_od_mm2, "odtx.a_od_mm2");
    if (!(odtx.n_ref >= 1.0)) throw ConfigError("odtx.n_ref: must be >= 1");
    if (!(odtx.psi_fov_deg > 0.0 && odtx.psi_fov_deg <= 90.0))
        throw ConfigError("odtx.psi_fov_deg: must lie in (0, 90]");
    check_positive(odtx.lambertian_order, "odtx.lambertian_order");
    check_positive(ccr.depth_mm, "ccr.depth_mm");
    if (!(ccr.n_re > 1.0)) throw ConfigError("ccr.n_re: must exceed 1");
    check_positive(ccr.l_ccr_mm, "ccr.l_ccr_mm");
    check_positive(ccr.aperture_mm, "ccr.aperture_mm");
    if (!(ccr.acceptance_deg > 0.0 && ccr.acceptance_deg <= 90.0))
        throw ConfigError("ccr.acceptance_deg: must lie in (0, 90]");
    if (!(ccr.reflectivity > 0.0 && ccr.reflectivity <= 1.0))
        throw ConfigError("ccr.reflectivity: must lie in (0, 1]");
    check_positive(rxap.capture_mm, "rxap.capture_mm");
    if (rxap.offset_mm < 0) throw ConfigError("rxap.offset_mm: must be nonnegative");
    if (rxap.divergence_mrad < 0)
        throw ConfigError("rxap.divergence_mrad: must be nonnegative");
    if (rxap.threshold_nw < 0)
        throw ConfigError("rxap.threshold_nw: must be nonnegative");
    if (snr_map.grid_n < 3) throw ConfigError("snr_map.grid_n: must be >= 3");
    check_positive(static_cast<double>(pdf.n_samples), "pdf.n_samples");
    if (pdf.n_bins < 4) throw ConfigError("pdf.n_bins: must be >= 4");
    check_positive(pdf.theta_fwhm_deg, "pdf.theta_fwhm_deg");
    check_positive(static_cast<double>(rate_cell.n_samples), "rate_cell.n_samples");
    if (rate_cell.d_cell_list_m.empty())
        throw ConfigError("rate_cell.d_cell_list_m: must not be empty");
    for (double d : rate_cell.d_cell_list_m) check_positive(d, "rate_cell.d_cell_list_m");
    check_positive(static_cast<double>(rate_array.n_samples), "rate_array.n_samples");
    if (rate_array.n_side_list.empty())
        throw ConfigError("rate_array.n_side_list: must not be empty");
    for (int n : rate_array.n_side_list)
        if (n < 1) throw ConfigError("rate_array.n_side_list: entries must be >= 1");
    if (multiuser.n_ue_list.empty())
        throw ConfigError("multiuser.n_ue_list: must not be empty");
    for (int n : multiuser.n_ue_list)
        if (n < 1) throw ConfigError("multiuser.n_ue_list: entries must be >= 1");
    if (multiuser.trials < 1) throw ConfigError("multiuser.trials: must be >= 1");
    if (mobility.speeds_mps.empty())
        throw ConfigError("mobility.speeds_mps: must not be empty");
    for (double v : mobility.speeds_mps)
        if (v < 0.0) throw ConfigError("mobility.speeds_mps: entries must be nonnegative");
    check_positive(mobility.duration_s, "mobility.duration_s");
    check_positive(mobility.dt_s, "mobility.dt_s");
    if (mobility.n_ue < 1) throw ConfigError("mobility.n_ue: must be >= 1");
    if (mobility.pause_s < 0) throw ConfigError("mobility.pause_s: must be nonnegative");
    check_positive(mobility.theta_fwhm_deg, "mobility.theta_fwhm_deg");
    if (mobility.odtx_delay_ms < 0 || mobility.isvlp_delay_ms < 0)
        throw ConfigError("mobility: scheme delays must be nonnegative");
    if (mobility.isvlp_sigma_coarse_m < 0 || mobility.isvlp_sigma_fine_m < 0)
        throw ConfigError("mobility: position error sigmas must be nonnegative");
    if (ann.n_side < 1) throw ConfigError("ann.n_side: must be >= 1");
    check_positive(ann.d_cell_m, "ann.d_cell_m");
    if (ann.n_hidden < 1) throw ConfigError("ann.n_hidden: must be >= 1");
    if (ann.epochs < 1) throw ConfigError("ann.epochs: must be >= 1");
    if (ann.batch < 1) throw ConfigError("ann.batch: must be >= 1");
    check_positive(ann.learning_rate, "ann.learning_rate");
    if (ann.dataset_size < 10) throw ConfigError("ann.dataset_size: must be >= 10");
    if (!(ann.train_fraction > 0.0 && ann.train_fraction < 1.0))
        throw ConfigError("ann.train_fraction: must lie in (0, 1)");
    check_positive(r_threshold_bps, "r_threshold_bps");
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return ScenarioConfig::from_json(j);
}

// --set key=value: dotted path into the JSON tree; value parsed as JSON when
// possible, otherwise taken as a string. "lambda_nm" aliases
// "beam.wavelength_nm".
inline void apply_override(json& root, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    std::string key = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    if (key == "lambda_nm") key = "beam.wavelength_nm";

    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        size_t dot = key.find('.', start);
        if (dot == std::string::npos) {
            parts.push_back(key.substr(start));
            break;
        }
        parts.push_back(key.substr(start, dot - start));
        start = dot + 1;
    }
    for (const std::string& p : parts)
        if (p.empty()) throw ConfigError("--set key has an empty path segment: '" + key + "'");

    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;
    }

    json* node = &root;
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object())
            throw ConfigError("--set path '" + key + "' crosses a non-object value");
        node = &(*node)[parts[i]];
        if (node->is_null()) *node = json::object();
    }
    if (!node->is_object())
        throw ConfigError("--set path '" + key + "' crosses a non-object value");
    (*node)[parts.back()] = parsed;
}

} // namespace owcsim
