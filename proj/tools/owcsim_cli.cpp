// Command-line front end: one subcommand per experiment, JSON config with
// dotted --set overrides, CSV output.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "owcsim/config.hpp"
#include "owcsim/experiments.hpp"
#include "owcsim/model_io.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> sets;
    int threads = 0;
    bool dat = false;
};

owcsim::json base_json(const CliOptions& opt) {
    if (opt.config_path.empty()) return owcsim::ScenarioConfig{}.to_json();
    std::ifstream f(opt.config_path);
    if (!f) throw owcsim::ConfigError("cannot open config file '" + opt.config_path + "'");
    owcsim::json j;
    try {
        f >> j;
    } catch (const owcsim::json::parse_error& e) {
        throw owcsim::ConfigError("config parse error in '" + opt.config_path + "': " + e.what());
    }
    return j;
}

owcsim::ScenarioConfig resolve_config(const CliOptions& opt) {
    owcsim::json j = base_json(opt);
    for (const std::string& s : opt.sets) owcsim::apply_override(j, s);
    return owcsim::ScenarioConfig::from_json(j);
}

void write_dat_mirror(const owcsim::ResultTable& t, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << "#";
    for (const auto& c : t.columns()) f << " " << c;
    f << "\n";
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        const auto& row = t.row(r);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) f << " ";
            if (std::holds_alternative<double>(row[i]))
                f << owcsim::format_double_17g(std::get<double>(row[i]));
            else if (std::holds_alternative<long long>(row[i]))
                f << std::get<long long>(row[i]);
            else
                f << std::get<std::string>(row[i]);
        }
        f << "\n";
    }
}

std::string emit(const owcsim::ResultTable& t, const CliOptions& opt, const std::string& name) {
    std::filesystem::create_directories(opt.out_dir);
    std::string path = opt.out_dir + "/" + name + ".csv";
    t.save_csv(path);
    if (opt.dat) write_dat_mirror(t, opt.out_dir + "/" + name + ".dat");
    return path;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"owcsim: optical wireless downlink simulator"};
    app.require_subcommand(1);

    CliOptions opt;
    const std::vector<std::pair<std::string, std::string>> subs_meta = {
        {"snr-map", "SNR over the central cell (and the full array)"},
        {"pdf", "central-cell SNR density, sampled vs closed form"},
        {"rate-vs-cell", "average cell rate vs cell size, Monte Carlo vs closed form"},
        {"rate-vs-array", "system average rate vs array size with its upper bound"},
        {"multiuser", "multi-user SDMA totals with and without ICI"},
        {"mobility", "throughput and outage vs speed for the activation schemes"},
        {"eyesafety", "per-divergence transmit power ceilings"},
        {"train-ann", "train the beam-activation classifier"},
        {"validate-config", "parse and validate a config, then exit"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, desc] : subs_meta) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", opt.config_path, "JSON config file");
        sub->add_option("--set", opt.sets, "override a config value, key=value (repeatable)");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--threads", opt.threads, "worker threads (0 = auto)");
        sub->add_flag("--dat", opt.dat, "also write a space-separated .dat mirror");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    std::string cmd = app.get_subcommands().front()->get_name();

    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&]() {
        auto dt = std::chrono::steady_clock::now() - t0;
        return std::chrono::duration<double>(dt).count();
    };

    try {
        owcsim::ScenarioConfig cfg = resolve_config(opt);

        if (cmd == "validate-config") {
            std::printf("config valid (hash %s)\n", owcsim::hash_hex(cfg.config_hash()).c_str());
            return 0;
        }
        if (cmd == "snr-map") {
            auto res = owcsim::run_snr_map(cfg, opt.threads);
            std::string path = emit(res.table, opt, "snr_map");
            for (const auto& s : res.summary)
                std::printf("snr-map: theta %.3g deg -> peak %.2f dB, corner falloff %.2f dB\n",
                            s.theta_deg, s.peak_db, s.corner_falloff_db);
            std::printf("snr-map: %zu rows -> %s (%.2f s)\n", res.table.n_rows(), path.c_str(),
                        elapsed());
            return 0;
        }
        if (cmd == "pdf") {
            auto res = owcsim::run_pdf_experiment(cfg, opt.threads);
            std::string path = emit(res.table, opt, "pdf");
            std::printf("pdf: support [%.2f, %.2f] dB, KS exact %.5f, KS flat %.5f, "
                        "max density gap %.3g\n",
                        res.support_lo_db, res.support_hi_db, res.ks_exact, res.ks_uniform,
                        res.max_rel_density_gap);
            std::printf("pdf: %zu rows -> %s (%.2f s)\n", res.table.n_rows(), path.c_str(),
                        elapsed());
            return 0;
        }
        if (cmd == "rate-vs-cell") {
            auto res = owcsim::run_avg_rate_vs_cell_size(cfg, opt.threads);
            std::string path = emit(res.table, opt, "rate_vs_cell");
            std::printf("rate-vs-cell: %zu rows -> %s (%.2f s)\n", res.table.n_rows(),
                        path.c_str(), elapsed());
            return 0;
        }
        if (cmd == "rate-vs-array") {
            auto res = owcsim::run_avg_rate_vs_array(cfg, opt.threads);
            std::string path = emit(res.table, opt, "rate_vs_array");
            std::printf("rate-vs-array: %zu rows -> %s (%.2f s)\n", res.table.n_rows(),
                        path.c_str(), elapsed());
            return 0;
        }
        if (cmd == "multiuser") {
            auto res = owcsim::run_multiuser(cfg, opt.threads);
            std::string path = emit(res.table, opt, "multiuser");
            std::printf("multiuser: %zu rows -> %s (%.2f s)\n", res.table.n_rows(), path.c_str(),
                        elapsed());
            return 0;
        }
        if (cmd == "mobility") {
            auto res = owcsim::run_mobility_throughput(cfg, opt.threads);
            std::string path = emit(res.table, opt, "mobility");
            std::printf("mobility: ccr slope %.3g bps per m/s (se %.3g), rel range %.3g\n",
                        res.ccr_slope, res.ccr_slope_se, res.ccr_rel_range);
            std::printf("mobility: %zu rows -> %s (%.2f s)\n", res.table.n_rows(), path.c_str(),
                        elapsed());
            return 0;
        }
        if (cmd == "eyesafety") {
            auto res = owcsim::run_eyesafety(cfg);
            std::string path = emit(res.table, opt, "eyesafety");
            for (const auto& r : res.rows)
                std::printf("eyesafety: theta %.3g deg -> max %.2f mW (default %.0f mW)\n",
                            r.theta_deg, r.p_max_mw, r.p_floor_mw);
            std::printf("eyesafety: %zu rows -> %s (%.2f s)\n", res.table.n_rows(), path.c_str(),
                        elapsed());
            return 0;
        }
        if (cmd == "train-ann") {
            auto res = owcsim::run_train_ann(cfg, opt.threads);
            std::string path = emit(res.table, opt, "train_ann");
            for (const auto& r : res.rows) {
                std::string mpath =
                    opt.out_dir + "/ann_" + r.uplink + "_" + r.orientation + ".json";
                owcsim::save_mlp(r.model, mpath);
                std::printf("train-ann: %s/%s accuracy %.4f (%zu test rows) -> %s\n",
                            r.uplink.c_str(), r.orientation.c_str(), r.accuracy, r.n_test,
                            mpath.c_str());
            }
            std::printf("train-ann: %zu rows -> %s (%.2f s)\n", res.table.n_rows(), path.c_str(),
                        elapsed());
            return 0;
        }
        std::fprintf(stderr, "unknown subcommand '%s'\n", cmd.c_str());
        return 2;
    } catch (const owcsim::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
