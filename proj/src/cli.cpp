#include "eecdma/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eecdma/scenario.hpp"

namespace eecdma {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_int(const std::string& s, long long& out) {
    try {
        size_t pos = 0;
        out = std::stoll(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

std::string set_config_key(SystemConfig& c, const std::string& key, const std::string& value) {
    auto want_int = [&](int& field, long long lo) -> std::string {
        long long v = 0;
        if (!parse_int(value, v) || v < lo) return "invalid value for " + key + ": " + value;
        field = static_cast<int>(v);
        return {};
    };
    auto want_double = [&](double& field, bool positive) -> std::string {
        double v = 0;
        if (!parse_double(value, v) || (positive && !(v > 0.0))) {
            return "invalid value for " + key + ": " + value;
        }
        field = v;
        return {};
    };
    if (key == "N") return want_int(c.N, 1);
    if (key == "B") return want_int(c.B, 2);
    if (key == "Mos") return want_int(c.Mos, 1);
    if (key == "max_sweeps") return want_int(c.max_sweeps, 1);
    if (key == "fine_grid_per_chip") return want_int(c.fine_grid_per_chip, 64);
    if (key == "rolloff") {
        double v = 0;
        if (!parse_double(value, v) || v < 0.0 || v > 1.0) {
            return "invalid value for rolloff: " + value;
        }
        c.rolloff = v;
        return {};
    }
    if (key == "Tc") return want_double(c.Tc, true);
    if (key == "N0") return want_double(c.N0, true);
    if (key == "Pmax") return want_double(c.Pmax, true);
    if (key == "dist_min") return want_double(c.dist_min, true);
    if (key == "dist_max") return want_double(c.dist_max, true);
    if (key == "utility_scale") return want_double(c.utility_scale, true);
    if (key == "power_rel_tol") return want_double(c.power_rel_tol, true);
    if (key == "path_weights") {
        const auto parts = split(value, ',');
        if (parts.size() != 3) return "path_weights needs three comma-separated values";
        for (size_t i = 0; i < 3; ++i) {
            double v = 0;
            if (!parse_double(parts[i], v) || !(v > 0.0)) {
                return "invalid path weight: " + parts[i];
            }
            c.path_weights[i] = v;
        }
        return {};
    }
    if (key == "seed") {
        long long v = 0;
        if (!parse_int(value, v) || v < 0) return "invalid seed: " + value;
        c.seed = static_cast<std::uint64_t>(v);
        return {};
    }
    return "unknown config key: " + key;
}

std::string config_echo(const SystemConfig& c) {
    std::ostringstream os;
    os << "N=" << c.N << " B=" << c.B << " Mos=" << c.Mos << " rolloff=" << fmt(c.rolloff)
       << " Tc=" << fmt(c.Tc) << " N0=" << fmt(c.N0) << " Pmax=" << fmt(c.Pmax)
       << " dist_min=" << fmt(c.dist_min) << " dist_max=" << fmt(c.dist_max)
       << " path_weights=" << fmt(c.path_weights[0]) << "," << fmt(c.path_weights[1]) << ","
       << fmt(c.path_weights[2]) << " utility_scale=" << fmt(c.utility_scale)
       << " seed=" << c.seed;
    return os.str();
}

std::string parse_kind_list(const std::string& arg, std::vector<GameKind>& kinds) {
    kinds.clear();
    if (arg == "all") {
        kinds = {GameKind::MF, GameKind::LinearConstrained, GameKind::LinearMMSE,
                 GameKind::SicConstrained, GameKind::SicMMSE};
        return {};
    }
    for (const auto& tok : split(arg, ',')) {
        const auto kind = game_kind_from_string(tok);
        if (!kind) return "unknown game kind: " + tok;
        kinds.push_back(*kind);
    }
    if (kinds.empty()) return "no game kinds given";
    return {};
}

}  // namespace

std::string apply_config_file(const std::string& path, SystemConfig& config) {
    std::ifstream in(path);
    if (!in) return "cannot open config file: " + path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            return path + ":" + std::to_string(lineno) + ": expected key=value";
        }
        auto strip = [](std::string s) {
            const auto sb = s.find_first_not_of(" \t");
            const auto se = s.find_last_not_of(" \t");
            return (sb == std::string::npos) ? std::string{} : s.substr(sb, se - sb + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        const std::string err = set_config_key(config, key, value);
        if (!err.empty()) return path + ":" + std::to_string(lineno) + ": " + err;
    }
    return {};
}

int cmd_targets(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
    const SystemConfig& cfg = manifest.config;
    try {
        const EfficiencyFunction eff{cfg.B};
        const double target = common_target_sinr(eff, cfg.tol);
        out << "# eecdma " << kToolVersion << " targets\n";
        out << "# " << config_echo(cfg) << "\n";
        out << "common target SINR (B=" << cfg.B << "): " << fmt(target) << "  ("
            << fmt(to_db(target)) << " dB)\n";
        if (!manifest.user_counts.empty()) {
            const int K = manifest.user_counts.front();
            const UserScenario sc = draw_scenario(cfg, K, manifest.trial);
            const SignatureSet sig = build_signatures(sc, cfg);
            out << "per-user matched-filter targets (K=" << K << ", trial=" << manifest.trial
                << "):\n";
            out << "user,a,b,target,target_db\n";
            for (int k = 0; k < K; ++k) {
                const auto& u = sig.users[static_cast<size_t>(k)];
                const double a = std::pow(u.main_norm, 4);
                double b = 0.0;
                for (int w = 0; w < 4; ++w) {
                    if (w == 2) continue;
                    const double c = u.window(0).dot(u.windows[static_cast<size_t>(w)]);
                    b += c * c;
                }
                const double t = mf_target_sinr(a, b, eff, cfg.tol);
                out << k << "," << fmt(a) << "," << fmt(b) << "," << fmt(t) << ","
                    << fmt(to_db(t)) << "\n";
            }
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "targets: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_solve(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
    const SystemConfig& cfg = manifest.config;
    try {
        const int K = manifest.user_counts.empty() ? 2 : manifest.user_counts.front();
        const UserScenario sc = draw_scenario(cfg, K, manifest.trial);
        const GameEngine engine(build_signatures(sc, cfg), noise_covariance(cfg), cfg);

        out << "# eecdma " << kToolVersion << " solve\n";
        out << "# " << config_echo(cfg) << "\n";
        out << "# K=" << K << " trial=" << manifest.trial << "\n";
        bool all_converged = true;
        for (const GameKind kind : manifest.kinds) {
            const EquilibriumResult res = engine.run(kind);
            all_converged = all_converged && res.converged;
            out << "game=" << to_string(kind) << " converged=" << (res.converged ? 1 : 0)
                << " sweeps=" << res.iterations << "\n";
            out << "user,power_db,sinr_db,utility,at_max\n";
            for (int k = 0; k < K; ++k) {
                out << k << "," << fmt(to_db(res.powers[k])) << "," << fmt(to_db(res.sinrs[k]))
                    << "," << fmt(res.utilities[k]) << ","
                    << (res.at_max[static_cast<size_t>(k)] ? 1 : 0) << "\n";
            }
        }
        return all_converged ? kExitOk : kExitNonConverged;
    } catch (const std::exception& e) {
        err << "solve: " << e.what() << "\n";
        return kExitConfig;
    }
}

void write_sweep_csv(std::ostream& out, const SweepSummary& summary, const RunManifest& manifest) {
    out << "# eecdma " << kToolVersion << " sweep trials=" << manifest.trials << "\n";
    out << "# " << config_echo(manifest.config) << "\n";
    out << "# power_db = 10*log10(p/1); reference power = 1\n";
    out << "game,K,mean_utility,mean_power_linear,mean_power_db,frac_at_max,nonconverged,trials,"
           "seed\n";
    for (const auto& row : summary.rows) {
        out << to_string(row.kind) << "," << row.K << "," << fmt(row.mean_utility) << ","
            << fmt(row.mean_power_linear) << "," << fmt(row.mean_power_db) << ","
            << fmt(row.frac_at_max) << "," << row.nonconverged << "," << row.trials << ","
            << summary.seed << "\n";
    }
}

int cmd_sweep(const RunManifest& manifest, std::ostream& err) {
    try {
        SweepSpec spec;
        spec.kinds = manifest.kinds;
        spec.user_counts = manifest.user_counts;
        spec.trials = manifest.trials;
        spec.config = manifest.config;
        spec.workers = manifest.workers;
        const SweepSummary summary = run_sweep(spec);

        std::ofstream file(manifest.out_path, std::ios::binary);
        if (!file) {
            err << "sweep: cannot open output path: " << manifest.out_path << "\n";
            return kExitOutput;
        }
        write_sweep_csv(file, summary, manifest);
        file.flush();
        if (!file) {
            err << "sweep: write failed: " << manifest.out_path << "\n";
            return kExitOutput;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "sweep: " << e.what() << "\n";
        return kExitConfig;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Energy-efficiency power-control games on a multipath DS/CDMA uplink"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string games_arg = "all";
    std::string users_arg;
    std::string out_path;
    long long seed_arg = -1;
    int trials = 5000;
    int workers = 0;
    std::uint64_t trial = 0;

    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--seed", seed_arg, "RNG seed (overrides config file)");

    auto* targets = app.add_subcommand("targets", "print target SINRs");
    targets->add_option("--users", users_arg, "also print per-user MF targets for a scenario");
    targets->add_option("--trial", trial, "scenario trial index");

    auto* solve = app.add_subcommand("solve", "solve one scenario");
    solve->add_option("--users", users_arg, "number of users")->required();
    solve->add_option("--trial", trial, "scenario trial index");
    solve->add_option("--games", games_arg, "comma list or 'all'");

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep to CSV");
    sweep->add_option("--users", users_arg, "comma list of user counts")->required();
    sweep->add_option("--trials", trials, "trials per user count");
    sweep->add_option("--games", games_arg, "comma list or 'all'");
    sweep->add_option("--out", out_path, "output CSV path")->required();
    sweep->add_option("--workers", workers, "worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitConfig;
    }

    RunManifest manifest;
    if (!config_path.empty()) {
        const std::string cfg_err = apply_config_file(config_path, manifest.config);
        if (!cfg_err.empty()) {
            err << cfg_err << "\n";
            return kExitConfig;
        }
    }
    if (seed_arg >= 0) manifest.config.seed = static_cast<std::uint64_t>(seed_arg);
    if (manifest.config.B < 2) {
        err << "config: B must be >= 2\n";
        return kExitConfig;
    }
    if (manifest.config.dist_max <= manifest.config.dist_min) {
        err << "config: dist_max must exceed dist_min\n";
        return kExitConfig;
    }
    manifest.trials = trials;
    manifest.workers = workers;
    manifest.trial = trial;
    manifest.out_path = out_path;
    const std::string kind_err = parse_kind_list(games_arg, manifest.kinds);
    if (!kind_err.empty()) {
        err << kind_err << "\n";
        return kExitConfig;
    }
    if (!users_arg.empty()) {
        for (const auto& tok : split(users_arg, ',')) {
            long long v = 0;
            if (!parse_int(tok, v) || v < 1) {
                err << "invalid user count: " << tok << "\n";
                return kExitConfig;
            }
            manifest.user_counts.push_back(static_cast<int>(v));
        }
    }
    if (trials < 1) {
        err << "trials must be >= 1\n";
        return kExitConfig;
    }

    if (targets->parsed()) {
        manifest.subcommand = "targets";
        return cmd_targets(manifest, out, err);
    }
    if (solve->parsed()) {
        manifest.subcommand = "solve";
        return cmd_solve(manifest, out, err);
    }
    manifest.subcommand = "sweep";
    return cmd_sweep(manifest, err);
}

}  // namespace eecdma
