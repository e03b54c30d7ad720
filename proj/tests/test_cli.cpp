#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "eecdma/cli.hpp"

using namespace eecdma;

namespace {

int run(const std::vector<std::string>& args, std::string& out, std::string& err) {
    std::vector<const char*> argv{"eecdma"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream os, es;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), os, es);
    out = os.str();
    err = es.str();
    return code;
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/eecdma_test_") + name;
}

}  // namespace

TEST_CASE("targets: default config prints the B=120 target") {
    std::string out, err;
    const int code = run({"targets"}, out, err);
    CHECK(code == kExitOk);
    CHECK(out.find("13.3784729811") != std::string::npos);
    CHECK(out.find("11.2640654589") != std::string::npos);
}

TEST_CASE("targets: per-user MF targets with a scenario") {
    std::string out, err;
    const int code = run({"targets", "--users", "3", "--trial", "0", "--seed", "1"}, out, err);
    CHECK(code == kExitOk);
    CHECK(out.find("user,a,b,target,target_db") != std::string::npos);
    // three data lines
    int lines = 0;
    std::istringstream is(out);
    std::string line;
    bool in_table = false;
    while (std::getline(is, line)) {
        if (in_table && !line.empty()) ++lines;
        if (line.rfind("user,", 0) == 0) in_table = true;
    }
    CHECK(lines == 3);
}

TEST_CASE("config file: parse, override, and failure modes") {
    const std::string path = temp_path("config.txt");
    {
        std::ofstream f(path);
        f << "# comment\n";
        f << "B = 60\n";
        f << "N0 = 2e-9\n";
        f << "path_weights = 0.6,0.3,0.1\n";
        f << "seed = 77\n";
    }
    SystemConfig cfg;
    CHECK(apply_config_file(path, cfg).empty());
    CHECK(cfg.B == 60);
    CHECK(cfg.N0 == 2e-9);
    CHECK(cfg.path_weights[0] == 0.6);
    CHECK(cfg.seed == 77);

    std::string out, err;
    const int code = run({"targets", "--config", path}, out, err);
    CHECK(code == kExitOk);
    CHECK(out.find("B=60") != std::string::npos);

    // --seed overrides the file
    const int code2 = run({"targets", "--config", path, "--seed", "5"}, out, err);
    CHECK(code2 == kExitOk);
    CHECK(out.find("seed=5") != std::string::npos);

    {
        std::ofstream f(path);
        f << "nonsense_key = 1\n";
    }
    const int code3 = run({"targets", "--config", path}, out, err);
    CHECK(code3 == kExitConfig);
    CHECK(err.find("unknown config key") != std::string::npos);

    {
        std::ofstream f(path);
        f << "B\n";
    }
    CHECK(run({"targets", "--config", path}, out, err) == kExitConfig);
    CHECK(run({"targets", "--config", temp_path("missing.cfg")}, out, err) == kExitConfig);
    std::remove(path.c_str());
}

TEST_CASE("invalid packet length exits with the config code") {
    const std::string path = temp_path("b1.txt");
    {
        std::ofstream f(path);
        f << "B = 1\n";
    }
    std::string out, err;
    CHECK(run({"targets", "--config", path}, out, err) == kExitConfig);
    std::remove(path.c_str());
}

TEST_CASE("solve: deterministic output, all kinds present") {
    std::string out1, out2, err;
    const std::vector<std::string> args{"solve", "--users", "5", "--seed", "3",
                                        "--trial", "1", "--games", "all"};
    const int c1 = run(args, out1, err);
    const int c2 = run(args, out2, err);
    CHECK(c1 == c2);
    CHECK(out1 == out2);  // byte-identical
    for (const char* kind : {"mf", "linear-constrained", "linear-mmse", "sic-constrained",
                             "sic-mmse"}) {
        CHECK(out1.find(std::string("game=") + kind) != std::string::npos);
    }
    // five result blocks, each with five user rows
    int rows = 0;
    std::istringstream is(out1);
    std::string line;
    for (; std::getline(is, line);) {
        if (!line.empty() && line[0] >= '0' && line[0] <= '9' && line.find(',') != std::string::npos)
            ++rows;
    }
    CHECK(rows == 25);
}

TEST_CASE("solve: single user hits the constrained target") {
    std::string out, err;
    const int code =
        run({"solve", "--users", "1", "--seed", "9", "--games", "linear-constrained"}, out, err);
    CHECK(code == kExitOk);
    // target 13.3784729811 -> 11.2640654589 dB; uncapped single user must sit there
    const bool capped = out.find(",25,") != std::string::npos;
    if (!capped) {
        CHECK(out.find("11.264065") != std::string::npos);
    }
}

TEST_CASE("solve: forced non-convergence exits 3 and still prints the table") {
    const std::string path = temp_path("shortrun.txt");
    {
        std::ofstream f(path);
        f << "max_sweeps = 1\n";
    }
    std::string out, err;
    const int code = run({"solve", "--users", "4", "--seed", "3", "--config", path, "--games",
                          "linear-mmse"},
                         out, err);
    CHECK(code == kExitNonConverged);
    CHECK(out.find("converged=0") != std::string::npos);
    CHECK(out.find("user,power_db,sinr_db,utility,at_max") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("sweep: CSV schema, determinism, round trip") {
    const std::string path = temp_path("sweep.csv");
    std::string out, err;
    const std::vector<std::string> args{"sweep",  "--users", "2,3", "--trials", "4",
                                        "--games", "mf,sic-mmse", "--out", path,
                                        "--seed",  "11", "--workers", "2"};
    REQUIRE(run(args, out, err) == kExitOk);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream content;
    content << in.rdbuf();
    const std::string csv = content.str();

    CHECK(csv.find("game,K,mean_utility,mean_power_linear,mean_power_db,frac_at_max,"
                   "nonconverged,trials,seed\n") != std::string::npos);
    CHECK(csv.find("power_db = 10*log10(p/1)") != std::string::npos);

    // one row per (game, K); every field parses back to the in-memory summary
    // within the printed 12-significant-digit precision
    SweepSpec spec;
    spec.kinds = {GameKind::MF, GameKind::SicMMSE};
    spec.user_counts = {2, 3};
    spec.trials = 4;
    spec.config.seed = 11;
    const SweepSummary memory = run_sweep(spec);

    std::istringstream lines(csv);
    std::string line;
    size_t row = 0;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("game,", 0) == 0) continue;
        REQUIRE(row < memory.rows.size());
        const SweepRow& mem = memory.rows[row];
        ++row;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) fields.push_back(tok);
        REQUIRE(fields.size() == 9);
        CHECK(fields[0] == to_string(mem.kind));
        CHECK(std::stoi(fields[1]) == mem.K);
        CHECK(std::stod(fields[2]) == doctest::Approx(mem.mean_utility).epsilon(1e-11));
        CHECK(std::stod(fields[3]) == doctest::Approx(mem.mean_power_linear).epsilon(1e-11));
        CHECK(std::stod(fields[4]) == doctest::Approx(mem.mean_power_db).epsilon(1e-11));
        CHECK(std::stod(fields[5]) == doctest::Approx(mem.frac_at_max).epsilon(1e-11));
        const double frac = std::stod(fields[5]);
        CHECK(frac >= 0.0);
        CHECK(frac <= 1.0);
        CHECK(std::stol(fields[6]) == mem.nonconverged);
        CHECK(std::stol(fields[7]) == 4);
        CHECK(fields[8] == "11");
    }
    CHECK(row == 4);

    // identical invocation with a different worker count is byte-identical
    const std::string path2 = temp_path("sweep2.csv");
    std::vector<std::string> args2 = args;
    args2[8] = path2;
    args2[12] = "1";
    REQUIRE(run(args2, out, err) == kExitOk);
    std::ifstream in2(path2);
    std::stringstream content2;
    content2 << in2.rdbuf();
    CHECK(content2.str() == csv);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("sweep: unwritable output path exits 4") {
    std::string out, err;
    const int code = run({"sweep", "--users", "2", "--trials", "1", "--games", "mf", "--out",
                          "/nonexistent-dir/x.csv", "--seed", "1"},
                         out, err);
    CHECK(code == kExitOutput);
}

TEST_CASE("usage errors exit 2") {
    std::string out, err;
    CHECK(run({"sweep", "--users", "2", "--trials", "1", "--games", "mf"}, out, err) ==
          kExitConfig);  // missing --out
    CHECK(run({"solve", "--users", "2", "--games", "warp-drive"}, out, err) == kExitConfig);
    CHECK(run({"solve", "--users", "0"}, out, err) == kExitConfig);
    CHECK(run({"bogus"}, out, err) == kExitConfig);
}

TEST_CASE("installed binary: repeated invocation is byte-identical") {
#ifdef EECDMA_CLI_BINARY
    const std::string cmd = std::string(EECDMA_CLI_BINARY) +
                            " solve --users 3 --seed 21 --games sic-constrained 2>/dev/null";
    auto capture = [&]() {
        std::string result;
        FILE* pipe = popen(cmd.c_str(), "r");
        REQUIRE(pipe != nullptr);
        char buf[512];
        while (fgets(buf, sizeof(buf), pipe)) result += buf;
        pclose(pipe);
        return result;
    };
    const std::string a = capture();
    const std::string b = capture();
    CHECK(!a.empty());
    CHECK(a == b);
#endif
}
