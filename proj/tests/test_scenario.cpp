#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eecdma/rng.hpp"
#include "eecdma/scenario.hpp"

using namespace eecdma;

namespace {
SystemConfig config_with_seed(std::uint64_t seed) {
    SystemConfig cfg;
    cfg.seed = seed;
    return cfg;
}
}  // namespace

TEST_CASE("draw_scenario: deterministic per (seed, trial)") {
    const SystemConfig cfg = config_with_seed(77);
    const UserScenario a = draw_scenario(cfg, 4, 3);
    const UserScenario b = draw_scenario(cfg, 4, 3);
    REQUIRE(a.K() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(a.users[(size_t)k].distance == b.users[(size_t)k].distance);
        for (size_t l = 0; l < 3; ++l) {
            CHECK(a.users[(size_t)k].paths[l].gain == b.users[(size_t)k].paths[l].gain);
            CHECK(a.users[(size_t)k].paths[l].delay == b.users[(size_t)k].paths[l].delay);
        }
        CHECK((a.users[(size_t)k].code.chips - b.users[(size_t)k].code.chips).norm() == 0.0);
    }
    const UserScenario c = draw_scenario(cfg, 4, 4);
    CHECK(a.users[0].distance != c.users[0].distance);
}

TEST_CASE("draw_scenario: ranges") {
    const SystemConfig cfg = config_with_seed(5);
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        const UserScenario sc = draw_scenario(cfg, 3, trial);
        for (const auto& u : sc.users) {
            CHECK(u.distance >= cfg.dist_min);
            CHECK(u.distance <= cfg.dist_max);
            for (const auto& p : u.paths) {
                CHECK(p.delay >= 0.0);
                CHECK(p.delay < cfg.Tb());
                CHECK(p.gain >= 0.0);
            }
        }
    }
}

TEST_CASE("rayleigh sampler: empirical mean matches d^-2 * i_l within 1%") {
    Rng rng(2024);
    const double mean = 0.5 * 1e-4;  // i1 = 0.5 at d = 100
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += rng.rayleigh(mean);
    CHECK(acc / n == doctest::Approx(mean).epsilon(0.01));
}

TEST_CASE("noise_covariance: diagonal, Toeplitz symmetry, banded support") {
    const SystemConfig cfg;
    const NoiseModel noise = noise_covariance(cfg);
    const int n = cfg.window_len();
    REQUIRE(noise.covariance.rows() == n);
    for (int i = 0; i < n; ++i) {
        CHECK(noise.covariance(i, i) == doctest::Approx(0.5 * cfg.N0).epsilon(1e-14));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            CHECK(noise.covariance(i, j) == noise.covariance(j, i));
            if (i + 1 < n && j + 1 < n) {
                CHECK(noise.covariance(i, j) == noise.covariance(i + 1, j + 1));
            }
            if (std::abs(i - j) >= 4 * cfg.Mos) CHECK(noise.covariance(i, j) == 0.0);
        }
    }
}

TEST_CASE("noise_covariance: positive semidefinite up to 1e-10 of the diagonal") {
    const SystemConfig cfg;
    const NoiseModel noise = noise_covariance(cfg);
    const int n = cfg.window_len();
    const Eigen::MatrixXd shifted =
        noise.covariance + 1e-10 * 0.5 * cfg.N0 * Eigen::MatrixXd::Identity(n, n);
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("data_covariance: zero powers give the noise covariance") {
    const SystemConfig cfg;
    const NoiseModel noise = noise_covariance(cfg);
    const SignatureSet sig = build_signatures(draw_scenario(cfg, 3, 0), cfg);
    const Eigen::MatrixXd M = data_covariance(sig, Eigen::VectorXd::Zero(3), noise);
    CHECK((M - noise.covariance).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("data_covariance: single-user definition") {
    const SystemConfig cfg;
    const NoiseModel noise = noise_covariance(cfg);
    const SignatureSet sig = build_signatures(draw_scenario(cfg, 1, 1), cfg);
    const Eigen::VectorXd p = Eigen::VectorXd::Ones(1);
    Eigen::MatrixXd expected = noise.covariance;
    for (int w = 0; w < 4; ++w) {
        const Eigen::VectorXd& h = sig.users[0].windows[(size_t)w];
        expected += h * h.transpose();
    }
    const Eigen::MatrixXd M = data_covariance(sig, p, noise);
    CHECK((M - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("data_covariance: own-term additivity (Q_k consistency)") {
    const SystemConfig cfg;
    const NoiseModel noise = noise_covariance(cfg);
    const SignatureSet sig = build_signatures(draw_scenario(cfg, 4, 2), cfg);
    Eigen::VectorXd p(4);
    p << 0.5, 2.0, 0.1, 7.0;
    const int k = 2;
    Eigen::VectorXd p_zeroed = p;
    p_zeroed[k] = 0.0;
    Eigen::MatrixXd rebuilt = data_covariance(sig, p_zeroed, noise);
    for (int w = 0; w < 4; ++w) {
        const Eigen::VectorXd& h = sig.users[(size_t)k].windows[(size_t)w];
        rebuilt += p[k] * (h * h.transpose());
    }
    const Eigen::MatrixXd direct = data_covariance(sig, p, noise);
    const double scale = direct.cwiseAbs().maxCoeff();
    CHECK((rebuilt - direct).cwiseAbs().maxCoeff() <= 1e-12 * scale);
}

TEST_CASE("data_covariance: monotone in powers via quadratic-form probes") {
    const SystemConfig cfg;
    const NoiseModel noise = noise_covariance(cfg);
    const SignatureSet sig = build_signatures(draw_scenario(cfg, 3, 5), cfg);
    Eigen::VectorXd p(3);
    p << 1.0, 3.0, 0.2;
    Rng rng(9);
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd bumped = p;
        bumped[k] += 1.5;
        const Eigen::MatrixXd delta =
            data_covariance(sig, bumped, noise) - data_covariance(sig, p, noise);
        for (int rep = 0; rep < 20; ++rep) {
            Eigen::VectorXd v(cfg.window_len());
            for (int i = 0; i < v.size(); ++i) v[i] = rng.normal();
            CHECK(v.dot(delta * v) >= -1e-12 * delta.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("build_signatures: zero-gain channel yields zero windows, scaling is linear") {
    SystemConfig cfg;
    cfg.seed = 31;
    UserScenario sc = draw_scenario(cfg, 1, 0);
    // single path, delay 0: kill paths 2, 3
    sc.users[0].paths[0] = {1.0, 0.0};
    sc.users[0].paths[1] = {0.0, 0.0};
    sc.users[0].paths[2] = {0.0, 0.0};
    const SignatureSet sig = build_signatures(sc, cfg);
    CHECK(sig.users[0].window(-2).cwiseAbs().maxCoeff() == 0.0);

    UserScenario scaled = sc;
    for (auto& p : scaled.users[0].paths) p.gain *= 3.0;
    const SignatureSet sig3 = build_signatures(scaled, cfg);
    for (int w = -2; w <= 1; ++w) {
        CHECK((sig3.users[0].window(w) - 3.0 * sig.users[0].window(w)).cwiseAbs().maxCoeff() <=
              1e-14);
    }
}

TEST_CASE("build_signatures: SIC order is non-increasing in the main-window norm") {
    const SystemConfig cfg = config_with_seed(123);
    const SignatureSet sig = build_signatures(draw_scenario(cfg, 6, 9), cfg);
    REQUIRE(sig.sic_order.size() == 6);
    for (size_t r = 0; r + 1 < 6; ++r) {
        CHECK(sig.users[(size_t)sig.sic_order[r]].main_norm >=
              sig.users[(size_t)sig.sic_order[r + 1]].main_norm);
    }
}
