#include "eecdma/scenario.hpp"

#include <cmath>

#include "eecdma/rng.hpp"

namespace eecdma {

UserScenario draw_scenario(const SystemConfig& config, int K, std::uint64_t trial,
                           std::uint64_t retry) {
    if (K < 1) throw std::invalid_argument("draw_scenario: K must be >= 1");
    const std::uint64_t scenario_seed = substream_seed(substream_seed(config.seed, trial), retry);
    Rng rng(scenario_seed);

    UserScenario scenario;
    scenario.users.resize(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) {
        UserDraw& u = scenario.users[static_cast<size_t>(k)];
        u.distance = rng.uniform(config.dist_min, config.dist_max);
        u.paths.resize(config.path_weights.size());
        for (auto& p : u.paths) p.delay = rng.uniform(0.0, config.Tb());
        const double inv_d2 = 1.0 / (u.distance * u.distance);
        for (size_t l = 0; l < u.paths.size(); ++l) {
            u.paths[l].gain = rng.rayleigh(config.path_weights[l] * inv_d2);
        }
        u.code = make_code(scenario_seed, k, config.N);
    }
    return scenario;
}

UserScenario draw_scenario(const SystemConfig& config, int K, std::uint64_t trial) {
    return draw_scenario(config, K, trial, 0);
}

NoiseModel noise_covariance(const SystemConfig& config) {
    const PulseAutocorrelation rho(config.pulse());
    const int n = config.window_len();
    const double dt = config.Tc / config.Mos;
    const double level = 0.5 * config.N0;

    // One value per lag keeps the matrix exactly symmetric Toeplitz.
    std::vector<double> lag(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) lag[static_cast<size_t>(j)] = level * rho(j * dt);

    NoiseModel model;
    model.covariance.resize(n, n);
    for (int m = 0; m < n; ++m) {
        for (int c = 0; c < n; ++c) {
            model.covariance(m, c) = lag[static_cast<size_t>(std::abs(m - c))];
        }
    }
    model.regularization = 1e-12 * level;
    return model;
}

SignatureSet build_signatures(const UserScenario& scenario, const SystemConfig& config,
                              const PulseAutocorrelation& rho) {
    SignatureSet set;
    set.window_len = config.window_len();
    set.users.reserve(scenario.users.size());
    for (const auto& u : scenario.users) {
        set.users.push_back(effective_signature(u.code, u.paths, rho, config.Tb(), config.Mos));
    }
    return sort_for_sic(std::move(set));
}

SignatureSet build_signatures(const UserScenario& scenario, const SystemConfig& config) {
    const PulseAutocorrelation rho(config.pulse());
    return build_signatures(scenario, config, rho);
}

Eigen::MatrixXd data_covariance(const SignatureSet& signatures, const Eigen::VectorXd& powers,
                                const NoiseModel& noise) {
    Eigen::MatrixXd M = noise.covariance;
    for (int k = 0; k < signatures.size(); ++k) {
        const double p = powers[k];
        for (int w = 0; w < 4; ++w) {
            const Eigen::VectorXd& h = signatures.users[static_cast<size_t>(k)].windows[static_cast<size_t>(w)];
            M.noalias() += p * (h * h.transpose());
        }
    }
    return M;
}

}  // namespace eecdma
