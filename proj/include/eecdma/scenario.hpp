#ifndef EECDMA_SCENARIO_HPP
#define EECDMA_SCENARIO_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>

#include "eecdma/numerics.hpp"
#include "eecdma/waveforms.hpp"

namespace eecdma {

/**
 * All physical and algorithmic constants of one experiment.
 *
 * Defaults reproduce the reference setup: N=7 chips/bit, B=120-bit packets,
 * 2x oversampling, 3-path Rayleigh channels with weights [0.5, 0.3, 0.2],
 * cell radius 10..500 m, N0 = 1e-9 (power per unit bandwidth in normalized
 * time units), transmit power capped at 25 dB over the unit reference power.
 */
struct SystemConfig {
    int N = 7;     // processing gain (chips per bit)
    int B = 120;   // packet length, bits
    int Mos = 2;   // oversampling factor (samples per chip)
    double rolloff = 0.22;
    double Tc = 1.0;    // chip interval, normalized time
    double N0 = 1e-9;   // noise PSD level
    double Pmax = 316.22776601683793;  // 10^2.5, i.e. 25 dB re unit power
    double dist_min = 10.0;   // meters
    double dist_max = 500.0;  // meters
    std::array<double, 3> path_weights{0.5, 0.3, 0.2};
    double utility_scale = 1.0;  // R*L/B factor of the utility
    Tolerances tol{};
    double power_rel_tol = 1e-6;  // equilibrium sweep termination
    int max_sweeps = 500;
    std::uint64_t seed = 1;
    int fine_grid_per_chip = 128;

    double Tb() const { return N * Tc; }
    int window_len() const { return 2 * Mos * N; }
    PulseSpec pulse() const { return PulseSpec{rolloff, Tc, 4, fine_grid_per_chip}; }
};

/// One user's random draw: position, 3-path channel, spreading code.
struct UserDraw {
    double distance = 0.0;
    std::vector<PathTap> paths;
    SpreadingCode code;
};

struct UserScenario {
    std::vector<UserDraw> users;
    int K() const { return static_cast<int>(users.size()); }
};

/**
 * Draw a K-user scenario from the (seed, trial) substream: distances
 * uniform on [dist_min, dist_max], total path delays uniform on [0, Tb),
 * path amplitudes Rayleigh with mean d^-2 * i_l, codes from make_code.
 * Fully deterministic given (config.seed, trial).
 */
UserScenario draw_scenario(const SystemConfig& config, int K, std::uint64_t trial);

/// Redraw variant used when a degenerate draw must be rejected.
UserScenario draw_scenario(const SystemConfig& config, int K, std::uint64_t trial,
                           std::uint64_t retry);

/**
 * Covariance of the front-end noise vector: symmetric Toeplitz with entry
 * (m,n) = (N0/2) * rho((m-n)*Tc/Mos). The raw matrix can be numerically
 * singular; factorization paths add `regularization` * I first.
 */
struct NoiseModel {
    Eigen::MatrixXd covariance;
    double regularization = 0.0;  // 1e-12 * N0/2

    Eigen::MatrixXd regularized() const {
        return covariance + regularization * Eigen::MatrixXd::Identity(covariance.rows(),
                                                                       covariance.cols());
    }
};

NoiseModel noise_covariance(const SystemConfig& config);

/// Build every user's signature windows and the SIC order.
SignatureSet build_signatures(const UserScenario& scenario, const SystemConfig& config);
SignatureSet build_signatures(const UserScenario& scenario, const SystemConfig& config,
                              const PulseAutocorrelation& rho);

/**
 * Data covariance M_yy = noise + sum_k p_k sum_i h_{k,i} h_{k,i}^T
 * (the four windowed vectors of a user carry four distinct i.i.d. symbols,
 * so cross terms vanish).
 */
Eigen::MatrixXd data_covariance(const SignatureSet& signatures, const Eigen::VectorXd& powers,
                                const NoiseModel& noise);

}  // namespace eecdma

#endif  // EECDMA_SCENARIO_HPP
