#ifndef EECDMA_MONTECARLO_HPP
#define EECDMA_MONTECARLO_HPP

#include <Eigen/Dense>
#include <vector>

#include "eecdma/games.hpp"
#include "eecdma/rng.hpp"

namespace eecdma {

/**
 * Simulated observation windows y(p) with the symbols that generated them.
 * y is window_len x frames; symbols is (4K) x frames with row 4k+w holding
 * user k's symbol for window i = w-2. Frames are independent draws.
 */
struct FrameSamples {
    Eigen::MatrixXd y;
    Eigen::MatrixXd symbols;

    double symbol(int user, int window_i, int frame) const {
        return symbols(4 * user + (window_i + 2), frame);
    }
};

/// Draw `frames` observation windows at the given powers; noise is sampled
/// through a Cholesky factor of the regularized covariance. Deterministic
/// for a given rng state.
FrameSamples simulate_frames(const SignatureSet& signatures, const NoiseModel& noise,
                             const Eigen::VectorXd& powers, int frames, Rng& rng);

struct SweepSpec {
    std::vector<GameKind> kinds;
    std::vector<int> user_counts;
    int trials = 1;
    SystemConfig config;
    int workers = 0;  // 0 = hardware concurrency
};

struct SweepRow {
    GameKind kind{};
    int K = 0;
    double mean_utility = 0.0;
    double mean_power_linear = 0.0;
    double mean_power_db = 0.0;  // 10*log10(mean_power_linear / 1)
    double frac_at_max = 0.0;
    long nonconverged = 0;  // trials excluded from the means
    long trials = 0;
};

struct SweepSummary {
    std::vector<SweepRow> rows;  // kinds in request order, K ascending within
    std::uint64_t seed = 0;
};

/**
 * Paired Monte Carlo sweep: every game kind runs on the identical scenario
 * of each (K, trial). Trials are distributed over workers, but results are
 * reduced in canonical (kind, K, trial, user) order, so the summary is
 * bit-identical for any worker count. Degenerate zero-signature draws are
 * redrawn (at most 100 retries per trial).
 */
SweepSummary run_sweep(const SweepSpec& spec);

}  // namespace eecdma

#endif  // EECDMA_MONTECARLO_HPP
