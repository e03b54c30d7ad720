#ifndef EECDMA_WAVEFORMS_HPP
#define EECDMA_WAVEFORMS_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "eecdma/errors.hpp"

namespace eecdma {

/**
 * Truncated square-root raised-cosine chip pulse.
 *
 * The pulse is supported on [0, 4*Tc], peaks at t = 2*Tc and is normalized
 * to unit energy over the truncated support, so the autocorrelation at zero
 * lag is exactly 1 and the front-end noise variance is exactly N0/2.
 */
struct PulseSpec {
    double rolloff = 0.22;
    double chip_interval = 1.0;  // Tc
    int support_chips = 4;       // support is [0, support_chips * Tc]
    int fine_grid_per_chip = 128;
};

/// Truncated unit-energy SRRC pulse value; exactly 0 outside [0, 4*Tc].
double srrc_value(const PulseSpec& spec, double t);

/// Truncated-pulse energy of the raw (un-normalized) SRRC formula,
/// trapezoidal quadrature on the fine grid. Exposed for consistency checks.
double srrc_truncated_energy(const PulseSpec& spec);

/**
 * Tabulated autocorrelation rho(tau) of the truncated pulse.
 *
 * Computed by trapezoidal quadrature on the fine grid, normalized so that
 * rho(0) = 1, even by construction, zero for |tau| >= 4*Tc. Evaluation
 * between grid points is linear interpolation.
 */
class PulseAutocorrelation {
public:
    explicit PulseAutocorrelation(const PulseSpec& spec);

    double operator()(double tau) const;

    const PulseSpec& spec() const { return spec_; }
    double grid_step() const { return step_; }
    double support() const { return tau_max_; }

private:
    PulseSpec spec_;
    std::vector<double> samples_;  // tau >= 0 half; mirrored on evaluation
    double step_ = 0.0;
    double tau_max_ = 0.0;
};

PulseAutocorrelation pulse_autocorrelation(const PulseSpec& spec);

/// Binary spreading sequence with entries +-1/sqrt(N).
struct SpreadingCode {
    Eigen::VectorXd chips;
    int length() const { return static_cast<int>(chips.size()); }
};

/// Deterministic i.i.d. equiprobable +-1/sqrt(N) code for (seed, user).
SpreadingCode make_code(std::uint64_t seed, int user, int N);

/// One resolvable propagation path: amplitude gain and total delay
/// (user timing offset folded in; must lie in [0, Tb)).
struct PathTap {
    double gain = 0.0;
    double delay = 0.0;
};

/**
 * Sampled effective-signature windows of one user.
 *
 * windows[w] holds h_{k,i} with i = w - 2 in {-2,-1,0,+1}; entry m is
 * h_k(m*Tc/Mos - i*Tb), the sample of the shifted signature seen in the
 * two-bit observation window.
 */
struct UserSignature {
    std::array<Eigen::VectorXd, 4> windows;
    double main_norm = 0.0;  // ||h_{k,0}||

    const Eigen::VectorXd& window(int i) const { return windows[static_cast<size_t>(i + 2)]; }
    Eigen::VectorXd& window(int i) { return windows[static_cast<size_t>(i + 2)]; }
};

/**
 * Evaluate h_k(t) = sum_l gain_l * sum_n beta_n * rho(t - delay_l - n*Tc)
 * on the four shifted window grids. Throws DelayOutOfRange if any path
 * delay falls outside [0, Tb).
 */
UserSignature effective_signature(const SpreadingCode& code, const std::vector<PathTap>& paths,
                                  const PulseAutocorrelation& rho, double Tb, int Mos);

/// All users' signature windows plus the SIC detection order.
struct SignatureSet {
    std::vector<UserSignature> users;
    std::vector<int> sic_order;  // sic_order[r] = user detected at rank r
    std::vector<int> sic_rank;   // sic_rank[k]  = detection rank of user k
    int window_len = 0;          // 2 * Mos * N

    int size() const { return static_cast<int>(users.size()); }
};

/// Fill the detection order: ||h_{k,0}|| non-increasing, ties by index.
SignatureSet sort_for_sic(SignatureSet set);

}  // namespace eecdma

#endif  // EECDMA_WAVEFORMS_HPP
