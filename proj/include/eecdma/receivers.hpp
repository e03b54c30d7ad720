#ifndef EECDMA_RECEIVERS_HPP
#define EECDMA_RECEIVERS_HPP

#include <Eigen/Dense>
#include <optional>

#include "eecdma/scenario.hpp"

namespace eecdma {

enum class FilterKind {
    MatchedFilter,
    ConstrainedLinear,  // ISI-orthogonal, SINR-optimal in the O_k subspace
    LinearMMSE,
    ConstrainedSic,
    SicMMSE,
};

/**
 * Receive filter for one user. `full` is the filter in sample space,
 * normalized to unit norm (every SINR here is scale-invariant). For the
 * constrained kinds `reduced` holds the coordinates x_k in the O_k basis,
 * with full = O_k * reduced.
 */
struct ReceiveFilter {
    FilterKind kind = FilterKind::MatchedFilter;
    Eigen::VectorXd full;
    std::optional<Eigen::VectorXd> reduced;
};

/// SINR split into its variance contributions; sinr = signal/(noise+mai+self_isi).
struct SinrBreakdown {
    double signal = 0.0;
    double noise = 0.0;
    double mai = 0.0;       // other users, all four windows
    double self_isi = 0.0;  // own windows j != 0
    double sinr = 0.0;
};

/// SINR of the linear decision statistic d^T y(p).
SinrBreakdown sinr_linear(const ReceiveFilter& filter, int k, const SignatureSet& signatures,
                          const Eigen::VectorXd& powers, const NoiseModel& noise);

/**
 * SINR of the SIC decision statistic, assuming correct past decisions:
 * users detected earlier keep only their future-symbol (j=+1) residue,
 * users detected later contribute all four windows.
 */
SinrBreakdown sinr_sic(const ReceiveFilter& filter, int k, const SignatureSet& signatures,
                       const Eigen::VectorXd& powers, const NoiseModel& noise);

ReceiveFilter matched_filter(int k, const SignatureSet& signatures);

/// Orthonormal basis of the orthogonal complement of the user's three ISI
/// vectors {h_{k,-2}, h_{k,-1}, h_{k,+1}}; 2NM x (2NM-3) when independent.
Eigen::MatrixXd isi_nuller_basis(int k, const SignatureSet& signatures);

ReceiveFilter constrained_mmse_filter(int k, const SignatureSet& signatures,
                                      const Eigen::VectorXd& powers, const NoiseModel& noise);

ReceiveFilter mmse_filter(int k, const SignatureSet& signatures, const Eigen::VectorXd& powers,
                          const NoiseModel& noise);

/**
 * SIC-stage covariance M_k = J_k J_k^T + M, where J_k stacks sqrt(p_i)*h_{i,1}
 * for every user plus sqrt(p_i)*h_{i,j}, j in {-2,-1,0}, for users not yet
 * detected (detection rank >= rank of k). Includes the desired-signal term.
 */
Eigen::MatrixXd sic_interference_matrix(int k, const SignatureSet& signatures,
                                        const Eigen::VectorXd& powers, const NoiseModel& noise);

ReceiveFilter constrained_sic_filter(int k, const SignatureSet& signatures,
                                     const Eigen::VectorXd& powers, const NoiseModel& noise);

ReceiveFilter sic_mmse_filter(int k, const SignatureSet& signatures,
                              const Eigen::VectorXd& powers, const NoiseModel& noise);

// Building blocks shared with the equilibrium engine: construct filters from a
// pre-assembled (already regularized) covariance matrix.

ReceiveFilter mmse_filter_from(const Eigen::MatrixXd& cov_reg, int k,
                               const SignatureSet& signatures, FilterKind kind);

ReceiveFilter constrained_filter_from(const Eigen::MatrixXd& cov_reg, const Eigen::MatrixXd& basis,
                                      int k, const SignatureSet& signatures, FilterKind kind);

/**
 * Closed-form MMSE output SINR p*(h0^T C^-1 h0)^2 / (h0^T C^-1 h0 - p*(h0^T C^-1 h0)^2)
 * evaluated from the covariance solve; algebraically identical to feeding the
 * MMSE filter through the term-by-term SINR sum.
 */
double mmse_sinr_closed_form(const Eigen::MatrixXd& cov_reg, int k, const SignatureSet& signatures,
                             double own_power);

}  // namespace eecdma

#endif  // EECDMA_RECEIVERS_HPP
