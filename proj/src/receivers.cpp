#include "eecdma/receivers.hpp"

#include <cmath>

#include "eecdma/numerics.hpp"

namespace eecdma {

namespace {

const Eigen::VectorXd& main_window(const SignatureSet& sig, int k) {
    return sig.users[static_cast<size_t>(k)].window(0);
}

double quad(const Eigen::MatrixXd& A, const Eigen::VectorXd& d) { return d.dot(A * d); }

ReceiveFilter normalized(FilterKind kind, Eigen::VectorXd full,
                         std::optional<Eigen::VectorXd> reduced) {
    const double n = full.norm();
    if (!(n > 0.0)) throw ZeroFilter("receive filter collapsed to zero");
    full /= n;
    if (reduced) *reduced /= n;
    return ReceiveFilter{kind, std::move(full), std::move(reduced)};
}

}  // namespace

SinrBreakdown sinr_linear(const ReceiveFilter& filter, int k, const SignatureSet& signatures,
                          const Eigen::VectorXd& powers, const NoiseModel& noise) {
    const Eigen::VectorXd& d = filter.full;
    if (!(d.norm() > 0.0)) throw ZeroFilter("sinr_linear: zero filter");

    SinrBreakdown b;
    const double s = d.dot(main_window(signatures, k));
    b.signal = powers[k] * s * s;
    b.noise = quad(noise.covariance, d);
    for (int i = 0; i < signatures.size(); ++i) {
        for (int w = 0; w < 4; ++w) {
            if (i == k && w == 2) continue;
            const double c = d.dot(signatures.users[static_cast<size_t>(i)].windows[static_cast<size_t>(w)]);
            if (i == k) {
                b.self_isi += powers[i] * c * c;
            } else {
                b.mai += powers[i] * c * c;
            }
        }
    }
    b.sinr = b.signal / (b.noise + b.mai + b.self_isi);
    return b;
}

SinrBreakdown sinr_sic(const ReceiveFilter& filter, int k, const SignatureSet& signatures,
                       const Eigen::VectorXd& powers, const NoiseModel& noise) {
    const Eigen::VectorXd& d = filter.full;
    if (!(d.norm() > 0.0)) throw ZeroFilter("sinr_sic: zero filter");
    const int rank_k = signatures.sic_rank[static_cast<size_t>(k)];

    SinrBreakdown b;
    const double s = d.dot(main_window(signatures, k));
    b.signal = powers[k] * s * s;
    b.noise = quad(noise.covariance, d);
    for (int i = 0; i < signatures.size(); ++i) {
        const auto& u = signatures.users[static_cast<size_t>(i)];
        if (i == k) {
            for (int w = 0; w < 4; ++w) {
                if (w == 2) continue;
                const double c = d.dot(u.windows[static_cast<size_t>(w)]);
                b.self_isi += powers[i] * c * c;
            }
        } else if (signatures.sic_rank[static_cast<size_t>(i)] < rank_k) {
            // Cancelled user: only the future-symbol window survives.
            const double c = d.dot(u.window(+1));
            b.mai += powers[i] * c * c;
        } else {
            for (int w = 0; w < 4; ++w) {
                const double c = d.dot(u.windows[static_cast<size_t>(w)]);
                b.mai += powers[i] * c * c;
            }
        }
    }
    b.sinr = b.signal / (b.noise + b.mai + b.self_isi);
    return b;
}

ReceiveFilter matched_filter(int k, const SignatureSet& signatures) {
    const Eigen::VectorXd& h0 = main_window(signatures, k);
    if (!(h0.norm() > 0.0)) throw ZeroSignature("matched_filter: zero signature");
    return normalized(FilterKind::MatchedFilter, h0, std::nullopt);
}

Eigen::MatrixXd isi_nuller_basis(int k, const SignatureSet& signatures) {
    const auto& u = signatures.users[static_cast<size_t>(k)];
    std::vector<Eigen::VectorXd> isi{u.window(-2), u.window(-1), u.window(+1)};
    return orth_complement_basis(isi, signatures.window_len);
}

ReceiveFilter constrained_filter_from(const Eigen::MatrixXd& cov_reg, const Eigen::MatrixXd& basis,
                                      int k, const SignatureSet& signatures, FilterKind kind) {
    Eigen::MatrixXd R = basis.transpose() * cov_reg * basis;
    R = 0.5 * (R + R.transpose().eval());  // restore exact symmetry
    const Eigen::VectorXd g = basis.transpose() * main_window(signatures, k);
    Eigen::VectorXd x = spd_solve(R, g);
    Eigen::VectorXd full = basis * x;
    return normalized(kind, std::move(full), std::move(x));
}

ReceiveFilter mmse_filter_from(const Eigen::MatrixXd& cov_reg, int k,
                               const SignatureSet& signatures, FilterKind kind) {
    Eigen::VectorXd d = spd_solve(cov_reg, main_window(signatures, k));
    return normalized(kind, std::move(d), std::nullopt);
}

ReceiveFilter constrained_mmse_filter(int k, const SignatureSet& signatures,
                                      const Eigen::VectorXd& powers, const NoiseModel& noise) {
    Eigen::MatrixXd cov = data_covariance(signatures, powers, noise);
    cov.diagonal().array() += noise.regularization;
    return constrained_filter_from(cov, isi_nuller_basis(k, signatures), k, signatures,
                                   FilterKind::ConstrainedLinear);
}

ReceiveFilter mmse_filter(int k, const SignatureSet& signatures, const Eigen::VectorXd& powers,
                          const NoiseModel& noise) {
    Eigen::MatrixXd cov = data_covariance(signatures, powers, noise);
    cov.diagonal().array() += noise.regularization;
    return mmse_filter_from(cov, k, signatures, FilterKind::LinearMMSE);
}

Eigen::MatrixXd sic_interference_matrix(int k, const SignatureSet& signatures,
                                        const Eigen::VectorXd& powers, const NoiseModel& noise) {
    const int rank_k = signatures.sic_rank[static_cast<size_t>(k)];
    Eigen::MatrixXd M = noise.covariance;
    for (int i = 0; i < signatures.size(); ++i) {
        const auto& u = signatures.users[static_cast<size_t>(i)];
        const double p = powers[i];
        const Eigen::VectorXd& hf = u.window(+1);
        M.noalias() += p * (hf * hf.transpose());
        if (signatures.sic_rank[static_cast<size_t>(i)] >= rank_k) {
            for (int w = 0; w < 3; ++w) {  // j = -2, -1, 0
                const Eigen::VectorXd& h = u.windows[static_cast<size_t>(w)];
                M.noalias() += p * (h * h.transpose());
            }
        }
    }
    return M;
}

ReceiveFilter constrained_sic_filter(int k, const SignatureSet& signatures,
                                     const Eigen::VectorXd& powers, const NoiseModel& noise) {
    Eigen::MatrixXd cov = sic_interference_matrix(k, signatures, powers, noise);
    cov.diagonal().array() += noise.regularization;
    return constrained_filter_from(cov, isi_nuller_basis(k, signatures), k, signatures,
                                   FilterKind::ConstrainedSic);
}

ReceiveFilter sic_mmse_filter(int k, const SignatureSet& signatures, const Eigen::VectorXd& powers,
                              const NoiseModel& noise) {
    Eigen::MatrixXd cov = sic_interference_matrix(k, signatures, powers, noise);
    cov.diagonal().array() += noise.regularization;
    return mmse_filter_from(cov, k, signatures, FilterKind::SicMMSE);
}

double mmse_sinr_closed_form(const Eigen::MatrixXd& cov_reg, int k, const SignatureSet& signatures,
                             double own_power) {
    const Eigen::VectorXd& h0 = main_window(signatures, k);
    const Eigen::VectorXd q = spd_solve(cov_reg, h0);
    const double beta = h0.dot(q);
    return own_power * beta * beta / (beta - own_power * beta * beta);
}

}  // namespace eecdma
