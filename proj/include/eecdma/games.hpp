#ifndef EECDMA_GAMES_HPP
#define EECDMA_GAMES_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eecdma/receivers.hpp"

namespace eecdma {

/// Smooth packet-success surrogate f(g) = (1 - e^{-g/2})^B.
struct EfficiencyFunction {
    int B = 120;

    double value(double gamma) const;
    double derivative(double gamma) const;
};

/// True BPSK packet-success probability [1 - Q(sqrt(2g))]^B.
double packet_success(double gamma, int B);

/// Unique positive solution of f(g) = g f'(g), i.e. e^{g/2} = 1 + (B/2) g.
double common_target_sinr(const EfficiencyFunction& f, const Tolerances& tol = {});

/**
 * Matched-filter target SINR: unique root of
 * (B/(2a)) g (a - b g) = e^{g/2} - 1 on (0, a/b), a = ||h0||^4,
 * b = sum_{j!=0} (h0^T h_j)^2. Throws NoSignChange if the bracket degenerates
 * (extreme self-ISI); that is reported, never silently capped.
 */
double mf_target_sinr(double a, double b, const EfficiencyFunction& f,
                      const Tolerances& tol = {});

enum class GameKind { MF, LinearConstrained, LinearMMSE, SicConstrained, SicMMSE };

constexpr const char* to_string(GameKind kind) {
    switch (kind) {
        case GameKind::MF: return "mf";
        case GameKind::LinearConstrained: return "linear-constrained";
        case GameKind::LinearMMSE: return "linear-mmse";
        case GameKind::SicConstrained: return "sic-constrained";
        case GameKind::SicMMSE: return "sic-mmse";
    }
    return "?";
}

std::optional<GameKind> game_kind_from_string(std::string_view token);

constexpr bool is_sic(GameKind kind) {
    return kind == GameKind::SicConstrained || kind == GameKind::SicMMSE;
}
constexpr bool is_unconstrained(GameKind kind) {
    return kind == GameKind::LinearMMSE || kind == GameKind::SicMMSE;
}

/// Utility u = scale * f(gamma) / power (bits/Joule up to the scale factor).
double utility(const EfficiencyFunction& f, double gamma, double power, double scale);

struct BestResponse {
    double power = 0.0;
    ReceiveFilter filter;
    bool at_max = false;
    /// Relative residual of f(g) = f'(g) g'(p) p at the returned power
    /// (unconstrained kinds only; NaN otherwise).
    double stationarity_residual = 0.0;
};

struct EquilibriumResult {
    Eigen::VectorXd powers;
    std::vector<ReceiveFilter> filters;
    Eigen::VectorXd sinrs;
    Eigen::VectorXd utilities;
    Eigen::VectorXd targets;  // per-user target SINR; NaN for unconstrained kinds
    std::vector<bool> at_max;
    int iterations = 0;
    bool converged = false;
    std::vector<double> sweep_deltas;  // max relative power change per sweep
    std::vector<double> stationarity_residuals;
};

/**
 * Best-response solver for one scenario. Immutable after construction;
 * safe to use from multiple threads, one engine per scenario.
 *
 * Per-user caches: ISI nuller bases, window Gram matrices (so covariance
 * assembly inside the power line search is an axpy, not 4K outer products),
 * and the power-independent matched-filter targets.
 */
class GameEngine {
public:
    GameEngine(SignatureSet signatures, NoiseModel noise, SystemConfig config);

    BestResponse best_response(GameKind kind, int k, const Eigen::VectorXd& powers) const;

    /// Gauss-Seidel best-response sweeps from p = Pmax*1e-3 until the max
    /// relative power change drops below power_rel_tol or max_sweeps is hit.
    EquilibriumResult run(GameKind kind) const;

    /// Utility of user k at a deviated own power (others fixed), with the
    /// user's own filter re-optimized for the kind. Nash deviation probe.
    double utility_at(GameKind kind, int k, double own_power,
                      const Eigen::VectorXd& powers) const;

    double common_target() const { return common_target_; }
    double mf_target(int k) const { return mf_targets_[static_cast<size_t>(k)]; }

    const SignatureSet& signatures() const { return signatures_; }
    const NoiseModel& noise() const { return noise_; }
    const SystemConfig& config() const { return config_; }
    const EfficiencyFunction& efficiency() const { return eff_; }

    /// Interference covariance seen by user k (own power excluded), plus the
    /// own-power Gram direction; cov(p_k) = base + p_k * own_gram.
    Eigen::MatrixXd covariance_base(GameKind kind, int k, const Eigen::VectorXd& powers) const;
    const Eigen::MatrixXd& own_gram(int k) const { return gram_all_[static_cast<size_t>(k)]; }

private:
    BestResponse best_response_mf(int k, const Eigen::VectorXd& powers) const;
    BestResponse best_response_constrained(GameKind kind, int k,
                                           const Eigen::VectorXd& powers) const;
    BestResponse best_response_mmse(GameKind kind, int k, const Eigen::VectorXd& powers) const;

    SignatureSet signatures_;
    NoiseModel noise_;
    SystemConfig config_;
    EfficiencyFunction eff_;
    double common_target_ = 0.0;
    std::vector<double> mf_targets_;  // NaN marks a degenerate target bracket
    std::vector<Eigen::MatrixXd> isi_bases_;
    std::vector<Eigen::MatrixXd> gram_all_;     // sum over all four windows
    std::vector<Eigen::MatrixXd> gram_future_;  // h_{k,1} h_{k,1}^T
    std::vector<Eigen::MatrixXd> gram_past0_;   // windows j in {-2,-1,0}
    Eigen::MatrixXd noise_reg_;
    // matched-filter bookkeeping: (h_{k,0}^T h_{i,w})^2, h0^T M h0, b_k
    std::vector<std::vector<double>> mf_cross_sq_;
    std::vector<double> mf_noise_quad_;
    std::vector<double> mf_self_sq_;
};

/// Draw-and-solve convenience wrapper over GameEngine.
EquilibriumResult run_game(GameKind kind, const UserScenario& scenario,
                           const SystemConfig& config);

}  // namespace eecdma

#endif  // EECDMA_GAMES_HPP
