#include "eecdma/games.hpp"

#include <cmath>
#include <limits>

namespace eecdma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_packet_length(int B) {
    if (B < 2) throw std::invalid_argument("efficiency function requires B >= 2");
}

Tolerances target_tolerances(const Tolerances& tol) {
    // The target equations are solved in a transformed form whose slope at
    // the root ranges from ~0.8 (B=2) to ~e^{g/2}/2; driving the bracket a
    // few ulps wide keeps the defining-equation residual at the FP floor.
    Tolerances t = tol;
    t.root_abs = std::min(tol.root_abs, 1e-14);
    t.residual_abs = std::min(tol.residual_abs, 1e-12);
    t.max_iter = std::max(tol.max_iter, 200);
    return t;
}

}  // namespace

double EfficiencyFunction::value(double gamma) const {
    return std::pow(1.0 - std::exp(-0.5 * gamma), B);
}

double EfficiencyFunction::derivative(double gamma) const {
    const double e = std::exp(-0.5 * gamma);
    return 0.5 * B * e * std::pow(1.0 - e, B - 1);
}

double packet_success(double gamma, int B) {
    const double q = 0.5 * std::erfc(std::sqrt(gamma));  // Q(sqrt(2*gamma))
    return std::pow(1.0 - q, B);
}

double common_target_sinr(const EfficiencyFunction& f, const Tolerances& tol) {
    require_packet_length(f.B);
    const double halfB = 0.5 * f.B;
    auto g = [halfB](double x) { return std::expm1(0.5 * x) - halfB * x; };
    return bisect_root(g, ScalarBracket{1e-6, 200.0}, target_tolerances(tol));
}

double mf_target_sinr(double a, double b, const EfficiencyFunction& f, const Tolerances& tol) {
    require_packet_length(f.B);
    if (!(a > 0.0) || b < 0.0) throw std::invalid_argument("mf_target_sinr: need a > 0, b >= 0");
    const double halfB = 0.5 * f.B;
    const double ratio = b / a;
    auto g = [halfB, ratio](double x) { return halfB * x * (1.0 - ratio * x) - std::expm1(0.5 * x); };
    const double hi = (b > 0.0) ? std::min(a / b, 200.0) : 200.0;
    const double lo = 1e-6;
    if (!(hi > lo)) {
        throw NoSignChange("mf_target_sinr: bracket degenerate (severe self-ISI)");
    }
    return bisect_root(g, ScalarBracket{lo, hi}, target_tolerances(tol));
}

std::optional<GameKind> game_kind_from_string(std::string_view token) {
    for (GameKind k : {GameKind::MF, GameKind::LinearConstrained, GameKind::LinearMMSE,
                       GameKind::SicConstrained, GameKind::SicMMSE}) {
        if (token == to_string(k)) return k;
    }
    return std::nullopt;
}

double utility(const EfficiencyFunction& f, double gamma, double power, double scale) {
    if (!(power > 0.0)) throw ZeroPower("utility: power must be positive");
    return scale * f.value(gamma) / power;
}

GameEngine::GameEngine(SignatureSet signatures, NoiseModel noise, SystemConfig config)
    : signatures_(std::move(signatures)),
      noise_(std::move(noise)),
      config_(std::move(config)),
      eff_{config_.B} {
    const int K = signatures_.size();
    const int n = signatures_.window_len;
    common_target_ = common_target_sinr(eff_, config_.tol);
    noise_reg_ = noise_.regularized();

    isi_bases_.reserve(static_cast<size_t>(K));
    gram_all_.reserve(static_cast<size_t>(K));
    gram_future_.reserve(static_cast<size_t>(K));
    gram_past0_.reserve(static_cast<size_t>(K));
    mf_targets_.assign(static_cast<size_t>(K), kNaN);
    mf_cross_sq_.assign(static_cast<size_t>(K), std::vector<double>(static_cast<size_t>(4 * K)));
    mf_noise_quad_.assign(static_cast<size_t>(K), 0.0);
    mf_self_sq_.assign(static_cast<size_t>(K), 0.0);

    for (int k = 0; k < K; ++k) {
        const auto& u = signatures_.users[static_cast<size_t>(k)];
        Eigen::MatrixXd all = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd past0 = Eigen::MatrixXd::Zero(n, n);
        for (int w = 0; w < 4; ++w) {
            const Eigen::VectorXd& h = u.windows[static_cast<size_t>(w)];
            all.noalias() += h * h.transpose();
            if (w < 3) past0.noalias() += h * h.transpose();
        }
        const Eigen::VectorXd& hf = u.window(+1);
        gram_all_.push_back(all);
        gram_past0_.push_back(past0);
        gram_future_.push_back(hf * hf.transpose());
        isi_bases_.push_back(isi_nuller_basis(k, signatures_));

        const Eigen::VectorXd& h0 = u.window(0);
        mf_noise_quad_[static_cast<size_t>(k)] = h0.dot(noise_.covariance * h0);
        for (int i = 0; i < K; ++i) {
            for (int w = 0; w < 4; ++w) {
                const double c = h0.dot(
                    signatures_.users[static_cast<size_t>(i)].windows[static_cast<size_t>(w)]);
                mf_cross_sq_[static_cast<size_t>(k)][static_cast<size_t>(4 * i + w)] = c * c;
            }
        }
        double b = 0.0;
        for (int w = 0; w < 4; ++w) {
            if (w == 2) continue;
            b += mf_cross_sq_[static_cast<size_t>(k)][static_cast<size_t>(4 * k + w)];
        }
        mf_self_sq_[static_cast<size_t>(k)] = b;
        if (u.main_norm > 0.0) {
            const double a = std::pow(u.main_norm, 4);
            try {
                mf_targets_[static_cast<size_t>(k)] = mf_target_sinr(a, b, eff_, config_.tol);
            } catch (const NoSignChange&) {
                // Left NaN; surfaces as NoSignChange if the MF game touches it.
            }
        }
    }
}

Eigen::MatrixXd GameEngine::covariance_base(GameKind kind, int k,
                                            const Eigen::VectorXd& powers) const {
    Eigen::MatrixXd cov = noise_reg_;
    const int K = signatures_.size();
    if (!is_sic(kind)) {
        for (int i = 0; i < K; ++i) {
            if (i == k) continue;
            cov.noalias() += powers[i] * gram_all_[static_cast<size_t>(i)];
        }
    } else {
        const int rank_k = signatures_.sic_rank[static_cast<size_t>(k)];
        for (int i = 0; i < K; ++i) {
            if (i == k) continue;
            cov.noalias() += powers[i] * gram_future_[static_cast<size_t>(i)];
            if (signatures_.sic_rank[static_cast<size_t>(i)] >= rank_k) {
                cov.noalias() += powers[i] * gram_past0_[static_cast<size_t>(i)];
            }
        }
    }
    return cov;
}

BestResponse GameEngine::best_response_mf(int k, const Eigen::VectorXd& powers) const {
    const auto& u = signatures_.users[static_cast<size_t>(k)];
    if (!(u.main_norm > 0.0)) throw ZeroSignature("best_response: zero signature");
    const double target = mf_targets_[static_cast<size_t>(k)];
    if (std::isnan(target)) {
        throw NoSignChange("best_response: matched-filter target equation has no bracket");
    }
    const double a = std::pow(u.main_norm, 4);
    const double b = mf_self_sq_[static_cast<size_t>(k)];
    double c = mf_noise_quad_[static_cast<size_t>(k)];
    for (int i = 0; i < signatures_.size(); ++i) {
        if (i == k) continue;
        double s = 0.0;
        for (int w = 0; w < 4; ++w) {
            s += mf_cross_sq_[static_cast<size_t>(k)][static_cast<size_t>(4 * i + w)];
        }
        c += powers[i] * s;
    }
    // gamma(p) = p*a / (c + p*b); solve gamma(p) = target.
    const double p_bar = target * c / (a - b * target);
    BestResponse br;
    br.at_max = !(p_bar < config_.Pmax);
    br.power = br.at_max ? config_.Pmax : p_bar;
    br.filter = matched_filter(k, signatures_);
    br.stationarity_residual = kNaN;
    return br;
}

BestResponse GameEngine::best_response_constrained(GameKind kind, int k,
                                                   const Eigen::VectorXd& powers) const {
    Eigen::MatrixXd cov = covariance_base(kind, k, powers);
    cov.noalias() += powers[k] * gram_all_[static_cast<size_t>(k)];
    const FilterKind fk =
        (kind == GameKind::SicConstrained) ? FilterKind::ConstrainedSic : FilterKind::ConstrainedLinear;
    BestResponse br;
    br.filter = constrained_filter_from(cov, isi_bases_[static_cast<size_t>(k)], k, signatures_, fk);
    const SinrBreakdown now = (kind == GameKind::SicConstrained)
                                  ? sinr_sic(br.filter, k, signatures_, powers, noise_)
                                  : sinr_linear(br.filter, k, signatures_, powers, noise_);
    // SINR is proportional to own power with the filter fixed.
    if (now.sinr > 0.0 && std::isfinite(now.sinr)) {
        const double p_bar = powers[k] * common_target_ / now.sinr;
        br.at_max = !(p_bar < config_.Pmax);
        br.power = br.at_max ? config_.Pmax : p_bar;
    } else {
        br.at_max = true;
        br.power = config_.Pmax;
    }
    br.stationarity_residual = kNaN;
    return br;
}

BestResponse GameEngine::best_response_mmse(GameKind kind, int k,
                                            const Eigen::VectorXd& powers) const {
    const Eigen::MatrixXd base = covariance_base(kind, k, powers);
    const Eigen::MatrixXd& gram = gram_all_[static_cast<size_t>(k)];
    const Eigen::VectorXd& h0 = signatures_.users[static_cast<size_t>(k)].window(0);

    auto sinr_at = [&](double p) {
        Eigen::MatrixXd cov = base;
        cov.noalias() += p * gram;
        const Eigen::VectorXd q = spd_solve(cov, h0);
        const double beta = h0.dot(q);
        return p * beta * beta / (beta - p * beta * beta);
    };

    const double p_lo = config_.Pmax * 1e-9;  // p = 0 is an indeterminate 0/0 limit
    const double lx_lo = std::log(p_lo);
    const double lx_hi = std::log(config_.Pmax);
    auto util = [&](double lx) {
        const double p = std::exp(lx);
        return eff_.value(sinr_at(p)) / p;
    };
    const MaxResult best = maximize_1d(util, lx_lo, lx_hi, config_.tol);

    BestResponse br;
    br.at_max = (best.argmax == lx_hi);
    br.power = br.at_max ? config_.Pmax : std::min(std::exp(best.argmax), config_.Pmax);

    Eigen::MatrixXd cov = base;
    cov.noalias() += br.power * gram;
    const FilterKind fk = (kind == GameKind::SicMMSE) ? FilterKind::SicMMSE : FilterKind::LinearMMSE;
    br.filter = mmse_filter_from(cov, k, signatures_, fk);

    // Stationarity residual of f(g(p)) = f'(g(p)) g'(p) p, central differences.
    const double p = br.power;
    const double dp = p * 1e-5;
    const double g0 = sinr_at(p);
    const double gp = (sinr_at(p + dp) - sinr_at(p - dp)) / (2.0 * dp);
    const double f0 = eff_.value(g0);
    br.stationarity_residual = std::abs(f0 - eff_.derivative(g0) * gp * p) / std::max(f0, 1e-300);
    return br;
}

BestResponse GameEngine::best_response(GameKind kind, int k, const Eigen::VectorXd& powers) const {
    switch (kind) {
        case GameKind::MF:
            return best_response_mf(k, powers);
        case GameKind::LinearConstrained:
        case GameKind::SicConstrained:
            return best_response_constrained(kind, k, powers);
        case GameKind::LinearMMSE:
        case GameKind::SicMMSE:
            return best_response_mmse(kind, k, powers);
    }
    throw std::logic_error("unknown game kind");
}

EquilibriumResult GameEngine::run(GameKind kind) const {
    const int K = signatures_.size();
    EquilibriumResult result;
    result.powers = Eigen::VectorXd::Constant(K, config_.Pmax * 1e-3);

    std::vector<int> order(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) order[static_cast<size_t>(k)] = k;
    if (is_sic(kind)) order = signatures_.sic_order;

    for (int sweep = 1; sweep <= config_.max_sweeps; ++sweep) {
        double max_rel = 0.0;
        for (int k : order) {
            const BestResponse br = best_response(kind, k, result.powers);
            max_rel = std::max(max_rel, std::abs(br.power - result.powers[k]) / result.powers[k]);
            result.powers[k] = br.power;
        }
        result.sweep_deltas.push_back(max_rel);
        result.iterations = sweep;
        if (max_rel <= config_.power_rel_tol) {
            result.converged = true;
            break;
        }
    }

    // Damped fixed-point signature: the trailing deltas of a converged run
    // must be non-increasing, otherwise flag the run as non-converged.
    if (result.converged && result.sweep_deltas.size() >= 2) {
        const size_t tail = std::min<size_t>(10, result.sweep_deltas.size());
        for (size_t i = result.sweep_deltas.size() - tail; i + 1 < result.sweep_deltas.size(); ++i) {
            if (result.sweep_deltas[i + 1] > result.sweep_deltas[i]) {
                result.converged = false;
                break;
            }
        }
    }

    // Final snapshot at the converged powers.
    result.filters.resize(static_cast<size_t>(K));
    result.sinrs.resize(K);
    result.utilities.resize(K);
    result.targets.resize(K);
    result.at_max.assign(static_cast<size_t>(K), false);
    result.stationarity_residuals.assign(static_cast<size_t>(K), kNaN);
    for (int k = 0; k < K; ++k) {
        switch (kind) {
            case GameKind::MF:
                result.filters[static_cast<size_t>(k)] = matched_filter(k, signatures_);
                result.targets[k] = mf_targets_[static_cast<size_t>(k)];
                break;
            case GameKind::LinearConstrained:
            case GameKind::SicConstrained: {
                Eigen::MatrixXd cov = covariance_base(kind, k, result.powers);
                cov.noalias() += result.powers[k] * gram_all_[static_cast<size_t>(k)];
                const FilterKind fk = (kind == GameKind::SicConstrained)
                                          ? FilterKind::ConstrainedSic
                                          : FilterKind::ConstrainedLinear;
                result.filters[static_cast<size_t>(k)] =
                    constrained_filter_from(cov, isi_bases_[static_cast<size_t>(k)], k, signatures_, fk);
                result.targets[k] = common_target_;
                break;
            }
            case GameKind::LinearMMSE:
            case GameKind::SicMMSE: {
                Eigen::MatrixXd cov = covariance_base(kind, k, result.powers);
                cov.noalias() += result.powers[k] * gram_all_[static_cast<size_t>(k)];
                const FilterKind fk =
                    (kind == GameKind::SicMMSE) ? FilterKind::SicMMSE : FilterKind::LinearMMSE;
                result.filters[static_cast<size_t>(k)] = mmse_filter_from(cov, k, signatures_, fk);
                result.targets[k] = kNaN;
                break;
            }
        }
        const SinrBreakdown sb = is_sic(kind)
                                     ? sinr_sic(result.filters[static_cast<size_t>(k)], k,
                                                signatures_, result.powers, noise_)
                                     : sinr_linear(result.filters[static_cast<size_t>(k)], k,
                                                   signatures_, result.powers, noise_);
        result.sinrs[k] = sb.sinr;
        result.utilities[k] = utility(eff_, sb.sinr, result.powers[k], config_.utility_scale);
        result.at_max[static_cast<size_t>(k)] = (result.powers[k] == config_.Pmax);
    }

    // Stationarity diagnostics at the final profile (unconstrained kinds).
    if (is_unconstrained(kind)) {
        for (int k = 0; k < K; ++k) {
            const BestResponse br = best_response(kind, k, result.powers);
            result.stationarity_residuals[static_cast<size_t>(k)] = br.stationarity_residual;
        }
    }
    return result;
}

double GameEngine::utility_at(GameKind kind, int k, double own_power,
                              const Eigen::VectorXd& powers) const {
    if (!(own_power > 0.0)) throw ZeroPower("utility_at: power must be positive");
    Eigen::VectorXd p = powers;
    p[k] = own_power;

    ReceiveFilter filter;
    switch (kind) {
        case GameKind::MF:
            filter = matched_filter(k, signatures_);
            break;
        case GameKind::LinearConstrained:
        case GameKind::SicConstrained: {
            Eigen::MatrixXd cov = covariance_base(kind, k, p);
            cov.noalias() += own_power * gram_all_[static_cast<size_t>(k)];
            const FilterKind fk = (kind == GameKind::SicConstrained)
                                      ? FilterKind::ConstrainedSic
                                      : FilterKind::ConstrainedLinear;
            filter = constrained_filter_from(cov, isi_bases_[static_cast<size_t>(k)], k, signatures_, fk);
            break;
        }
        case GameKind::LinearMMSE:
        case GameKind::SicMMSE: {
            Eigen::MatrixXd cov = covariance_base(kind, k, p);
            cov.noalias() += own_power * gram_all_[static_cast<size_t>(k)];
            const FilterKind fk =
                (kind == GameKind::SicMMSE) ? FilterKind::SicMMSE : FilterKind::LinearMMSE;
            filter = mmse_filter_from(cov, k, signatures_, fk);
            break;
        }
    }
    const SinrBreakdown sb = is_sic(kind) ? sinr_sic(filter, k, signatures_, p, noise_)
                                          : sinr_linear(filter, k, signatures_, p, noise_);
    return utility(eff_, sb.sinr, own_power, config_.utility_scale);
}

EquilibriumResult run_game(GameKind kind, const UserScenario& scenario,
                           const SystemConfig& config) {
    SignatureSet sig = build_signatures(scenario, config);
    NoiseModel noise = noise_covariance(config);
    return GameEngine(std::move(sig), std::move(noise), config).run(kind);
}

}  // namespace eecdma
