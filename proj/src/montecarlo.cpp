#include "eecdma/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "eecdma/scenario.hpp"

namespace eecdma {

FrameSamples simulate_frames(const SignatureSet& signatures, const NoiseModel& noise,
                             const Eigen::VectorXd& powers, int frames, Rng& rng) {
    if (frames < 1) throw std::invalid_argument("simulate_frames: frames must be >= 1");
    const int K = signatures.size();
    const int n = signatures.window_len;

    Eigen::LLT<Eigen::MatrixXd> llt(noise.regularized());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("simulate_frames: noise covariance factorization failed");
    }
    const Eigen::MatrixXd L = llt.matrixL();

    std::vector<double> amp(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) amp[static_cast<size_t>(k)] = std::sqrt(powers[k]);

    FrameSamples out;
    out.y.resize(n, frames);
    out.symbols.resize(4 * K, frames);
    Eigen::VectorXd z(n);
    for (int f = 0; f < frames; ++f) {
        // Draw order is pinned: symbols (user-major, window-minor), then noise.
        for (int k = 0; k < K; ++k) {
            for (int w = 0; w < 4; ++w) out.symbols(4 * k + w, f) = rng.sign();
        }
        for (int i = 0; i < n; ++i) z[i] = rng.normal();

        Eigen::VectorXd y = L * z;
        for (int k = 0; k < K; ++k) {
            for (int w = 0; w < 4; ++w) {
                y.noalias() += amp[static_cast<size_t>(k)] * out.symbols(4 * k + w, f) *
                               signatures.users[static_cast<size_t>(k)].windows[static_cast<size_t>(w)];
            }
        }
        out.y.col(f) = y;
    }
    return out;
}

namespace {

struct TrialOutcome {
    bool converged = false;
    Eigen::VectorXd utilities;
    Eigen::VectorXd powers;
    std::vector<bool> at_max;
};

}  // namespace

SweepSummary run_sweep(const SweepSpec& spec) {
    if (spec.trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
    if (spec.kinds.empty() || spec.user_counts.empty()) {
        throw std::invalid_argument("run_sweep: kinds and user counts must be non-empty");
    }
    for (int K : spec.user_counts) {
        if (K < 1) throw std::invalid_argument("run_sweep: K must be >= 1");
    }

    const SystemConfig& cfg = spec.config;
    const PulseAutocorrelation rho(cfg.pulse());
    const NoiseModel noise = noise_covariance(cfg);
    const int n_kinds = static_cast<int>(spec.kinds.size());
    const int n_counts = static_cast<int>(spec.user_counts.size());
    const long n_jobs = static_cast<long>(n_counts) * spec.trials;

    // Every (K, trial) job is pure and owns its scenario substream; results
    // land in a slot array so the reduction order is canonical regardless of
    // which worker ran which job.
    std::vector<std::vector<TrialOutcome>> slots(static_cast<size_t>(n_jobs));
    std::atomic<long> next_job{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        while (true) {
            const long job = next_job.fetch_add(1);
            if (job >= n_jobs || failed.load()) break;
            const int ki = static_cast<int>(job / spec.trials);
            const auto trial = static_cast<std::uint64_t>(job % spec.trials);
            const int K = spec.user_counts[static_cast<size_t>(ki)];
            try {
                SignatureSet sig;
                bool ok = false;
                for (std::uint64_t retry = 0; retry < 100; ++retry) {
                    const UserScenario sc = draw_scenario(cfg, K, trial, retry);
                    sig = build_signatures(sc, cfg, rho);
                    ok = true;
                    for (const auto& u : sig.users) {
                        if (!(u.main_norm > 0.0)) {
                            ok = false;
                            break;
                        }
                    }
                    if (ok) break;
                }
                if (!ok) {
                    throw ScenarioRedrawExhausted("run_sweep: 100 degenerate draws for one trial");
                }
                const GameEngine engine(std::move(sig), noise, cfg);
                auto& slot = slots[static_cast<size_t>(job)];
                slot.resize(static_cast<size_t>(n_kinds));
                for (int gi = 0; gi < n_kinds; ++gi) {
                    const EquilibriumResult res = engine.run(spec.kinds[static_cast<size_t>(gi)]);
                    TrialOutcome& t = slot[static_cast<size_t>(gi)];
                    t.converged = res.converged;
                    t.utilities = res.utilities;
                    t.powers = res.powers;
                    t.at_max = res.at_max;
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failure = e.what();
                failed.store(true);
                break;
            }
        }
    };

    int workers = spec.workers;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = static_cast<int>(std::min<long>(workers, n_jobs));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw std::runtime_error("run_sweep: " + failure);

    // Canonical reduction: (kind, K, trial, user).
    SweepSummary summary;
    summary.seed = cfg.seed;
    for (int gi = 0; gi < n_kinds; ++gi) {
        for (int ki = 0; ki < n_counts; ++ki) {
            const int K = spec.user_counts[static_cast<size_t>(ki)];
            double sum_utility = 0.0;
            double sum_power = 0.0;
            long at_max_count = 0;
            long users_pooled = 0;
            long nonconverged = 0;
            for (int trial = 0; trial < spec.trials; ++trial) {
                const long job = static_cast<long>(ki) * spec.trials + trial;
                const TrialOutcome& t = slots[static_cast<size_t>(job)][static_cast<size_t>(gi)];
                if (!t.converged) {
                    ++nonconverged;
                    continue;
                }
                for (int k = 0; k < K; ++k) {
                    sum_utility += t.utilities[k];
                    sum_power += t.powers[k];
                    at_max_count += t.at_max[static_cast<size_t>(k)] ? 1 : 0;
                }
                users_pooled += K;
            }
            SweepRow row;
            row.kind = spec.kinds[static_cast<size_t>(gi)];
            row.K = K;
            row.trials = spec.trials;
            row.nonconverged = nonconverged;
            if (users_pooled > 0) {
                row.mean_utility = sum_utility / static_cast<double>(users_pooled);
                row.mean_power_linear = sum_power / static_cast<double>(users_pooled);
                row.mean_power_db = 10.0 * std::log10(row.mean_power_linear);
                row.frac_at_max =
                    static_cast<double>(at_max_count) / static_cast<double>(users_pooled);
            } else {
                row.mean_utility = std::numeric_limits<double>::quiet_NaN();
                row.mean_power_linear = std::numeric_limits<double>::quiet_NaN();
                row.mean_power_db = std::numeric_limits<double>::quiet_NaN();
                row.frac_at_max = std::numeric_limits<double>::quiet_NaN();
            }
            summary.rows.push_back(row);
        }
    }
    return summary;
}

}  // namespace eecdma
