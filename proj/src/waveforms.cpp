#include "eecdma/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eecdma/rng.hpp"

namespace eecdma {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Standard SRRC formula centered at 0, 1/sqrt(Tc) amplitude scale, with the
// two removable singularities (x = 0 and |x| = Tc/(4a)) evaluated by limit.
double srrc_centered(double rolloff, double Tc, double x) {
    const double a = rolloff;
    const double u = x / Tc;
    const double scale = 1.0 / std::sqrt(Tc);
    if (std::abs(u) < 1e-8) {
        return scale * (1.0 - a + 4.0 * a / kPi);
    }
    if (a > 0.0 && std::abs(std::abs(u) - 1.0 / (4.0 * a)) < 1e-8) {
        const double s = std::sin(kPi / (4.0 * a));
        const double c = std::cos(kPi / (4.0 * a));
        return scale * (a / std::sqrt(2.0)) * ((1.0 + 2.0 / kPi) * s + (1.0 - 2.0 / kPi) * c);
    }
    const double num = std::sin(kPi * u * (1.0 - a)) + 4.0 * a * u * std::cos(kPi * u * (1.0 + a));
    const double den = kPi * u * (1.0 - 16.0 * a * a * u * u);
    return scale * num / den;
}

double half_support(const PulseSpec& spec) {
    return 0.5 * spec.support_chips * spec.chip_interval;  // 2*Tc for the default
}

// Trapezoidal quadrature of f over [-T, T] sampled at the fine grid.
template <typename F>
double trapezoid_fine(const PulseSpec& spec, F&& f) {
    const double T = half_support(spec);
    const int n = spec.support_chips * spec.fine_grid_per_chip;  // intervals
    const double dt = 2.0 * T / n;
    double acc = 0.5 * (f(-T) + f(T));
    for (int i = 1; i < n; ++i) acc += f(-T + i * dt);
    return acc * dt;
}

}  // namespace

double srrc_truncated_energy(const PulseSpec& spec) {
    return trapezoid_fine(spec, [&](double x) {
        const double v = srrc_centered(spec.rolloff, spec.chip_interval, x);
        return v * v;
    });
}

double srrc_value(const PulseSpec& spec, double t) {
    const double Tc = spec.chip_interval;
    const double lo = 0.0;
    const double hi = spec.support_chips * Tc;
    if (t < lo || t > hi) return 0.0;
    const double scale = 1.0 / std::sqrt(srrc_truncated_energy(spec));
    return scale * srrc_centered(spec.rolloff, Tc, t - 0.5 * hi);
}

PulseAutocorrelation::PulseAutocorrelation(const PulseSpec& spec) : spec_(spec) {
    const double T = half_support(spec);
    const int n = spec.support_chips * spec.fine_grid_per_chip;  // intervals over [-T, T]
    step_ = 2.0 * T / n;
    tau_max_ = 2.0 * T;

    std::vector<double> h(static_cast<size_t>(n + 1));
    for (int i = 0; i <= n; ++i) {
        h[static_cast<size_t>(i)] = srrc_centered(spec.rolloff, spec.chip_interval, -T + i * step_);
    }

    // rho(j*step) = integral of h(t) h(t + j*step); aligned grids make the
    // shifted factor exact. Normalizing by rho(0) pins rho(0) = 1 and makes
    // the pulse unit-energy in the same trapezoidal measure.
    samples_.assign(static_cast<size_t>(n + 1), 0.0);
    for (int j = 0; j <= n; ++j) {
        const int m = n - j;  // overlap interval count
        double acc = 0.5 * (h[0] * h[static_cast<size_t>(j)] +
                            h[static_cast<size_t>(m)] * h[static_cast<size_t>(n)]);
        for (int i = 1; i < m; ++i) {
            acc += h[static_cast<size_t>(i)] * h[static_cast<size_t>(i + j)];
        }
        samples_[static_cast<size_t>(j)] = (m > 0) ? acc * step_ : 0.0;
    }
    const double e0 = samples_[0];
    for (auto& s : samples_) s /= e0;
}

double PulseAutocorrelation::operator()(double tau) const {
    const double a = std::abs(tau);
    if (a >= tau_max_) return 0.0;
    const double pos = a / step_;
    const auto idx = static_cast<size_t>(pos);
    if (idx + 1 >= samples_.size()) return 0.0;
    const double frac = pos - static_cast<double>(idx);
    return samples_[idx] * (1.0 - frac) + samples_[idx + 1] * frac;
}

PulseAutocorrelation pulse_autocorrelation(const PulseSpec& spec) {
    return PulseAutocorrelation(spec);
}

SpreadingCode make_code(std::uint64_t seed, int user, int N) {
    if (N < 1) throw std::invalid_argument("make_code: N must be >= 1");
    Rng rng(substream_seed(seed, 0x636f6465ULL, static_cast<std::uint64_t>(user)));
    const double mag = 1.0 / std::sqrt(static_cast<double>(N));
    SpreadingCode code;
    code.chips.resize(N);
    for (int n = 0; n < N; ++n) code.chips[n] = mag * rng.sign();
    return code;
}

UserSignature effective_signature(const SpreadingCode& code, const std::vector<PathTap>& paths,
                                  const PulseAutocorrelation& rho, double Tb, int Mos) {
    for (const auto& p : paths) {
        if (!(p.delay >= 0.0) || !(p.delay < Tb)) {
            throw DelayOutOfRange("effective_signature: path delay outside [0, Tb)");
        }
    }
    const int N = code.length();
    const double Tc = rho.spec().chip_interval;
    const int n_samples = 2 * Mos * N;
    const double dt = Tc / Mos;

    UserSignature sig;
    for (int w = 0; w < 4; ++w) {
        const int i = w - 2;
        Eigen::VectorXd& hv = sig.windows[static_cast<size_t>(w)];
        hv = Eigen::VectorXd::Zero(n_samples);
        for (int m = 0; m < n_samples; ++m) {
            const double t = m * dt - i * Tb;
            double acc = 0.0;
            for (const auto& p : paths) {
                for (int n = 0; n < N; ++n) {
                    acc += p.gain * code.chips[n] * rho(t - p.delay - n * Tc);
                }
            }
            hv[m] = acc;
        }
    }
    sig.main_norm = sig.window(0).norm();
    return sig;
}

SignatureSet sort_for_sic(SignatureSet set) {
    const int K = set.size();
    set.sic_order.resize(static_cast<size_t>(K));
    std::iota(set.sic_order.begin(), set.sic_order.end(), 0);
    std::stable_sort(set.sic_order.begin(), set.sic_order.end(), [&](int a, int b) {
        return set.users[static_cast<size_t>(a)].main_norm >
               set.users[static_cast<size_t>(b)].main_norm;
    });
    set.sic_rank.assign(static_cast<size_t>(K), 0);
    for (int r = 0; r < K; ++r) set.sic_rank[static_cast<size_t>(set.sic_order[static_cast<size_t>(r)])] = r;
    return set;
}

}  // namespace eecdma
