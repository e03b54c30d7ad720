#include "eecdma/numerics.hpp"

#include <cmath>

namespace eecdma {

namespace {

void validate(const Tolerances& tol) {
    if (!(tol.root_abs > 0.0) || !(tol.residual_abs > 0.0) || tol.max_iter <= 0) {
        throw std::invalid_argument("tolerances must be strictly positive");
    }
}

}  // namespace

double bisect_root(const std::function<double(double)>& g, ScalarBracket bracket,
                   const Tolerances& tol) {
    validate(tol);
    if (!(bracket.lo < bracket.hi)) {
        throw std::invalid_argument("bracket requires lo < hi");
    }
    double lo = bracket.lo;
    double hi = bracket.hi;
    double glo = g(lo);
    double ghi = g(hi);
    if (std::abs(glo) <= tol.residual_abs) return lo;
    if (std::abs(ghi) <= tol.residual_abs) return hi;
    if ((glo > 0.0) == (ghi > 0.0)) {
        throw NoSignChange("bisect_root: no sign change on bracket");
    }
    for (int it = 0; it < tol.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gmid = g(mid);
        if (std::abs(gmid) <= tol.residual_abs) return mid;
        if ((gmid > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gmid;
        } else {
            hi = mid;
        }
        if (hi - lo <= tol.root_abs) return 0.5 * (lo + hi);
    }
    throw MaxIterations("bisect_root: tolerance not reached");
}

MaxResult maximize_1d(const std::function<double(double)>& u, double lo, double hi,
                      const Tolerances& tol) {
    validate(tol);
    if (!(lo < hi)) {
        throw std::invalid_argument("maximize_1d requires lo < hi");
    }
    constexpr double invphi = 0.6180339887498949;    // (sqrt(5)-1)/2
    constexpr double invphi2 = 0.38196601125010515;  // invphi^2

    double a = lo;
    double b = hi;
    double h = b - a;
    double c = a + invphi2 * h;
    double d = a + invphi * h;
    double yc = u(c);
    double yd = u(d);

    bool localized = h <= tol.root_abs;
    for (int it = 0; it < tol.max_iter && !localized; ++it) {
        if (yc >= yd) {
            b = d;
            d = c;
            yd = yc;
            h = b - a;
            c = a + invphi2 * h;
            yc = u(c);
        } else {
            a = c;
            c = d;
            yc = yd;
            h = b - a;
            d = a + invphi * h;
            yd = u(d);
        }
        localized = h <= tol.root_abs;
    }
    if (!localized) throw MaxIterations("maximize_1d: interval not localized");

    // On a flat maximum the bracket placement is value-comparison noise, so
    // polish with parabolic vertex fits through well-separated points; their
    // noise scales like eps/(stencil * curvature) instead of
    // sqrt(eps / curvature). Shrinking the stencil removes the O(stencil^2)
    // model bias while the fit stays signal-dominated.
    double m = 0.5 * (a + b);
    for (const double frac : {1e-3, 3e-5, 1e-6}) {
        const double stencil = frac * (hi - lo);
        const double x0 = std::min(std::max(m, lo + stencil), hi - stencil);
        if (!(x0 - stencil >= lo) || !(x0 + stencil <= hi)) break;
        const double ul = u(x0 - stencil);
        const double um = u(x0);
        const double ur = u(x0 + stencil);
        const double concavity = ul - 2.0 * um + ur;
        if (!(concavity < 0.0)) break;
        double v = x0 + 0.5 * stencil * (ul - ur) / concavity;
        v = std::min(std::max(v, x0 - stencil), x0 + stencil);
        m = std::min(std::max(v, lo), hi);
    }

    // Endpoints win ties so boundary maxima (the power cap) are returned
    // bitwise exactly.
    MaxResult best{m, u(m)};
    const double at_lo = u(lo);
    const double at_hi = u(hi);
    if (at_lo >= best.max) best = {lo, at_lo};
    if (at_hi >= best.max) best = {hi, at_hi};
    return best;
}

Eigen::MatrixXd orth_complement_basis(const std::vector<Eigen::VectorXd>& vectors, int dim) {
    if (dim < 1) throw std::invalid_argument("orth_complement_basis: dim must be >= 1");
    for (const auto& v : vectors) {
        if (v.size() != dim) throw std::invalid_argument("orth_complement_basis: length mismatch");
    }

    double max_norm = 0.0;
    for (const auto& v : vectors) max_norm = std::max(max_norm, v.norm());
    const double rank_tol = 1e-12 * max_norm;

    // Orthonormal basis of span(vectors); two projection passes per column.
    std::vector<Eigen::VectorXd> span_basis;
    for (const auto& v : vectors) {
        Eigen::VectorXd r = v;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : span_basis) r -= (q.dot(r)) * q;
        }
        if (max_norm > 0.0 && r.norm() > rank_tol) {
            span_basis.push_back(r / r.norm());
        }
    }
    const int rank = static_cast<int>(span_basis.size());
    const int cols = dim - rank;

    // Pivoted Gram-Schmidt over the canonical basis: keep candidates updated
    // against everything accepted so far and take the largest residual next.
    std::vector<Eigen::VectorXd> cand(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        cand[static_cast<size_t>(i)] = Eigen::VectorXd::Unit(dim, i);
        for (const auto& q : span_basis) {
            cand[static_cast<size_t>(i)] -= (q.dot(cand[static_cast<size_t>(i)])) * q;
        }
    }
    Eigen::MatrixXd out(dim, cols);
    std::vector<bool> used(static_cast<size_t>(dim), false);
    for (int col = 0; col < cols; ++col) {
        int pivot = -1;
        double pivot_norm = -1.0;
        for (int i = 0; i < dim; ++i) {
            if (used[static_cast<size_t>(i)]) continue;
            const double n = cand[static_cast<size_t>(i)].norm();
            if (n > pivot_norm) {
                pivot_norm = n;
                pivot = i;
            }
        }
        Eigen::VectorXd q = cand[static_cast<size_t>(pivot)];
        for (const auto& s : span_basis) q -= (s.dot(q)) * s;  // re-orthogonalize
        for (int j = 0; j < col; ++j) q -= (out.col(j).dot(q)) * out.col(j);
        q /= q.norm();
        out.col(col) = q;
        used[static_cast<size_t>(pivot)] = true;
        for (int i = 0; i < dim; ++i) {
            if (!used[static_cast<size_t>(i)]) {
                cand[static_cast<size_t>(i)] -= (q.dot(cand[static_cast<size_t>(i)])) * q;
            }
        }
    }
    return out;
}

Eigen::VectorXd spd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("spd_solve: Cholesky factorization failed");
    }
    return llt.solve(b);
}

}  // namespace eecdma
