#ifndef EECDMA_NUMERICS_HPP
#define EECDMA_NUMERICS_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "eecdma/errors.hpp"

namespace eecdma {

/// Interval [lo, hi] on which a bracketed function changes sign.
struct ScalarBracket {
    double lo = 0.0;
    double hi = 1.0;
};

struct Tolerances {
    double root_abs = 1e-10;      // absolute tolerance on the argument
    double residual_abs = 1e-10;  // absolute tolerance on the function value
    int max_iter = 200;
};

/**
 * Plain bisection on a sign-changing bracket.
 *
 * Returns x with |g(x)| <= residual_abs or final bracket width <= root_abs;
 * the result always lies inside the initial bracket. Throws NoSignChange if
 * g(lo) and g(hi) have the same (nonzero) sign, MaxIterations if neither
 * tolerance is met within tol.max_iter halvings.
 */
double bisect_root(const std::function<double(double)>& g, ScalarBracket bracket,
                   const Tolerances& tol);

struct MaxResult {
    double argmax = 0.0;
    double max = 0.0;
};

/**
 * Golden-section maximization of a unimodal function on [lo, hi].
 *
 * Both endpoints are evaluated, so boundary maxima are returned exactly
 * (argmax == lo or == hi bitwise). Localizes the interior argmax to an
 * interval of width tol.root_abs; multi-modal inputs are undefined behavior.
 */
MaxResult maximize_1d(const std::function<double(double)>& u, double lo, double hi,
                      const Tolerances& tol);

/**
 * Orthonormal basis of the orthogonal complement of span(vectors) in R^dim.
 *
 * Column-by-column Gram-Schmidt with re-orthogonalization; input rank is
 * decided with a relative threshold of 1e-12 times the largest input norm.
 * Returns a dim x (dim - rank) matrix whose columns are orthonormal and
 * orthogonal to every input to ~1e-10.
 */
Eigen::MatrixXd orth_complement_basis(const std::vector<Eigen::VectorXd>& vectors, int dim);

/**
 * Solve A x = b for symmetric positive definite A (Cholesky).
 * Throws NotPositiveDefinite if the factorization fails.
 */
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace eecdma

#endif  // EECDMA_NUMERICS_HPP
