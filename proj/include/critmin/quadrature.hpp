#pragma once

/**
 * @file quadrature.hpp
 * @brief Radial integrals over balls and over all of space.
 *
 * Two routes are provided for every integral of the form
 *     sigma_{n-1} * int_{r_lo}^{r_hi} f(r) r^{n-1} dr :
 *
 *   - beta_moment() gives the exact Beta/Gamma closed form of the
 *     prototype moment  int_0^inf r^a (1+r^2)^{-b} dr, which covers all
 *     bubble-type integrands after a scaling substitution;
 *   - adaptive_radial() evaluates a general radial integrand with
 *     Gauss-Legendre panels and bisection-based adaptivity.
 *
 * Keeping both routes independent lets each one serve as an oracle for
 * the other. All functions here are pure: no shared mutable state,
 * results are bit-identical across repeated calls with equal inputs.
 */

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace critmin {

/// Tolerances and limits for one adaptive integration.
struct QuadratureSpec {
    double abs_tol = 1e-13;   ///< absolute tolerance on the whole integral
    double rel_tol = 1e-11;   ///< relative tolerance on the whole integral
    int max_depth = 48;       ///< maximum bisection depth per panel
    int order = 16;           ///< Gauss-Legendre points per panel

    void validate() const;    // throws std::invalid_argument
};

/// Raised when adaptivity hits max_depth before reaching the requested
/// tolerance. Carries the best available estimate and its error bound.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double best_estimate, double error_bound)
        : std::runtime_error(what), best_(best_estimate), bound_(error_bound) {}

    double best_estimate() const { return best_; }
    double error_bound() const { return bound_; }

  private:
    double best_;
    double bound_;
};

/// Surface measure of the unit (n-1)-sphere, 2 pi^{n/2} / Gamma(n/2).
/// Throws std::domain_error for n < 2.
double sphere_area(int n);

/**
 * Exact moment  int_0^inf r^a (1+r^2)^{-b} dr  via the Beta function:
 * the value is B((a+1)/2, b-(a+1)/2) / 2.
 *
 * Requires a > -1 (integrability at 0) and b > (a+1)/2 (integrability
 * at infinity); throws std::domain_error naming the divergent endpoint
 * otherwise.
 */
double beta_moment(double a, double b);

/**
 * sigma_{n-1} * int_{r_lo}^{r_hi} f(r) r^{n-1} dr  to the tolerance in
 * `spec`. `r_hi` may be +infinity; the improper tail is mapped to a
 * proper integral by the substitution r = r_lo + t/(1-t). f must be
 * finite on (r_lo, r_hi]; an integrable singularity at r_lo is allowed
 * (panel nodes are interior).
 *
 * Throws QuadratureError on non-convergence, std::domain_error for
 * n < 2, std::invalid_argument for a bad interval or spec.
 */
double adaptive_radial(const std::function<double(double)>& f, double r_lo, double r_hi,
                       int n, const QuadratureSpec& spec = {});

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton
/// iteration on the Legendre recurrence. Exposed for tests.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre_rule(int order);

}  // namespace critmin
