#pragma once

/**
 * @file energy.hpp
 * @brief Discrete evaluation of the weighted Dirichlet functional
 *        int (1 + |x|^beta |u|^k) |grad u|^2 and the L^q constraint for
 *        radial fields on a ball.
 *
 * Quadrature convention: fields are piecewise linear in r, and every
 * integral is evaluated cell by cell with a fixed Gauss-Legendre rule
 * on the interpolant. Each cell term is nonnegative, the blow-up
 * rescaling is an exact symmetry of the discrete sums (up to rounding),
 * and the discrete energy of any nodal field is the continuum energy of
 * its interpolant up to the tiny rule error, so the discrete quotient
 * can never fall materially below the Sobolev constant.
 */

#include "critmin/field.hpp"
#include "critmin/problem.hpp"

namespace critmin {

struct EnergyBreakdown {
    double dirichlet = 0.0;   ///< int |grad u|^2
    double weighted = 0.0;    ///< int |x|^beta |u|^k |grad u|^2
    double total = 0.0;       ///< dirichlet + weighted
    double lq_norm = 0.0;
};

/// |u|^k with the vanishing-weight convention: k = 0 gives 1 for any u,
/// and |u| < 1e-300 gives 0 (the weight vanishes with u; no spurious
/// infinities from log of a denormal).
double pow_abs(double u, double k);

/// d/du of pow_abs: k |u|^{k-1} sign(u), clamped to 0 when |u| < 1e-300.
double pow_abs_derivative(double u, double k);

double dirichlet_energy(const RadialField& u, const ProblemParams& params);
double weighted_energy(const RadialField& u, const ProblemParams& params);
double lq_norm(const RadialField& u, const ProblemParams& params);

/// Rescales u onto the constraint sphere ||u||_q = 1. Throws
/// std::domain_error for the zero field.
RadialField normalize(const RadialField& u, const ProblemParams& params);

EnergyBreakdown total_energy(const RadialField& u, const ProblemParams& params);

/**
 * Residual of the power-substitution identity: with v = u^{k/2+1},
 *     total(u) = dirichlet(u) + (k/2+1)^{-2} * int |x|^beta |grad v|^2.
 * Requires u >= 0 nodally (throws std::domain_error otherwise). The
 * discrete residual vanishes under refinement for smooth positive u.
 */
double substitution_check(const RadialField& u, const ProblemParams& params);

/**
 * Blow-up transform u(x) = eps^{-n/q} v(x/eps): returns v on the grid
 * {r_i/eps} of radius R/eps with values eps^{n/q} u_i. Preserves lq_norm
 * and dirichlet_energy exactly up to rounding.
 */
RadialField rescale(const RadialField& u, const ProblemParams& params, double eps);

/// Relative discrepancy |I(u) - I(v_eps)| / I(u) between the functional
/// on the original ball and on the blown-up ball. Pure rounding exactly
/// when beta = k n / q (and in the degenerate case beta = k = 0).
double scaling_identity_check(const RadialField& u, const ProblemParams& params, double eps);

}  // namespace critmin
