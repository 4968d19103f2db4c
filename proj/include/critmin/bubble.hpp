#pragma once

/**
 * @file bubble.hpp
 * @brief The cutoff bubble family, its three energies, the predicted
 *        decay rates of the weighted energy, and the Beta-oracle
 *        constants K1, K2, S, C.
 *
 * The bubble with concentration parameter eps is
 *     u_eps(r) = eps^{(n-2)/4} zeta(r) / (eps + r^2)^{(n-2)/2}
 * where zeta is a smooth cutoff equal to 1 near the origin. Its
 * energies are evaluated grid-free by adaptive quadrature with the
 * analytic derivative, so bubble values can serve as oracles for the
 * grid discretization.
 */

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "critmin/field.hpp"
#include "critmin/problem.hpp"
#include "critmin/quadrature.hpp"

namespace critmin {

enum class CutoffProfile {
    Quintic,   ///< C^2 smoothstep between rho1 and rho2
    None,      ///< zeta == 1 everywhere (whole-space test mode)
};

struct BubbleSpec {
    double eps = 1e-2;
    double rho1 = 0.25;
    double rho2 = 0.5;
    CutoffProfile profile = CutoffProfile::Quintic;

    /// Default cutoff: rho1 = R/4, rho2 = R/2.
    static BubbleSpec standard(const ProblemParams& params, double eps);

    void validate(double R) const;
};

/// zeta(r): 1 on [0,rho1], 0 on [rho2,inf), quintic smoothstep between;
/// monotone non-increasing with values in [0,1].
double cutoff(double r, const BubbleSpec& spec);
double cutoff_derivative(double r, const BubbleSpec& spec);

/// Nodal sampling of the bubble formula. The profile must be compactly
/// supported with rho2 <= R so the boundary trace is exactly zero.
RadialField bubble_field(const BubbleSpec& spec, const ProblemParams& params, GridPtr grid);

struct BubbleEnergies {
    double grad_sq = 0.0;    ///< int |grad u_eps|^2
    double lq_q = 0.0;       ///< int |u_eps|^q
    double weighted = 0.0;   ///< int |x|^beta |u_eps|^k |grad u_eps|^2
};

/// Grid-free adaptive-quadrature values of the three bubble integrals.
BubbleEnergies bubble_energies(const BubbleSpec& spec, const ProblemParams& params,
                               const QuadratureSpec& qspec = {});

enum class RateRegime { PowerLaw, LogCritical, Saturated };
const char* to_string(RateRegime regime);

struct RatePrediction {
    RateRegime regime;
    double exponent;
    bool has_log;
};

/**
 * Predicted decay of the weighted bubble energy as eps -> 0, valid for
 * beta > k n / q:
 *   - PowerLaw   exponent (2 beta - k(n-2))/4     for beta < (k+1)(n-2)
 *   - LogCritical exponent (k+2)(n-2)/4, log factor, at beta = (k+1)(n-2)
 *   - Saturated  exponent (k+2)(n-2)/4            for beta > (k+1)(n-2)
 * Throws std::domain_error when beta <= k n / q.
 */
RatePrediction predicted_weighted_rate(const ProblemParams& params);

/// Leading coefficient of the PowerLaw decay:
/// (n-2)^2 sigma_{n-1} beta_moment(beta+n+1, k(n-2)/2 + n).
/// Defined for k n / q < beta < (k+1)(n-2); throws std::domain_error
/// outside (the moment is marginally divergent at the upper threshold).
double bubble_constant_C(const ProblemParams& params);

struct BubbleConstants {
    double K1 = 0.0;            ///< whole-space bubble Dirichlet energy
    double K2 = 0.0;            ///< whole-space (int U^q)^{2/q}
    double S = 0.0;             ///< best constant K1/K2
    std::optional<double> C;    ///< PowerLaw coefficient when (beta,k) given
};

/// K1, K2 and S = K1/K2 for dimension n via the Beta oracle. C is left
/// empty (it needs beta and k; see bubble_constant_C).
BubbleConstants sobolev_constant(int n);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    bool with_log_correction = false;
};

/**
 * Least-squares fit of log(value) against log(eps); with_log subtracts
 * log|log eps| from the ordinate first. Requires >= 3 samples with
 * strictly decreasing eps and positive values.
 */
RateFit fit_rate(std::span<const std::pair<double, double>> samples, bool with_log);

struct SweepRow {
    double eps;
    double grad_sq;
    double lq_q;
    double weighted;
    double total_normalized;   ///< (grad_sq + weighted) / lq_q^{2/q}
};

/// Bubble energies for each eps (deterministic order = input order;
/// samples may be evaluated concurrently).
std::vector<SweepRow> bubble_energy_sweep(const ProblemParams& params, const BubbleSpec& base,
                                          std::span<const double> eps_values,
                                          const QuadratureSpec& qspec = {}, int threads = 1);

/// count log-spaced values from hi down to lo (inclusive), descending.
std::vector<double> log_spaced_descending(double hi, double lo, int count);

}  // namespace critmin
