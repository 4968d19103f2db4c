#pragma once

/**
 * @file solver.hpp
 * @brief Constrained minimization of the discrete weighted functional
 *        over the L^q unit sphere, plus Euler-Lagrange diagnostics.
 *
 * The solver is a projected descent: each iterate takes a step against
 * the discrete energy gradient, clamps to nonnegative values (the
 * functional is invariant under u -> |u|), and retracts onto the
 * constraint sphere by L^q rescaling. Backtracking enforces a monotone
 * energy history; stopping is by energy stall, not gradient norm
 * (near-minimizers keep drifting along the concentration direction).
 */

#include <stdexcept>
#include <string>
#include <vector>

#include "critmin/energy.hpp"
#include "critmin/field.hpp"
#include "critmin/problem.hpp"

namespace critmin {

enum class Regime { Subcritical, Critical, Supercritical };
const char* to_string(Regime regime);

/// Compares beta against k n / q = k(n-2)/2 with exact arithmetic on
/// the inputs.
Regime regime_classify(const ProblemParams& params);

struct SolverInit {
    enum class Kind { Bubble, Parabolic };
    Kind kind = Kind::Bubble;
    /// Bubble concentration parameter; <= 0 picks the default 0.1 R^2.
    double eps = -1.0;
};

struct SolverConfig {
    double initial_step = 1.0;
    double armijo = 1e-4;          ///< sufficient-decrease factor, in (0,1)
    double backtrack = 0.5;        ///< step reduction ratio, in (0,1)
    int max_iterations = 20000;
    double rel_tolerance = 1e-9;   ///< relative decrease defining a stall
    int stall_window = 40;
    SolverInit init;

    void validate() const;
};

struct PohozaevDefect {
    double interior = 0.0;   ///< (beta - k n/q)/2 * weighted energy
    double boundary = 0.0;   ///< boundary flux term, >= 0 on a ball
    double total = 0.0;
};

struct ConcentrationMetrics {
    double half_mass_radius = 0.0;
    double sup_value = 0.0;
};

struct SolveResult {
    RadialField field;
    double S_estimate = 0.0;
    double mu_estimate = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> energy_history;
    double half_mass_radius = 0.0;
    double sup_value = 0.0;
    PohozaevDefect pohozaev;
};

/// Divergent or non-finite energy during a solve; carries the energy
/// history recorded up to the failure.
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

  private:
    std::vector<double> history_;
};

/**
 * Discrete gradient of the energy: the nodal vector g with
 * <g, phi> = d/dt E(u + t phi) at t = 0 for every nodal perturbation
 * phi vanishing at the boundary. Assembled as the exact derivative of
 * the discrete cell sums, not a rediscretized continuum formula.
 */
RadialField functional_gradient(const RadialField& u, const ProblemParams& params);

/// Dual-cell masses m_j of the grid nodes (the diagonal of the discrete
/// mass quadrature). Dividing a gradient by these yields a continuum-
/// scaled descent direction independent of grading.
std::vector<double> nodal_measures(const RadialGrid& grid, const ProblemParams& params);

/// normalize(clamp_nonnegative(u - step * g / m)): one measure-rescaled
/// projected step. The result is on the constraint sphere.
RadialField descent_step(const RadialField& u, const RadialField& g, double step,
                         const ProblemParams& params);

SolveResult minimize(const ProblemParams& params, GridPtr grid, const SolverConfig& config = {});

/// Multiplier of the Euler-Lagrange equation at u, from the
/// tested-with-u identity: mu = total + (k/2) * weighted.
double lagrange_multiplier(const RadialField& u, const ProblemParams& params);

PohozaevDefect pohozaev_defect(const RadialField& u, const ProblemParams& params);

ConcentrationMetrics concentration_metrics(const RadialField& u, const ProblemParams& params);

}  // namespace critmin
