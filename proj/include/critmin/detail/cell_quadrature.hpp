#pragma once

// Shared cell-level quadrature tables. energy.cpp and solver.cpp must
// assemble the same discrete sums (the solver's gradient is the exact
// derivative of the energy sums), so both go through this one evaluator.
//
// Each integral is evaluated on the piecewise-linear interpolant with a
// fixed Gauss-Legendre rule per cell. A cell-midpoint rule is cheaper
// but misweights the first cell so badly that a one-cell spike at the
// origin acquires a quotient below the Sobolev constant for n >= 4
// (2 pi vs S(4) = 10.26...), handing the minimizer a spurious mode.
// With per-cell Gauss quadrature the discrete energy is the continuum
// energy of the interpolant up to tiny rule error, and the Sobolev
// inequality rules such modes out.

#include <span>
#include <vector>

#include "critmin/field.hpp"
#include "critmin/problem.hpp"

namespace critmin::detail {

class CellQuadrature {
  public:
    static constexpr int kNodesPerCell = 6;

    CellQuadrature(const RadialGrid& grid, const ProblemParams& params);

    struct Sums {
        double dirichlet = 0.0;
        double weighted = 0.0;
        double lq_q = 0.0;
    };
    Sums sums(std::span<const double> u) const;

    /// Exact derivative of sums().dirichlet + sums().weighted with
    /// respect to the nodal values, boundary node excluded (g_M = 0).
    /// Throws std::runtime_error naming the cell on non-finite assembly.
    void gradient(std::span<const double> u, std::span<double> g) const;

    /// Dual-cell masses: m_j = d/du_j of the quadrature of int u dx,
    /// evaluated at u == 1. Boundary node included.
    std::vector<double> nodal_measures() const;

    /// Exact derivative of the discrete L^q norm with respect to the
    /// nodal values, boundary node excluded (nu_M = 0). Zero field gives
    /// the zero vector.
    void norm_gradient(std::span<const double> u, std::span<double> nu) const;

    /// Frozen-weight stiffness coefficients per cell: second derivative
    /// of the cell energy in the slope direction.
    void stiffness_coeffs(std::span<const double> u, std::span<double> c) const;

    std::size_t cell_count() const { return inv_dr_.size(); }

  private:
    double q_;
    double k_;
    double beta_;
    std::vector<double> inv_dr_;
    std::vector<double> cell_a_;   // sum of a over the cell's nodes
    std::vector<double> cell_b_;   // sum of b over the cell's nodes
    // Per cell and Gauss node: interpolation parameter t, plain measure
    // a = sigma w dr r^{n-1}, and b = a r^beta.
    std::vector<double> t_;
    std::vector<double> a_;
    std::vector<double> b_;
};

}  // namespace critmin::detail
