#pragma once

/**
 * @file field.hpp
 * @brief Radial grids on [0,R] and nodal radial fields with zero trace.
 */

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "critmin/problem.hpp"

namespace critmin {

/**
 * Strictly increasing node set r_0 = 0 < r_1 < ... < r_M = R.
 * Generated grids follow the grading law r_i = R (i/M)^gamma, which
 * clusters nodes at the origin where minimizing profiles concentrate;
 * free-form node sets are accepted on load.
 */
class RadialGrid {
  public:
    RadialGrid(std::vector<double> nodes, double grading = 1.0);

    /// r_i = R (i/M)^gamma. Requires M >= 8 and gamma >= 1.
    static RadialGrid graded(double R, int M, double gamma);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t cell_count() const { return nodes_.size() - 1; }
    double radius() const { return nodes_.back(); }
    double node(std::size_t i) const { return nodes_[i]; }
    double grading() const { return grading_; }
    const std::vector<double>& nodes() const { return nodes_; }

  private:
    std::vector<double> nodes_;
    double grading_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Graded grid for a problem domain; see RadialGrid::graded.
GridPtr make_grid(const ProblemParams& params, int M, double gamma);

/**
 * Nodal values u_0 ... u_M on a shared grid. Invariants: u_M = 0
 * (Dirichlet trace) and every value finite. Immutable after
 * construction.
 */
class RadialField {
  public:
    RadialField(GridPtr grid, std::vector<double> values);

    /// Nodal sampling of fn; fn must vanish at the boundary node.
    static RadialField sample(GridPtr grid, const std::function<double(double)>& fn);

    static RadialField zero(GridPtr grid);

    /// Skips the boundary/finiteness checks. Test harnesses only.
    static RadialField unchecked(GridPtr grid, std::vector<double> values);

    const RadialGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t node_count() const { return values_.size(); }
    double value(std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

  private:
    struct unchecked_tag {};
    RadialField(GridPtr grid, std::vector<double> values, unchecked_tag);

    GridPtr grid_;
    std::vector<double> values_;
};

// Text serialization: header line `# n=<n> beta=<beta> k=<k> R=<R>`,
// then one `radius value` pair per line. Numbers are written with
// shortest round-trip formatting, so write/read is bit-faithful.
void write_field(std::ostream& out, const RadialField& field, const ProblemParams& params);
std::pair<RadialField, ProblemParams> read_field(std::istream& in);
void write_field_file(const std::string& path, const RadialField& field,
                      const ProblemParams& params);
std::pair<RadialField, ProblemParams> read_field_file(const std::string& path);

/// Shortest decimal representation that round-trips to the same double.
std::string format_shortest(double x);

}  // namespace critmin
