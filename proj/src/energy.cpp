#include "critmin/energy.hpp"

#include <cmath>

#include "critmin/detail/cell_quadrature.hpp"
#include "critmin/quadrature.hpp"

namespace critmin {

double pow_abs(double u, double k) {
    if (k == 0.0) return 1.0;
    const double a = std::abs(u);
    if (a < 1e-300) return 0.0;
    return std::pow(a, k);
}

double pow_abs_derivative(double u, double k) {
    if (k == 0.0) return 0.0;
    const double a = std::abs(u);
    if (a < 1e-300) return 0.0;
    const double mag = k * std::pow(a, k - 1.0);
    return u < 0.0 ? -mag : mag;
}

namespace {

detail::CellQuadrature::Sums accumulate(const RadialField& u, const ProblemParams& params) {
    return detail::CellQuadrature(u.grid(), params).sums(u.values());
}

}  // namespace

double dirichlet_energy(const RadialField& u, const ProblemParams& params) {
    return accumulate(u, params).dirichlet;
}

double weighted_energy(const RadialField& u, const ProblemParams& params) {
    return accumulate(u, params).weighted;
}

double lq_norm(const RadialField& u, const ProblemParams& params) {
    return std::pow(accumulate(u, params).lq_q, 1.0 / params.q());
}

RadialField normalize(const RadialField& u, const ProblemParams& params) {
    const double norm = lq_norm(u, params);
    if (!(norm > 0.0)) throw std::domain_error("normalize: zero field");
    std::vector<double> values(u.values());
    for (double& v : values) v /= norm;
    values.back() = 0.0;
    return RadialField(u.grid_ptr(), std::move(values));
}

EnergyBreakdown total_energy(const RadialField& u, const ProblemParams& params) {
    const detail::CellQuadrature::Sums sums = accumulate(u, params);
    EnergyBreakdown out;
    out.dirichlet = sums.dirichlet;
    out.weighted = sums.weighted;
    out.total = sums.dirichlet + sums.weighted;
    out.lq_norm = std::pow(sums.lq_q, 1.0 / params.q());
    return out;
}

double substitution_check(const RadialField& u, const ProblemParams& params) {
    for (std::size_t i = 0; i < u.node_count(); ++i) {
        if (u.value(i) < 0.0) {
            throw std::domain_error("substitution_check: field must be nonnegative");
        }
    }
    const double p = 0.5 * params.k + 1.0;
    std::vector<double> v_values(u.node_count());
    for (std::size_t i = 0; i < u.node_count(); ++i) {
        v_values[i] = std::pow(u.value(i), p);
    }
    v_values.back() = 0.0;
    const RadialField v(u.grid_ptr(), std::move(v_values));
    // int |x|^beta |grad v|^2 is the weighted energy of v with k = 0.
    ProblemParams beta_only = params;
    beta_only.k = 0.0;
    const double v_beta_energy = weighted_energy(v, beta_only);
    const EnergyBreakdown e = total_energy(u, params);
    return std::abs(e.total - e.dirichlet - v_beta_energy / (p * p));
}

RadialField rescale(const RadialField& u, const ProblemParams& params, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("rescale: eps must be > 0");
    const RadialGrid& grid = u.grid();
    const double scale = std::pow(eps, params.n / params.q());
    std::vector<double> nodes(grid.node_count());
    std::vector<double> values(u.node_count());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i] = grid.node(i) / eps;
        values[i] = scale * u.value(i);
    }
    values.back() = 0.0;
    auto new_grid = std::make_shared<const RadialGrid>(std::move(nodes), grid.grading());
    return RadialField(std::move(new_grid), std::move(values));
}

double scaling_identity_check(const RadialField& u, const ProblemParams& params, double eps) {
    const double lhs = total_energy(u, params).total;
    if (lhs == 0.0) return 0.0;
    const RadialField v = rescale(u, params, eps);
    ProblemParams blown = params;
    blown.R = params.R / eps;
    const double rhs = total_energy(v, blown).total;
    return std::abs(lhs - rhs) / lhs;
}

}  // namespace critmin
