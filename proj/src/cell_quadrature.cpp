#include "critmin/detail/cell_quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "critmin/energy.hpp"
#include "critmin/quadrature.hpp"

namespace critmin::detail {

namespace {

// |u|^p and its u-derivative sharing one pow call.
inline void pow_pair(double u, double p, double& value, double& deriv) {
    const double a = std::abs(u);
    if (a < 1e-300) {
        value = 0.0;
        deriv = 0.0;
        return;
    }
    const double pw = std::pow(a, p - 1.0);
    value = pw * a;
    deriv = u < 0.0 ? -p * pw : p * pw;
}

}  // namespace

CellQuadrature::CellQuadrature(const RadialGrid& grid, const ProblemParams& params)
    : q_(params.q()), k_(params.k), beta_(params.beta) {
    const std::size_t cells = grid.cell_count();
    const GaussRule rule = gauss_legendre_rule(kNodesPerCell);
    inv_dr_.resize(cells);
    cell_a_.resize(cells);
    cell_b_.resize(cells);
    t_.resize(cells * kNodesPerCell);
    a_.resize(cells * kNodesPerCell);
    b_.resize(cells * kNodesPerCell);
    const double sigma = sphere_area(params.n);
    for (std::size_t i = 0; i < cells; ++i) {
        const double r0 = grid.node(i);
        const double dr = grid.node(i + 1) - r0;
        inv_dr_[i] = 1.0 / dr;
        double sum_a = 0.0, sum_b = 0.0;
        for (int g = 0; g < kNodesPerCell; ++g) {
            const double t = 0.5 * (1.0 + rule.nodes[g]);
            const double w = 0.5 * rule.weights[g];
            const double r = r0 + t * dr;
            const std::size_t idx = i * kNodesPerCell + g;
            t_[idx] = t;
            a_[idx] = sigma * w * dr * std::pow(r, params.n - 1);
            b_[idx] = a_[idx] * std::pow(r, params.beta);
            sum_a += a_[idx];
            sum_b += b_[idx];
        }
        cell_a_[i] = sum_a;
        cell_b_[i] = sum_b;
    }
}

CellQuadrature::Sums CellQuadrature::sums(std::span<const double> u) const {
    Sums s;
    const bool plain_weight = k_ == 0.0;
    for (std::size_t i = 0; i < inv_dr_.size(); ++i) {
        const double slope = (u[i + 1] - u[i]) * inv_dr_[i];
        const double grad_sq = slope * slope;
        const std::size_t base = i * kNodesPerCell;
        double cell_wgt = plain_weight ? cell_b_[i] : 0.0;
        double cell_lq = 0.0;
        for (int g = 0; g < kNodesPerCell; ++g) {
            const double t = t_[base + g];
            const double ug = (1.0 - t) * u[i] + t * u[i + 1];
            cell_lq += a_[base + g] * pow_abs(ug, q_);
            if (!plain_weight) cell_wgt += b_[base + g] * pow_abs(ug, k_);
        }
        s.dirichlet += grad_sq * cell_a_[i];
        s.weighted += grad_sq * cell_wgt;
        s.lq_q += cell_lq;
    }
    return s;
}

void CellQuadrature::gradient(std::span<const double> u, std::span<double> g) const {
    for (double& v : g) v = 0.0;
    const std::size_t last = u.size() - 1;
    const bool plain_weight = k_ == 0.0;
    for (std::size_t i = 0; i < inv_dr_.size(); ++i) {
        const double slope = (u[i + 1] - u[i]) * inv_dr_[i];
        const double grad_sq = slope * slope;
        const std::size_t base = i * kNodesPerCell;
        double cell_q = cell_a_[i];  // D_i + sum b |u_g|^k
        double dleft = 0.0, dright = 0.0;
        if (plain_weight) {
            cell_q += cell_b_[i];
        } else {
            for (int gg = 0; gg < kNodesPerCell; ++gg) {
                const double t = t_[base + gg];
                const double ug = (1.0 - t) * u[i] + t * u[i + 1];
                double P, dP;
                pow_pair(ug, k_, P, dP);
                cell_q += b_[base + gg] * P;
                dleft += b_[base + gg] * dP * (1.0 - t);
                dright += b_[base + gg] * dP * t;
            }
        }
        const double slope_term = 2.0 * slope * inv_dr_[i] * cell_q;

        const double g_left = -slope_term + grad_sq * dleft;
        if (!std::isfinite(g_left)) {
            throw std::runtime_error("functional_gradient: non-finite assembly at cell " +
                                     std::to_string(i));
        }
        g[i] += g_left;
        if (i + 1 < last) {  // the boundary node is not a DOF
            const double g_right = slope_term + grad_sq * dright;
            if (!std::isfinite(g_right)) {
                throw std::runtime_error("functional_gradient: non-finite assembly at cell " +
                                         std::to_string(i));
            }
            g[i + 1] += g_right;
        }
    }
    g[last] = 0.0;
}

std::vector<double> CellQuadrature::nodal_measures() const {
    std::vector<double> m(inv_dr_.size() + 1, 0.0);
    for (std::size_t i = 0; i < inv_dr_.size(); ++i) {
        const std::size_t base = i * kNodesPerCell;
        for (int g = 0; g < kNodesPerCell; ++g) {
            m[i] += a_[base + g] * (1.0 - t_[base + g]);
            m[i + 1] += a_[base + g] * t_[base + g];
        }
    }
    return m;
}

void CellQuadrature::norm_gradient(std::span<const double> u, std::span<double> nu) const {
    for (double& v : nu) v = 0.0;
    const std::size_t last = u.size() - 1;
    double lq_q = 0.0;
    for (std::size_t i = 0; i < inv_dr_.size(); ++i) {
        const std::size_t base = i * kNodesPerCell;
        for (int g = 0; g < kNodesPerCell; ++g) {
            const double t = t_[base + g];
            const double ug = (1.0 - t) * u[i] + t * u[i + 1];
            double P, dP;
            pow_pair(ug, q_, P, dP);
            lq_q += a_[base + g] * P;
            const double w = a_[base + g] * dP;
            nu[i] += w * (1.0 - t);
            if (i + 1 < last) nu[i + 1] += w * t;
        }
    }
    if (lq_q <= 0.0) {
        for (double& v : nu) v = 0.0;
        return;
    }
    const double scale = std::pow(lq_q, 1.0 / q_ - 1.0) / q_;
    for (double& v : nu) v *= scale;
    nu[last] = 0.0;
}

void CellQuadrature::stiffness_coeffs(std::span<const double> u, std::span<double> c) const {
    const bool plain_weight = k_ == 0.0;
    for (std::size_t i = 0; i < inv_dr_.size(); ++i) {
        double cell_q = cell_a_[i];
        const std::size_t base = i * kNodesPerCell;
        if (plain_weight) {
            cell_q += cell_b_[i];
        } else {
            for (int g = 0; g < kNodesPerCell; ++g) {
                const double t = t_[base + g];
                const double ug = (1.0 - t) * u[i] + t * u[i + 1];
                cell_q += b_[base + g] * pow_abs(ug, k_);
            }
        }
        c[i] = 2.0 * cell_q * inv_dr_[i] * inv_dr_[i];
    }
}

}  // namespace critmin::detail
