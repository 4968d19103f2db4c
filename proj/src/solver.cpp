#include "critmin/solver.hpp"

#include <algorithm>
#include <cmath>

#include "critmin/bubble.hpp"
#include "critmin/detail/cell_quadrature.hpp"
#include "critmin/quadrature.hpp"

namespace critmin {

const char* to_string(Regime regime) {
    switch (regime) {
        case Regime::Subcritical: return "Subcritical";
        case Regime::Critical: return "Critical";
        case Regime::Supercritical: return "Supercritical";
    }
    return "?";
}

Regime regime_classify(const ProblemParams& params) {
    params.validate();
    const double threshold = params.critical_beta();
    if (params.beta < threshold) return Regime::Subcritical;
    if (params.beta > threshold) return Regime::Supercritical;
    return Regime::Critical;
}

void SolverConfig::validate() const {
    if (!(initial_step > 0.0)) throw std::invalid_argument("SolverConfig: initial_step must be > 0");
    if (!(armijo > 0.0 && armijo < 1.0)) {
        throw std::invalid_argument("SolverConfig: armijo must be in (0,1)");
    }
    if (!(backtrack > 0.0 && backtrack < 1.0)) {
        throw std::invalid_argument("SolverConfig: backtrack must be in (0,1)");
    }
    if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
    if (!(rel_tolerance > 0.0)) {
        throw std::invalid_argument("SolverConfig: rel_tolerance must be > 0");
    }
    if (stall_window < 1) throw std::invalid_argument("SolverConfig: stall_window must be >= 1");
}

RadialField functional_gradient(const RadialField& u, const ProblemParams& params) {
    detail::CellQuadrature quad(u.grid(), params);
    std::vector<double> g(u.node_count(), 0.0);
    quad.gradient(u.values(), g);
    return RadialField::unchecked(u.grid_ptr(), std::move(g));
}

std::vector<double> nodal_measures(const RadialGrid& grid, const ProblemParams& params) {
    return detail::CellQuadrature(grid, params).nodal_measures();
}

RadialField descent_step(const RadialField& u, const RadialField& g, double step,
                         const ProblemParams& params) {
    const std::vector<double> m = nodal_measures(u.grid(), params);
    std::vector<double> w(u.node_count());
    for (std::size_t j = 0; j + 1 < w.size(); ++j) {
        w[j] = std::max(0.0, u.value(j) - step * g.value(j) / m[j]);
    }
    w.back() = 0.0;
    return normalize(RadialField(u.grid_ptr(), std::move(w)), params);
}

namespace {

// Symmetric positive-definite tridiagonal (Thomas): factor once, then
// solve for several right-hand sides.
struct Tridiagonal {
    std::vector<double> diag, off, mult;

    void resize(std::size_t n) {
        diag.resize(n);
        off.resize(n);
        mult.resize(n);
    }
    void factor() {
        for (std::size_t i = 1; i < diag.size(); ++i) {
            mult[i] = off[i - 1] / diag[i - 1];
            diag[i] -= mult[i] * off[i - 1];
        }
    }
    void solve(std::vector<double>& rhs) const {
        const std::size_t n = diag.size();
        for (std::size_t i = 1; i < n; ++i) rhs[i] -= mult[i] * rhs[i - 1];
        rhs[n - 1] /= diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) {
            rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
        }
    }
};

RadialField initial_field(const ProblemParams& params, const GridPtr& grid,
                          const SolverInit& init) {
    if (init.kind == SolverInit::Kind::Bubble) {
        const double eps = init.eps > 0.0 ? init.eps : 0.1 * params.R * params.R;
        return normalize(bubble_field(BubbleSpec::standard(params, eps), params, grid), params);
    }
    const double R = params.R;
    return normalize(
        RadialField::sample(grid, [R](double r) { return 1.0 - (r / R) * (r / R); }), params);
}

}  // namespace

SolveResult minimize(const ProblemParams& params, GridPtr grid, const SolverConfig& config) {
    params.validate();
    config.validate();
    if (grid->radius() != params.R) {
        throw std::invalid_argument("minimize: grid radius does not match params.R");
    }

    detail::CellQuadrature quad(*grid, params);
    const std::vector<double> measures = quad.nodal_measures();
    const std::size_t nodes = grid->node_count();
    const double q = params.q();

    RadialField u = initial_field(params, grid, config.init);
    auto energy_of = [&](std::span<const double> values) {
        const auto s = quad.sums(values);
        return s.dirichlet + s.weighted;
    };
    double energy = energy_of(u.values());

    std::vector<double> history{energy};
    std::vector<double> g(nodes), nu(nodes), coeff(nodes - 1);
    std::vector<double> dg(nodes - 1), dnu(nodes - 1), trial(nodes);
    Tridiagonal system;
    system.resize(nodes - 1);

    // Search direction: h = D (g - mu nu), where nu is the gradient of
    // the L^q norm and mu = <nu, D g> / <nu, D nu>, so that the step is
    // tangential to the constraint sphere to first order. By
    // Cauchy-Schwarz in the D inner product, <g, h> >= 0 with equality
    // exactly at constrained stationarity, so h is a descent direction
    // for the retracted energy.
    //
    // D = (M + step K(u))^{-1} with the frozen-weight stiffness K: the
    // raw measure-scaled direction is unusable on strongly graded grids
    // (origin cells carry curvature ~ 1/h_min^2, forcing explicit steps
    // ~ h_min^2), while the linearly implicit metric is stable at any
    // step and equals M^{-1} wherever step K << M.
    double step = config.initial_step;
    bool converged = false;
    constexpr int kMaxBacktracks = 80;

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        quad.gradient(u.values(), g);
        quad.norm_gradient(u.values(), nu);
        quad.stiffness_coeffs(u.values(), coeff);

        bool accepted = false;
        bool saw_nonfinite = false;
        double trial_step = step;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            for (std::size_t j = 0; j + 1 < nodes; ++j) {
                const double left = j > 0 ? coeff[j - 1] : 0.0;
                system.diag[j] = measures[j] + trial_step * (left + coeff[j]);
                system.off[j] = j + 2 < nodes ? -trial_step * coeff[j] : 0.0;
                dg[j] = g[j];
                dnu[j] = nu[j];
            }
            system.factor();
            system.solve(dg);
            system.solve(dnu);

            double nu_dg = 0.0, nu_dnu = 0.0, g_dg = 0.0, g_dnu = 0.0;
            for (std::size_t j = 0; j + 1 < nodes; ++j) {
                nu_dg += nu[j] * dg[j];
                nu_dnu += nu[j] * dnu[j];
                g_dg += g[j] * dg[j];
                g_dnu += g[j] * dnu[j];
            }
            const double mu = nu_dnu > 0.0 ? nu_dg / nu_dnu : 0.0;
            const double descent_rate = std::max(0.0, g_dg - mu * g_dnu);

            for (std::size_t j = 0; j + 1 < nodes; ++j) {
                trial[j] = std::max(0.0, u.value(j) - trial_step * (dg[j] - mu * dnu[j]));
            }
            trial.back() = 0.0;

            const auto sums = quad.sums(trial);
            const double lq = std::pow(sums.lq_q, 1.0 / q);
            bool ok = lq > 0.0 && std::isfinite(lq);
            double trial_energy = 0.0;
            if (ok) {
                // Rescaling to the constraint sphere multiplies the energy
                // sums by known powers of the norm; cheaper than
                // renormalizing the nodal values and resumming.
                const double dir_scale = std::pow(lq, -2.0);
                const double wgt_scale = std::pow(lq, -(params.k + 2.0));
                trial_energy = sums.dirichlet * dir_scale + sums.weighted * wgt_scale;
                if (!std::isfinite(trial_energy)) {
                    saw_nonfinite = true;
                    ok = false;
                }
            }
            if (ok && trial_energy <= energy - config.armijo * trial_step * descent_rate) {
                const double inv = 1.0 / lq;
                for (std::size_t j = 0; j + 1 < nodes; ++j) trial[j] *= inv;
                u = RadialField(grid, trial);
                energy = trial_energy;
                accepted = true;
                break;
            }
            trial_step *= config.backtrack;
        }

        if (!accepted) {
            if (saw_nonfinite) {
                throw SolverError("minimize: non-finite energy after exhausting backtracking",
                                  std::move(history));
            }
            // No decrease possible at any step: discrete stationarity.
            converged = true;
            break;
        }

        history.push_back(energy);
        step = std::min(trial_step * 2.0, config.initial_step * 1e12);

        const int w = config.stall_window;
        if (static_cast<int>(history.size()) > w) {
            const double before = history[history.size() - 1 - w];
            if (before - energy <= config.rel_tolerance * std::abs(before)) {
                converged = true;
                break;
            }
        }
    }

    SolveResult result{
        .field = u,
        .S_estimate = total_energy(u, params).total,
        .mu_estimate = lagrange_multiplier(u, params),
        .iterations = static_cast<int>(history.size()) - 1,
        .converged = converged,
        .energy_history = std::move(history),
        .half_mass_radius = 0.0,
        .sup_value = 0.0,
        .pohozaev = pohozaev_defect(u, params),
    };
    const ConcentrationMetrics metrics = concentration_metrics(u, params);
    result.half_mass_radius = metrics.half_mass_radius;
    result.sup_value = metrics.sup_value;
    return result;
}

double lagrange_multiplier(const RadialField& u, const ProblemParams& params) {
    const EnergyBreakdown e = total_energy(u, params);
    return e.total + 0.5 * params.k * e.weighted;
}

PohozaevDefect pohozaev_defect(const RadialField& u, const ProblemParams& params) {
    const RadialGrid& grid = u.grid();
    const std::size_t last = grid.node_count() - 1;
    const double dr = grid.node(last) - grid.node(last - 1);
    const double boundary_slope = (u.value(last) - u.value(last - 1)) / dr;
    const double R = grid.radius();

    PohozaevDefect defect;
    defect.interior = 0.5 * (params.beta - params.critical_beta()) * weighted_energy(u, params);
    defect.boundary = 0.5 * sphere_area(params.n) * std::pow(R, params.n) *
                      boundary_slope * boundary_slope;
    defect.total = defect.interior + defect.boundary;
    return defect;
}

ConcentrationMetrics concentration_metrics(const RadialField& u, const ProblemParams& params) {
    const RadialGrid& grid = u.grid();
    const double sigma = sphere_area(params.n);
    const double q = params.q();

    double total_mass = 0.0;
    std::vector<double> cell_mass(grid.cell_count());
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        const double dr = grid.node(i + 1) - grid.node(i);
        const double r_mid = 0.5 * (grid.node(i) + grid.node(i + 1));
        const double u_mid = 0.5 * (u.value(i) + u.value(i + 1));
        cell_mass[i] = pow_abs(u_mid, q) * sigma * std::pow(r_mid, params.n - 1) * dr;
        total_mass += cell_mass[i];
    }

    ConcentrationMetrics metrics;
    for (std::size_t i = 0; i < u.node_count(); ++i) {
        metrics.sup_value = std::max(metrics.sup_value, std::abs(u.value(i)));
    }
    if (total_mass <= 0.0) return metrics;

    double cumulative = 0.0;
    for (std::size_t i = 0; i < cell_mass.size(); ++i) {
        cumulative += cell_mass[i];
        if (cumulative >= 0.5 * total_mass) {
            metrics.half_mass_radius = grid.node(i + 1);
            break;
        }
    }
    return metrics;
}

}  // namespace critmin
