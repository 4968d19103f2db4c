#include "critmin/quadrature.hpp"

#include <cmath>
#include <limits>

namespace critmin {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct PanelResult {
    double value = 0.0;
    double error = 0.0;   // accumulated error-estimate bound
    bool converged = true;
};

double gl_panel(const std::function<double(double)>& g, double a, double b,
                const GaussRule& rule) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * g(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

// Bisection-based adaptivity: a panel is accepted when the one-panel
// value and the two-half value agree within the local budget. The first
// two levels always refine so that sharply peaked integrands cannot be
// accepted off a single coarse agreement.
PanelResult integrate_recursive(const std::function<double(double)>& g, double a, double b,
                                double whole, double budget, int depth,
                                const QuadratureSpec& spec, const GaussRule& rule) {
    const double mid = 0.5 * (a + b);
    const double left = gl_panel(g, a, mid, rule);
    const double right = gl_panel(g, mid, b, rule);
    const double split = left + right;
    const double err = std::abs(split - whole);

    if (depth >= 2 && err <= budget) {
        return {split, err, true};
    }
    if (depth >= spec.max_depth) {
        return {split, err, false};
    }
    PanelResult l = integrate_recursive(g, a, mid, left, 0.5 * budget, depth + 1, spec, rule);
    PanelResult r = integrate_recursive(g, mid, b, right, 0.5 * budget, depth + 1, spec, rule);
    return {l.value + r.value, l.error + r.error, l.converged && r.converged};
}

double integrate_adaptive(const std::function<double(double)>& g, double a, double b,
                          const QuadratureSpec& spec) {
    const GaussRule rule = gauss_legendre_rule(spec.order);
    const double whole = gl_panel(g, a, b, rule);

    // Rough magnitude scan (two forced levels) to seed the relative budget.
    double rough = 0.0;
    for (int i = 0; i < 4; ++i) {
        rough += std::abs(gl_panel(g, a + (b - a) * i / 4.0, a + (b - a) * (i + 1) / 4.0, rule));
    }
    const double budget = std::max(spec.abs_tol, spec.rel_tol * rough);

    PanelResult res = integrate_recursive(g, a, b, whole, budget, 0, spec, rule);
    if (!res.converged) {
        throw QuadratureError("adaptive_radial: tolerance not reached at max depth",
                              res.value, res.error);
    }
    return res.value;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw std::invalid_argument("QuadratureSpec: tolerances must be > 0");
    }
    if (max_depth < 1) throw std::invalid_argument("QuadratureSpec: max_depth must be >= 1");
    if (order < 2) throw std::invalid_argument("QuadratureSpec: order must be >= 2");
}

double sphere_area(int n) {
    if (n < 2) throw std::domain_error("sphere_area: dimension must be >= 2");
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double beta_moment(double a, double b) {
    const double x = 0.5 * (a + 1.0);
    if (!(a > -1.0)) {
        throw std::domain_error("beta_moment: integral diverges at r = 0 (requires a > -1)");
    }
    if (!(b > x)) {
        throw std::domain_error(
            "beta_moment: integral diverges as r -> infinity (requires b > (a+1)/2)");
    }
    return 0.5 * std::exp(std::lgamma(x) + std::lgamma(b - x) - std::lgamma(b));
}

GaussRule gauss_legendre_rule(int order) {
    if (order < 2) throw std::invalid_argument("gauss_legendre_rule: order must be >= 2");
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on the recurrence.
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= order; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[order - 1 - i] = x;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

double adaptive_radial(const std::function<double(double)>& f, double r_lo, double r_hi,
                       int n, const QuadratureSpec& spec) {
    spec.validate();
    if (n < 2) throw std::domain_error("adaptive_radial: dimension must be >= 2");
    if (!(r_lo >= 0.0)) throw std::invalid_argument("adaptive_radial: r_lo must be >= 0");
    if (!(r_hi > r_lo)) throw std::invalid_argument("adaptive_radial: empty interval");

    const double sigma = sphere_area(n);
    const auto g = [&f, n](double r) { return f(r) * std::pow(r, n - 1); };

    if (std::isinf(r_hi)) {
        // r = r_lo + t/(1-t) maps [0,1) onto [r_lo, inf).
        const auto h = [&g, r_lo](double t) {
            const double om = 1.0 - t;
            const double r = r_lo + t / om;
            const double v = g(r);
            if (v == 0.0) return 0.0;  // avoid 0 * inf from the Jacobian
            return v / (om * om);
        };
        return sigma * integrate_adaptive(h, 0.0, 1.0, spec);
    }
    return sigma * integrate_adaptive(g, r_lo, r_hi, spec);
}

}  // namespace critmin
