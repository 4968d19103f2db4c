#include "critmin/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "critmin/energy.hpp"
#include "critmin/parallel.hpp"

namespace critmin {

BubbleSpec BubbleSpec::standard(const ProblemParams& params, double eps) {
    return BubbleSpec{eps, 0.25 * params.R, 0.5 * params.R, CutoffProfile::Quintic};
}

void BubbleSpec::validate(double R) const {
    if (!(eps > 0.0)) throw std::invalid_argument("BubbleSpec: eps must be > 0");
    if (profile == CutoffProfile::Quintic) {
        if (!(0.0 < rho1 && rho1 < rho2 && rho2 <= R)) {
            throw std::invalid_argument("BubbleSpec: requires 0 < rho1 < rho2 <= R");
        }
    }
}

double cutoff(double r, const BubbleSpec& spec) {
    if (spec.profile == CutoffProfile::None) return 1.0;
    if (r <= spec.rho1) return 1.0;
    if (r >= spec.rho2) return 0.0;
    const double t = (r - spec.rho1) / (spec.rho2 - spec.rho1);
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double cutoff_derivative(double r, const BubbleSpec& spec) {
    if (spec.profile == CutoffProfile::None) return 0.0;
    if (r <= spec.rho1 || r >= spec.rho2) return 0.0;
    const double w = spec.rho2 - spec.rho1;
    const double t = (r - spec.rho1) / w;
    const double omt = 1.0 - t;
    return -30.0 * t * t * omt * omt / w;
}

namespace {

double bubble_value(double r, const BubbleSpec& spec, int n) {
    const double zeta = cutoff(r, spec);
    if (zeta == 0.0) return 0.0;
    return std::pow(spec.eps, 0.25 * (n - 2)) * zeta *
           std::pow(spec.eps + r * r, -0.5 * (n - 2));
}

// Analytic derivative (product rule with the cutoff); differencing the
// formula would dominate the quadrature error budget.
double bubble_derivative(double r, const BubbleSpec& spec, int n) {
    const double zeta = cutoff(r, spec);
    const double dzeta = cutoff_derivative(r, spec);
    if (zeta == 0.0 && dzeta == 0.0) return 0.0;
    const double denom = spec.eps + r * r;
    const double core = std::pow(denom, -0.5 * (n - 2));
    return std::pow(spec.eps, 0.25 * (n - 2)) *
           (dzeta * core - (n - 2) * r * zeta * core / denom);
}

// Integration segments: split at the concentration scale sqrt(eps) (the
// integrands peak there) and at the cutoff joins, which are only C^2.
std::vector<std::pair<double, double>> segments(const BubbleSpec& spec) {
    const double s = std::sqrt(spec.eps);
    const double hi = spec.profile == CutoffProfile::None
                          ? std::numeric_limits<double>::infinity()
                          : spec.rho2;
    std::vector<double> cuts{s, 32.0 * s};
    if (spec.profile == CutoffProfile::Quintic) cuts.push_back(spec.rho1);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::pair<double, double>> out;
    double prev = 0.0;
    for (double c : cuts) {
        if (c <= prev) continue;
        if (c >= hi) break;
        out.emplace_back(prev, c);
        prev = c;
    }
    out.emplace_back(prev, hi);
    return out;
}

double integrate_segments(const std::function<double(double)>& f, const BubbleSpec& spec,
                          int n, const QuadratureSpec& qspec) {
    double total = 0.0;
    for (const auto& [a, b] : segments(spec)) {
        if (!(b > a)) continue;
        total += adaptive_radial(f, a, b, n, qspec);
    }
    return total;
}

}  // namespace

RadialField bubble_field(const BubbleSpec& spec, const ProblemParams& params, GridPtr grid) {
    spec.validate(params.R);
    if (spec.profile == CutoffProfile::None) {
        throw std::invalid_argument("bubble_field: requires a compactly supported cutoff");
    }
    return RadialField::sample(std::move(grid),
                               [&](double r) { return bubble_value(r, spec, params.n); });
}

BubbleEnergies bubble_energies(const BubbleSpec& spec, const ProblemParams& params,
                               const QuadratureSpec& qspec) {
    spec.validate(params.R);
    const int n = params.n;
    BubbleEnergies out;
    out.grad_sq = integrate_segments(
        [&](double r) {
            const double du = bubble_derivative(r, spec, n);
            return du * du;
        },
        spec, n, qspec);
    out.lq_q = integrate_segments(
        [&](double r) { return pow_abs(bubble_value(r, spec, n), params.q()); }, spec, n, qspec);
    out.weighted = integrate_segments(
        [&](double r) {
            const double du = bubble_derivative(r, spec, n);
            if (du == 0.0) return 0.0;
            return std::pow(r, params.beta) * pow_abs(bubble_value(r, spec, n), params.k) * du * du;
        },
        spec, n, qspec);
    return out;
}

const char* to_string(RateRegime regime) {
    switch (regime) {
        case RateRegime::PowerLaw: return "PowerLaw";
        case RateRegime::LogCritical: return "LogCritical";
        case RateRegime::Saturated: return "Saturated";
    }
    return "?";
}

RatePrediction predicted_weighted_rate(const ProblemParams& params) {
    params.validate();
    if (!(params.beta > params.critical_beta())) {
        throw std::domain_error(
            "predicted_weighted_rate: defined only for beta > k n / q = k(n-2)/2");
    }
    const double saturation = params.saturation_beta();
    if (params.beta < saturation) {
        return {RateRegime::PowerLaw, 0.25 * (2.0 * params.beta - params.k * (params.n - 2)),
                false};
    }
    const double exponent = 0.25 * (params.k + 2.0) * (params.n - 2);
    if (params.beta == saturation) return {RateRegime::LogCritical, exponent, true};
    return {RateRegime::Saturated, exponent, false};
}

double bubble_constant_C(const ProblemParams& params) {
    params.validate();
    if (!(params.beta > params.critical_beta())) {
        throw std::domain_error("bubble_constant_C: requires beta > k n / q");
    }
    if (!(params.beta < params.saturation_beta())) {
        throw std::domain_error(
            "bubble_constant_C: moment diverges for beta >= (k+1)(n-2)");
    }
    const double a = params.beta + params.n + 1.0;
    const double b = 0.5 * params.k * (params.n - 2) + params.n;
    return (params.n - 2.0) * (params.n - 2.0) * sphere_area(params.n) * beta_moment(a, b);
}

BubbleConstants sobolev_constant(int n) {
    if (n < 3) throw std::domain_error("sobolev_constant: n must be >= 3");
    const double sigma = sphere_area(n);
    BubbleConstants out;
    out.K1 = sigma * (n - 2.0) * (n - 2.0) * beta_moment(n + 1.0, n);
    const double q = 2.0 * n / (n - 2.0);
    out.K2 = std::pow(sigma * beta_moment(n - 1.0, n), 2.0 / q);
    out.S = out.K1 / out.K2;
    return out;
}

RateFit fit_rate(std::span<const std::pair<double, double>> samples, bool with_log) {
    if (samples.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 samples");
    std::vector<double> xs(samples.size()), ys(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& [eps, value] = samples[i];
        if (!(eps > 0.0)) throw std::invalid_argument("fit_rate: eps must be positive");
        if (i > 0 && !(eps < samples[i - 1].first)) {
            throw std::invalid_argument("fit_rate: eps must be strictly decreasing");
        }
        if (!(value > 0.0)) throw std::invalid_argument("fit_rate: values must be positive");
        xs[i] = std::log(eps);
        ys[i] = std::log(value);
        if (with_log) {
            const double abs_log = std::abs(xs[i]);
            if (!(abs_log > 0.0)) {
                throw std::invalid_argument("fit_rate: |log eps| vanishes at eps = 1");
            }
            ys[i] -= std::log(abs_log);
        }
    }
    const double m = static_cast<double>(xs.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= m;
    mean_y /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
        syy += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    RateFit fit;
    fit.with_log_correction = with_log;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    if (syy == 0.0) {
        fit.r_squared = 1.0;
    } else {
        const double ss_res = syy - sxy * sxy / sxx;
        fit.r_squared = 1.0 - ss_res / syy;
    }
    return fit;
}

std::vector<SweepRow> bubble_energy_sweep(const ProblemParams& params, const BubbleSpec& base,
                                          std::span<const double> eps_values,
                                          const QuadratureSpec& qspec, int threads) {
    std::vector<SweepRow> rows(eps_values.size());
    parallel_for(eps_values.size(), threads, [&](std::size_t i) {
        BubbleSpec spec = base;
        spec.eps = eps_values[i];
        const BubbleEnergies e = bubble_energies(spec, params, qspec);
        rows[i] = {spec.eps, e.grad_sq, e.lq_q, e.weighted,
                   (e.grad_sq + e.weighted) / std::pow(e.lq_q, 2.0 / params.q())};
    });
    return rows;
}

std::vector<double> log_spaced_descending(double hi, double lo, int count) {
    if (count < 2 || !(hi > lo) || !(lo > 0.0)) {
        throw std::invalid_argument("log_spaced_descending: need hi > lo > 0 and count >= 2");
    }
    std::vector<double> out(count);
    const double ratio = std::log(lo / hi);
    for (int i = 0; i < count; ++i) {
        out[i] = hi * std::exp(ratio * i / (count - 1));
    }
    out.back() = lo;
    return out;
}

}  // namespace critmin
