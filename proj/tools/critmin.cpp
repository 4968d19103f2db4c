// critmin: batch front-end for the weighted critical-quotient laboratory.
//
// Subcommands:
//   regime        classify (n, beta, k) and print the predicted decay rate
//   bubble-sweep  bubble energies over an eps sweep + rate fit vs prediction
//   minimize      one constrained descent run -> JSON record + history CSV
//   map           sweep a (beta, k) rectangle of solves -> CSV
//   pohozaev      defect of a stored field file
//   selftest      quick invariant battery
//
// Exit codes: 0 success, 2 invalid config, 3 numerical failure,
// 4 declared check failed.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "critmin/bubble.hpp"
#include "critmin/energy.hpp"
#include "critmin/field.hpp"
#include "critmin/parallel.hpp"
#include "critmin/problem.hpp"
#include "critmin/quadrature.hpp"
#include "critmin/solver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace critmin;

namespace {

constexpr int kExitInvalidConfig = 2;
constexpr int kExitNumericalFailure = 3;
constexpr int kExitCheckFailed = 4;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string default_out_dir() {
    if (const char* env = std::getenv("CRITMIN_OUT")) return env;
    return ".";
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

struct CommonOpts {
    int n = 4;
    double beta = 0.0;
    double k = 0.0;
    double radius = 1.0;
    int M = 1000;
    double gamma = 2.0;
    std::string out_dir = default_out_dir();
    std::string format = "csv";
    int threads = 1;

    ProblemParams params() const { return ProblemParams::make(n, beta, k, radius); }

    std::string tag() const {
        std::ostringstream os;
        os << "n" << n << "_beta" << beta << "_k" << k << "_M" << M << "_g" << gamma;
        std::string s = os.str();
        for (char& c : s) {
            if (c == '.') c = 'p';
        }
        return s;
    }

    std::string provenance() const {
        std::ostringstream os;
        os << "n=" << n << " beta=" << fmt17(beta) << " k=" << fmt17(k)
           << " R=" << fmt17(radius) << " M=" << M << " gamma=" << fmt17(gamma);
        return os.str();
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_grid = true) {
    cmd->add_option("--n", opts.n, "space dimension (>= 3)");
    cmd->add_option("--beta", opts.beta, "radial weight exponent (>= 0)");
    cmd->add_option("--k", opts.k, "field weight exponent (0 <= k <= 2n/(n-2))");
    cmd->add_option("--radius", opts.radius, "ball radius R");
    if (with_grid) {
        cmd->add_option("--M", opts.M, "number of grid cells");
        cmd->add_option("--gamma", opts.gamma, "grid grading exponent (>= 1)");
    }
    cmd->add_option("--out-dir", opts.out_dir, "output directory (default $CRITMIN_OUT or .)");
    cmd->add_option("--format", opts.format, "stdout summary format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", opts.threads, "worker pool size for sweeps");
    cmd->set_config("--config", "", "key = value config file; flags override it");
}

struct SolverOpts {
    int max_iters = 20000;
    double tol = 1e-9;
    int stall_window = 40;
    double step = 1.0;
    double armijo = 1e-4;
    double backtrack = 0.5;
    std::string init = "bubble";
    double init_eps = -1.0;

    SolverConfig config() const {
        SolverConfig cfg;
        cfg.max_iterations = max_iters;
        cfg.rel_tolerance = tol;
        cfg.stall_window = stall_window;
        cfg.initial_step = step;
        cfg.armijo = armijo;
        cfg.backtrack = backtrack;
        cfg.init.kind = init == "parabolic" ? SolverInit::Kind::Parabolic
                                            : SolverInit::Kind::Bubble;
        cfg.init.eps = init_eps;
        return cfg;
    }
};

void add_solver(CLI::App* cmd, SolverOpts& opts) {
    cmd->add_option("--max-iters", opts.max_iters, "descent iteration cap");
    cmd->add_option("--tol", opts.tol, "relative stall tolerance");
    cmd->add_option("--stall-window", opts.stall_window, "stall detection window");
    cmd->add_option("--step", opts.step, "initial step size");
    cmd->add_option("--armijo", opts.armijo, "sufficient-decrease factor");
    cmd->add_option("--backtrack-ratio", opts.backtrack, "step reduction ratio");
    cmd->add_option("--init", opts.init, "initial profile")
        ->check(CLI::IsMember({"bubble", "parabolic"}));
    cmd->add_option("--init-eps", opts.init_eps,
                    "bubble init concentration (default 0.1 R^2)");
}

json solve_record(const CommonOpts& opts, const SolveResult& result) {
    json rec;
    rec["params"] = {{"n", opts.n}, {"beta", opts.beta}, {"k", opts.k}, {"R", opts.radius}};
    rec["grid"] = {{"M", opts.M}, {"gamma", opts.gamma}};
    rec["S_estimate"] = result.S_estimate;
    rec["mu_estimate"] = result.mu_estimate;
    rec["converged"] = result.converged;
    rec["iterations"] = result.iterations;
    rec["half_mass_radius"] = result.half_mass_radius;
    rec["sup_value"] = result.sup_value;
    rec["pohozaev"] = {{"interior", result.pohozaev.interior},
                       {"boundary", result.pohozaev.boundary},
                       {"total", result.pohozaev.total}};
    return rec;
}

// ---------------------------------------------------------------------
// regime

int cmd_regime(const CommonOpts& opts) {
    const ProblemParams params = opts.params();
    const Regime regime = regime_classify(params);
    std::ostringstream line;
    line << to_string(regime) << "; kn/q=" << params.critical_beta()
         << "; saturation=" << params.saturation_beta();
    if (params.beta > params.critical_beta()) {
        const RatePrediction rate = predicted_weighted_rate(params);
        line << "; rate=" << to_string(rate.regime) << " exponent=" << rate.exponent;
        if (rate.has_log) line << " (log factor)";
    }
    std::cout << line.str() << "\n";
    return 0;
}

// ---------------------------------------------------------------------
// bubble-sweep

struct SweepOpts {
    double eps_max = 1e-2;
    double eps_min = 1e-5;
    int points = 13;
    bool log_correction = false;
    bool svg = false;
};

void write_sweep_svg(const fs::path& path, const std::vector<SweepRow>& rows,
                     const RateFit& fit) {
    // log-log chart of the weighted energy with the fitted line.
    const double W = 640, H = 480, L = 70, B = 50, T = 20, Rm = 20;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : rows) {
        const double x = std::log10(r.eps), y = std::log10(r.weighted);
        xmin = std::min(xmin, x); xmax = std::max(xmax, x);
        ymin = std::min(ymin, y); ymax = std::max(ymax, y);
    }
    const auto X = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - Rm); };
    const auto Y = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - B - T); };
    auto f = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", v);
        return std::string(buf);
    };
    std::ofstream out = open_output(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - Rm << "\" y2=\""
        << H - B << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (L + W - Rm) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">log10 eps</text>\n";
    out << "<text x=\"16\" y=\"" << (T + H - B) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (T + H - B) / 2 << ")\">log10 weighted</text>\n";
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : rows) {
        out << f(X(std::log10(r.eps))) << "," << f(Y(std::log10(r.weighted))) << " ";
    }
    out << "\"/>\n";
    for (const auto& r : rows) {
        out << "<circle cx=\"" << f(X(std::log10(r.eps))) << "\" cy=\""
            << f(Y(std::log10(r.weighted))) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    }
    // fitted line in natural-log space: log(v) = slope*log(eps) + intercept
    const double ln10 = std::log(10.0);
    const auto yfit = [&](double x10) { return (fit.slope * x10 * ln10 + fit.intercept) / ln10; };
    out << "<line x1=\"" << f(X(xmin)) << "\" y1=\"" << f(Y(yfit(xmin))) << "\" x2=\""
        << f(X(xmax)) << "\" y2=\"" << f(Y(yfit(xmax)))
        << "\" stroke=\"#d62728\" stroke-dasharray=\"6 3\"/>\n";
    out << "<text x=\"" << W - Rm - 6 << "\" y=\"" << T + 14
        << "\" text-anchor=\"end\" font-size=\"13\">slope " << f(fit.slope) << "</text>\n";
    out << "</svg>\n";
}

int cmd_bubble_sweep(const CommonOpts& opts, const SweepOpts& sweep) {
    const ProblemParams params = opts.params();
    if (!(params.beta > params.critical_beta())) {
        std::cerr << "bubble-sweep: requires beta > k n / q = " << params.critical_beta()
                  << "; below that threshold the weighted bubble energy does not decay\n";
        return kExitInvalidConfig;
    }
    const RatePrediction prediction = predicted_weighted_rate(params);
    const bool with_log = sweep.log_correction || prediction.has_log;

    const std::vector<double> eps =
        log_spaced_descending(sweep.eps_max, sweep.eps_min, sweep.points);
    const BubbleSpec base = BubbleSpec::standard(params, eps.front());
    const std::vector<SweepRow> rows =
        bubble_energy_sweep(params, base, eps, QuadratureSpec{}, opts.threads);

    const fs::path csv_path = fs::path(opts.out_dir) / ("bubble_sweep_" + opts.tag() + ".csv");
    {
        std::ofstream out = open_output(csv_path);
        out << "# critmin bubble-sweep " << opts.provenance() << " eps_max=" << fmt17(sweep.eps_max)
            << " eps_min=" << fmt17(sweep.eps_min) << " points=" << sweep.points
            << " rho1=" << fmt17(base.rho1) << " rho2=" << fmt17(base.rho2)
            << " log_correction=" << (with_log ? 1 : 0) << "\n";
        out << "eps,grad_sq,lq_q,weighted,total_normalized\n";
        for (const auto& r : rows) {
            out << fmt17(r.eps) << "," << fmt17(r.grad_sq) << "," << fmt17(r.lq_q) << ","
                << fmt17(r.weighted) << "," << fmt17(r.total_normalized) << "\n";
        }
    }

    // The two largest eps are outside the asymptotic window; fit the rest.
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 2; i < rows.size(); ++i) {
        samples.emplace_back(rows[i].eps, rows[i].weighted);
    }
    const RateFit fit = fit_rate(samples, with_log);
    if (sweep.svg) {
        write_sweep_svg(fs::path(opts.out_dir) / ("bubble_sweep_" + opts.tag() + ".svg"), rows,
                        fit);
    }

    const bool pass = std::abs(fit.slope - prediction.exponent) <= 0.05;
    std::cout << "predicted: " << to_string(prediction.regime)
              << " exponent=" << prediction.exponent << (prediction.has_log ? " (log factor)" : "")
              << "\n";
    std::cout << "fitted:    slope=" << fit.slope << " R2=" << fit.r_squared
              << (with_log ? " (log-corrected)" : "") << "\n";
    if (with_log) {
        double c1 = 1e300, c2 = -1e300;
        for (const auto& r : rows) {
            const double ratio =
                r.weighted / (std::pow(r.eps, prediction.exponent) * std::abs(std::log(r.eps)));
            c1 = std::min(c1, ratio);
            c2 = std::max(c2, ratio);
        }
        std::cout << "log-ratio bounds: [" << c1 << ", " << c2 << "] spread=" << c2 / c1 << "\n";
    }
    std::cout << (pass ? "PASS" : "FAIL") << ": |slope - exponent| "
              << std::abs(fit.slope - prediction.exponent) << " vs 0.05\n";
    std::cout << "wrote " << csv_path.string() << "\n";
    return pass ? 0 : kExitCheckFailed;
}

// ---------------------------------------------------------------------
// minimize

int cmd_minimize(const CommonOpts& opts, const SolverOpts& solver) {
    const ProblemParams params = opts.params();
    const GridPtr grid = make_grid(params, opts.M, opts.gamma);
    const SolveResult result = minimize(params, grid, solver.config());

    const std::string tag = opts.tag();
    const fs::path json_path = fs::path(opts.out_dir) / ("minimize_" + tag + ".json");
    const fs::path hist_path = fs::path(opts.out_dir) / ("minimize_" + tag + "_history.csv");
    const fs::path field_path = fs::path(opts.out_dir) / ("minimize_" + tag + "_field.txt");

    const json rec = solve_record(opts, result);
    {
        std::ofstream out = open_output(json_path);
        out << rec.dump(2) << "\n";
    }
    {
        std::ofstream out = open_output(hist_path);
        out << "# critmin minimize " << opts.provenance() << "\n";
        out << "iter,energy\n";
        for (std::size_t i = 0; i < result.energy_history.size(); ++i) {
            out << i << "," << fmt17(result.energy_history[i]) << "\n";
        }
    }
    write_field_file(field_path.string(), result.field, params);

    if (opts.format == "json") {
        std::cout << rec.dump(2) << "\n";
    } else {
        std::cout << "regime=" << to_string(regime_classify(params))
                  << " S_estimate=" << fmt17(result.S_estimate)
                  << " mu=" << fmt17(result.mu_estimate) << " converged=" << result.converged
                  << " iterations=" << result.iterations
                  << " half_mass_radius=" << fmt17(result.half_mass_radius) << "\n";
    }
    std::cout << "wrote " << json_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------
// map

struct MapOpts {
    double beta_min = 0.0, beta_max = 2.0;
    int beta_steps = 5;
    double k_min = 0.0, k_max = 2.0;
    int k_steps = 5;
};

int cmd_map(const CommonOpts& opts, const MapOpts& map, const SolverOpts& solver) {
    std::vector<ProblemParams> points;
    for (int i = 0; i < map.beta_steps; ++i) {
        const double beta = map.beta_steps == 1
                                ? map.beta_min
                                : map.beta_min + (map.beta_max - map.beta_min) * i /
                                                     (map.beta_steps - 1);
        for (int j = 0; j < map.k_steps; ++j) {
            const double k = map.k_steps == 1
                                 ? map.k_min
                                 : map.k_min + (map.k_max - map.k_min) * j / (map.k_steps - 1);
            points.push_back(ProblemParams::make(opts.n, beta, k, opts.radius));
        }
    }
    const double S_oracle = sobolev_constant(opts.n).S;

    std::vector<double> estimates(points.size(), 0.0);
    parallel_for(points.size(), opts.threads, [&](std::size_t i) {
        const GridPtr grid = make_grid(points[i], opts.M, opts.gamma);
        estimates[i] = minimize(points[i], grid, solver.config()).S_estimate;
    });

    const fs::path csv_path = fs::path(opts.out_dir) / ("map_" + opts.tag() + ".csv");
    std::ofstream out = open_output(csv_path);
    out << "# critmin map " << opts.provenance() << " beta=[" << fmt17(map.beta_min) << ","
        << fmt17(map.beta_max) << "]x" << map.beta_steps << " k=[" << fmt17(map.k_min) << ","
        << fmt17(map.k_max) << "]x" << map.k_steps << "\n";
    out << "beta,k,regime,S_estimate,S_oracle,gap\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << fmt17(points[i].beta) << "," << fmt17(points[i].k) << ","
            << to_string(regime_classify(points[i])) << "," << fmt17(estimates[i]) << ","
            << fmt17(S_oracle) << "," << fmt17(estimates[i] - S_oracle) << "\n";
    }
    std::cout << "wrote " << csv_path.string() << " (" << points.size() << " solves)\n";
    return 0;
}

// ---------------------------------------------------------------------
// pohozaev

int cmd_pohozaev(const CommonOpts& opts, const std::string& field_path) {
    const auto [field, params] = read_field_file(field_path);
    const PohozaevDefect defect = pohozaev_defect(field, params);
    if (opts.format == "json") {
        json rec;
        rec["params"] = {{"n", params.n}, {"beta", params.beta}, {"k", params.k}, {"R", params.R}};
        rec["regime"] = to_string(regime_classify(params));
        rec["pohozaev"] = {{"interior", defect.interior},
                           {"boundary", defect.boundary},
                           {"total", defect.total}};
        std::cout << rec.dump(2) << "\n";
    } else {
        std::cout << "regime=" << to_string(regime_classify(params))
                  << " interior=" << fmt17(defect.interior)
                  << " boundary=" << fmt17(defect.boundary) << " total=" << fmt17(defect.total)
                  << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------
// selftest

int cmd_selftest() {
    int failures = 0;
    const auto check = [&failures](bool ok, const std::string& name, const std::string& detail) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << detail << "\n";
        if (!ok) ++failures;
    };
    const double pi = 3.14159265358979323846;

    check(std::abs(sphere_area(2) - 2 * pi) < 1e-14 && std::abs(sphere_area(3) - 4 * pi) < 1e-13 &&
              std::abs(sphere_area(4) - 2 * pi * pi) < 1e-13,
          "sphere_area", "n=2,3,4 closed forms");

    check(std::abs(beta_moment(0, 1) - pi / 2) < 1e-14 && std::abs(beta_moment(1, 2) - 0.5) < 1e-15 &&
              std::abs(beta_moment(3, 3) - 0.25) < 1e-15,
          "beta_moment", "spot values");

    {
        bool ok = true;
        std::ostringstream detail;
        const double pairs[5][2] = {{2.5, 4.0}, {1.0, 2.5}, {4.2, 5.1}, {0.7, 3.3}, {6.0, 6.5}};
        for (const auto& p : pairs) {
            const double a = p[0], b = p[1];
            const auto f = [a, b](double r) { return std::pow(r, a - 1.0) * std::pow(1.0 + r * r, -b); };
            const double via_quad =
                adaptive_radial(f, 0.0, std::numeric_limits<double>::infinity(), 2);
            const double exact = sphere_area(2) * beta_moment(a, b);
            const double rel = std::abs(via_quad - exact) / exact;
            if (rel > 1e-10) {
                ok = false;
                detail << " a=" << a << ",b=" << b << " rel=" << rel;
            }
        }
        check(ok, "quadrature-oracle", ok ? "5 moment pairs within 1e-10" : detail.str());
    }

    {
        const auto f = [](double r) { return std::exp(-r * r); };
        const double v1 = adaptive_radial(f, 0.0, 5.0, 3);
        const double v2 = adaptive_radial(f, 0.0, 5.0, 3);
        check(v1 == v2, "determinism", "repeated adaptive_radial calls bit-identical");
    }

    const ProblemParams critical = ProblemParams::make(3, 1.0, 2.0, 1.0);
    const GridPtr grid = make_grid(critical, 400, 2.0);
    const RadialField bubble =
        normalize(bubble_field(BubbleSpec::standard(critical, 0.05), critical, grid), critical);
    {
        bool ok = true;
        std::ostringstream detail;
        for (double eps : {1e-3, 1e3}) {
            const RadialField v = rescale(bubble, critical, eps);
            ProblemParams blown = critical;
            blown.R = critical.R / eps;
            const double dn = std::abs(lq_norm(v, blown) - lq_norm(bubble, critical));
            const double dd =
                std::abs(dirichlet_energy(v, blown) - dirichlet_energy(bubble, critical)) /
                dirichlet_energy(bubble, critical);
            if (dn > 1e-13 || dd > 1e-13) {
                ok = false;
                detail << " eps=" << eps << " dnorm=" << dn << " ddir=" << dd;
            }
        }
        check(ok, "rescale", ok ? "norm and Dirichlet preserved to 1e-13" : detail.str());
    }
    {
        bool ok = true;
        for (double eps : {1e-3, 1e-1, 1e1}) {
            ok = ok && scaling_identity_check(bubble, critical, eps) <= 1e-12;
        }
        check(ok, "scaling-identity", "critical case discrepancy <= 1e-12");
    }

    {
        double residuals[3];
        int idx = 0;
        for (int M : {100, 200, 400}) {
            const GridPtr g = make_grid(critical, M, 1.0);
            const RadialField u = RadialField::sample(g, [](double r) { return 1.0 - r * r; });
            residuals[idx++] = substitution_check(u, critical);
        }
        const bool ok = residuals[0] > residuals[1] && residuals[1] > residuals[2] &&
                        residuals[0] / residuals[1] >= 1.8 && residuals[1] / residuals[2] >= 1.8;
        std::ostringstream detail;
        detail << residuals[0] << " -> " << residuals[1] << " -> " << residuals[2];
        check(ok, "substitution-identity", detail.str());
    }

    {
        bool ok = true;
        std::ostringstream detail;
        const GridPtr g = make_grid(critical, 200, 1.5);
        int fid = 0;
        for (double c : {0.3, 0.7, 1.4}) {
            const RadialField u = normalize(
                RadialField::sample(
                    g, [c](double r) { return (1.0 - r * r) * (1.0 + c * std::cos(2.0 * r)); }),
                critical);
            const RadialField gr = functional_gradient(u, critical);
            std::vector<double> dir(u.node_count(), 0.0);
            for (std::size_t j = 1; j + 1 < dir.size(); ++j) {
                dir[j] = std::sin(3.0 * u.grid().node(j) + fid);
            }
            double dot = 0.0;
            for (std::size_t j = 0; j < dir.size(); ++j) dot += gr.value(j) * dir[j];
            double best = 1e300;
            for (double h : {1e-4, 1e-5, 1e-6, 1e-7}) {
                std::vector<double> up(u.values()), um(u.values());
                for (std::size_t j = 0; j < dir.size(); ++j) {
                    up[j] += h * dir[j];
                    um[j] -= h * dir[j];
                }
                const double ep = total_energy(RadialField::unchecked(g, up), critical).total;
                const double em = total_energy(RadialField::unchecked(g, um), critical).total;
                const double fd = (ep - em) / (2.0 * h);
                best = std::min(best, std::abs(fd - dot) / std::max(1.0, std::abs(fd)));
            }
            if (best > 1e-5) {
                ok = false;
                detail << " field" << fid << " rel=" << best;
            }
            ++fid;
        }
        check(ok, "gradient", ok ? "directional derivatives within 1e-5" : detail.str());
    }

    {
        const ProblemParams p2 = ProblemParams::make(4, 2.0, 1.0, 1.0);
        const ProblemParams p4 = ProblemParams::make(4, 4.0, 1.0, 1.0);
        const ProblemParams p6 = ProblemParams::make(4, 6.0, 1.0, 1.0);
        const auto r2 = predicted_weighted_rate(p2);
        const auto r4 = predicted_weighted_rate(p4);
        const auto r6 = predicted_weighted_rate(p6);
        check(r2.regime == RateRegime::PowerLaw && r2.exponent == 0.5 &&
                  r4.regime == RateRegime::LogCritical && r4.exponent == 1.5 && r4.has_log &&
                  r6.regime == RateRegime::Saturated && r6.exponent == 1.5,
              "rate-prediction", "n=4 k=1 beta=2,4,6");
    }

    {
        const ProblemParams sub = ProblemParams::make(3, 0.0, 4.0, 1.0);
        const GridPtr g = make_grid(sub, 300, 2.0);
        SolverConfig cfg;
        cfg.max_iterations = 4000;
        const SolveResult res = minimize(sub, g, cfg);
        bool monotone = true;
        for (std::size_t i = 1; i < res.energy_history.size(); ++i) {
            monotone = monotone && res.energy_history[i] <=
                                       res.energy_history[i - 1] +
                                           1e-14 * std::abs(res.energy_history[i - 1]);
        }
        const double S3 = sobolev_constant(3).S;
        std::ostringstream detail;
        detail << "converged=" << res.converged << " S_est=" << res.S_estimate << " (S=" << S3
               << ")";
        check(res.converged && monotone && res.S_estimate > S3 &&
                  std::abs(lq_norm(res.field, sub) - 1.0) <= 1e-12,
              "subcritical-solve", detail.str());
    }

    {
        const BubbleSpec spec = BubbleSpec::standard(critical, 1e-2);
        const double mid = 0.5 * (spec.rho1 + spec.rho2);
        check(cutoff(0.0, spec) == 1.0 && cutoff(spec.rho2, spec) == 0.0 &&
                  std::abs(cutoff(mid, spec) - 0.5) < 1e-15,
              "cutoff", "endpoint and midpoint values");
    }

    {
        std::vector<std::pair<double, double>> samples;
        for (double eps : log_spaced_descending(1e-1, 1e-4, 7)) {
            samples.emplace_back(eps, std::pow(eps, 0.5));
        }
        const RateFit fit = fit_rate(samples, false);
        check(std::abs(fit.slope - 0.5) < 1e-12 && fit.r_squared > 1.0 - 1e-12, "fit-rate",
              "exact power recovered");
    }

    std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
    return failures == 0 ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"critmin: numerical laboratory for the quasi-linear critical quotient on a ball"};
    app.require_subcommand(1);

    CommonOpts regime_opts;
    CLI::App* regime_cmd = app.add_subcommand("regime", "classify (n, beta, k)");
    add_common(regime_cmd, regime_opts, /*with_grid=*/false);

    CommonOpts sweep_common;
    SweepOpts sweep_opts;
    CLI::App* sweep_cmd =
        app.add_subcommand("bubble-sweep", "bubble energies over an eps sweep + rate fit");
    add_common(sweep_cmd, sweep_common, /*with_grid=*/false);
    sweep_cmd->add_option("--eps-max", sweep_opts.eps_max, "largest eps");
    sweep_cmd->add_option("--eps-min", sweep_opts.eps_min, "smallest eps");
    sweep_cmd->add_option("--points", sweep_opts.points, "number of sweep points");
    sweep_cmd->add_flag("--log-correction", sweep_opts.log_correction,
                        "divide by |log eps| before fitting");
    sweep_cmd->add_flag("--svg", sweep_opts.svg, "emit a log-log SVG chart");

    CommonOpts min_common;
    SolverOpts min_solver;
    CLI::App* min_cmd = app.add_subcommand("minimize", "one constrained descent run");
    add_common(min_cmd, min_common);
    add_solver(min_cmd, min_solver);

    CommonOpts map_common;
    map_common.M = 400;
    MapOpts map_opts;
    SolverOpts map_solver;
    map_solver.max_iters = 4000;
    CLI::App* map_cmd = app.add_subcommand("map", "solve over a (beta, k) rectangle");
    add_common(map_cmd, map_common);
    map_cmd->add_option("--beta-min", map_opts.beta_min, "");
    map_cmd->add_option("--beta-max", map_opts.beta_max, "");
    map_cmd->add_option("--beta-steps", map_opts.beta_steps, "");
    map_cmd->add_option("--k-min", map_opts.k_min, "");
    map_cmd->add_option("--k-max", map_opts.k_max, "");
    map_cmd->add_option("--k-steps", map_opts.k_steps, "");
    add_solver(map_cmd, map_solver);

    CommonOpts poho_common;
    std::string poho_field;
    CLI::App* poho_cmd = app.add_subcommand("pohozaev", "defect of a stored field file");
    add_common(poho_cmd, poho_common, /*with_grid=*/false);
    poho_cmd->add_option("--field", poho_field, "field file to analyze")->required();

    CLI::App* selftest_cmd = app.add_subcommand("selftest", "quick invariant battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalidConfig;
    }

    try {
        if (regime_cmd->parsed()) return cmd_regime(regime_opts);
        if (sweep_cmd->parsed()) return cmd_bubble_sweep(sweep_common, sweep_opts);
        if (min_cmd->parsed()) return cmd_minimize(min_common, min_solver);
        if (map_cmd->parsed()) return cmd_map(map_common, map_opts, map_solver);
        if (poho_cmd->parsed()) return cmd_pohozaev(poho_common, poho_field);
        if (selftest_cmd->parsed()) return cmd_selftest();
    } catch (const QuadratureError& e) {
        std::cerr << "numerical failure: " << e.what() << " (best estimate " << e.best_estimate()
                  << " +- " << e.error_bound() << ")\n";
        return kExitNumericalFailure;
    } catch (const SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << " after " << e.history().size()
                  << " recorded energies\n";
        return kExitNumericalFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
    return 0;
}
