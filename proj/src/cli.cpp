#include "tfd/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tfd/core.hpp"
#include "tfd/montecarlo.hpp"
#include "tfd/operators.hpp"
#include "tfd/parallel.hpp"
#include "tfd/processes.hpp"
#include "tfd/spectral.hpp"
#include "tfd/verify.hpp"

namespace tfd {
namespace {

using json = nlohmann::ordered_json;
using Cell = std::variant<double, std::string, std::uint64_t>;

// shortest round-trip, always with a decimal point or exponent
std::string fmt(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    if (s.find_first_of(".e") == std::string::npos) {
        s += ".0";
    }
    return s;
}

struct Result {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    json report = json::object();
    bool failed_check = false;
};

struct Global {
    std::string format = "csv";
    std::string output;
    std::string config;
    unsigned threads = 0;
};

using Action = std::function<Result(const Global&)>;

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        return fmt(*d);
    }
    if (const auto* u = std::get_if<std::uint64_t>(&c)) {
        return std::to_string(*u);
    }
    return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        return std::isfinite(*d) ? json(*d) : json(fmt(*d));
    }
    if (const auto* u = std::get_if<std::uint64_t>(&c)) {
        return json(*u);
    }
    return json(std::get<std::string>(c));
}

std::string report_text(const json& v) {
    if (v.is_number_float()) {
        return fmt(v.get<double>());
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    return v.dump();
}

void write_csv(std::ostream& os, const Result& r) {
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        os << (i ? "," : "") << r.columns[i];
    }
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << cell_text(row[i]);
        }
        os << '\n';
    }
    for (const auto& [k, v] : r.report.items()) {
        os << "# " << k << '=' << report_text(v) << '\n';
    }
}

void write_json(std::ostream& os, const std::string& command, const json& params, const Result& r) {
    json doc;
    doc["command"] = command;
    doc["params"] = params;
    json rows = json::array();
    for (const auto& row : r.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            obj[r.columns[i]] = cell_json(row[i]);
        }
        rows.push_back(std::move(obj));
    }
    doc["results"] = std::move(rows);
    doc["report"] = r.report;
    os << doc.dump(2) << '\n';
}

// "lo,hi,n"
Grid1D parse_grid(const std::string& text, const char* what) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        parts.push_back(item);
    }
    auto bad = [&] {
        return ValidationError(std::string(what) + ": expected lo,hi,n but got '" + text + "'");
    };
    if (parts.size() != 3) {
        throw bad();
    }
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw bad();
        }
        if (used != s.size()) {
            throw bad();
        }
        return v;
    };
    const double lo = num(parts[0]);
    const double hi = num(parts[1]);
    const double n = num(parts[2]);
    if (!(n >= 2.0) || n != std::floor(n) || n > 1e8) {
        throw bad();
    }
    return Grid1D(lo, hi, static_cast<std::size_t>(n));
}

std::vector<double> points_or_grid(const std::vector<double>& pts, const std::string& grid,
                                   const char* what) {
    if (!grid.empty()) {
        return parse_grid(grid, what).points();
    }
    return pts;
}

RealFn make_function(const std::string& name, double s) {
    if (name == "exp") {
        return [s](double x) { return std::exp(s * x); };
    }
    if (name == "cos") {
        return [s](double x) { return std::cos(s * x); };
    }
    if (name == "gauss") {
        return [s](double x) { return std::exp(-s * x * x); };
    }
    if (name == "const") {
        return [s](double) { return s; };
    }
    if (name == "power") {
        return [s](double x) { return x > 0.0 ? std::pow(x, s) : 0.0; };
    }
    throw ValidationError("unknown function '" + name + "'");
}

const char* kFuncHelp =
    "test function: exp = e^{s x}, cos = cos(s x), gauss = e^{-s x^2}, const = s, "
    "power = x^s for x > 0 and 0 otherwise";

struct QuadFlags {
    QuadConfig q;
    void add(CLI::App* app) {
        app->add_option("--eps", q.eps, "inner cutoff, length; Taylor expansion of the increment below it")
            ->check(CLI::PositiveNumber);
        app->add_option("--wmax", q.wmax,
                        "outer cutoff, length; inf integrates the tail exactly by a change of variables");
        app->add_option("--abs-tol", q.abs_tol, "absolute tolerance of the adaptive quadrature")
            ->check(CLI::PositiveNumber);
        app->add_option("--max-subdiv", q.max_subdiv, "maximum number of interval bisections");
    }
};

void add_alpha(CLI::App* app, double& a) {
    app->add_option("--alpha", a, "order alpha in (0, 1), dimensionless");
}
void add_eta(CLI::App* app, double& e) {
    app->add_option("--eta", e, "tempering rate eta >= 0, 1/length");
}
void add_mu(CLI::App* app, double& m) {
    app->add_option("--mu", m, "drift mu, length/time; the tempering rate is eta = mu^2/4");
}
void add_t(CLI::App* app, double& t, const char* extra = "") {
    app->add_option("--t", t, std::string("time t > 0, time units") + extra);
}

std::vector<Cell> residual_row(const ResidualReport& r) {
    return {r.tag,        r.grid,       r.max_abs,  r.l2,
            r.x_at_max,   r.y_at_max,   r.t_at_max, static_cast<std::uint64_t>(r.nodes),
            r.boundary_max_abs};
}

const std::vector<std::string> kResidualColumns = {
    "tag", "grid", "max_abs", "l2", "x_at_max", "y_at_max", "t_at_max", "nodes", "boundary_max_abs"};

// ---------------------------------------------------------------- symbol

Action add_symbol(CLI::App& root) {
    struct P {
        double alpha = 0.5, eta = 0.0;
        std::vector<double> lambda{1.0};
        std::string lambda_grid;
    };
    auto p = std::make_shared<P>();
    auto* app = root.add_subcommand(
        "symbol", "Laplace exponent (eta + lambda)^alpha - eta^alpha of the tempered stable "
                  "subordinator, equal to the eigenvalue of the tempered Marchaud derivative on "
                  "e^{lambda x}. CSV columns: lambda,value");
    add_alpha(app, p->alpha);
    add_eta(app, p->eta);
    auto* l = app->add_option("--lambda", p->lambda, "Laplace variable lambda >= 0, 1/length");
    app->add_option("--lambda-grid", p->lambda_grid, "lambda values as lo,hi,n")->excludes(l);
    return [p](const Global&) {
        const TemperParams tp(p->alpha, p->eta);
        Result r;
        r.columns = {"lambda", "value"};
        for (double lam : points_or_grid(p->lambda, p->lambda_grid, "--lambda-grid")) {
            r.rows.push_back({lam, laplace_symbol(lam, tp)});
        }
        return r;
    };
}

// ---------------------------------------------------------------- multiplier

Action add_multiplier(CLI::App& root) {
    struct P {
        double alpha = 0.5, eta = 1.0;
        std::vector<double> gamma{1.0};
        std::string gamma_grid;
    };
    auto p = std::make_shared<P>();
    auto* app = root.add_subcommand(
        "multiplier",
        "Fourier multiplier psi(gamma) of the tempered Riesz derivative, "
        "C 2|g| (eta^2+g^2)^{-(1-alpha)/2} sin((1-alpha) atan(|g|/eta)) with "
        "C = -1/(2 cos(pi alpha/2)), and its expanded cos/sin form. "
        "CSV columns: gamma,psi,psi_expanded");
    add_alpha(app, p->alpha);
    add_eta(app, p->eta);
    auto* g = app->add_option("--gamma", p->gamma, "angular frequency gamma, 1/length");
    app->add_option("--gamma-grid", p->gamma_grid, "gamma values as lo,hi,n")->excludes(g);
    return [p](const Global&) {
        const TemperParams tp(p->alpha, p->eta);
        Result r;
        r.columns = {"gamma", "psi", "psi_expanded"};
        for (double gam : points_or_grid(p->gamma, p->gamma_grid, "--gamma-grid")) {
            r.rows.push_back({gam, riesz_multiplier(gam, tp), riesz_multiplier_expanded(gam, tp)});
        }
        r.report["riesz_constant"] = riesz_constant(tp);
        return r;
    };
}

// ---------------------------------------------------------------- deriv

std::pair<CLI::App*, Action> add_deriv_space(CLI::App* parent, const std::string& name, const std::string& desc,
                       double (*op)(const RealFn&, double, const TemperParams&, const QuadConfig&)) {
    struct P {
        double alpha = 0.5, eta = 0.0, s = 1.0;
        std::string func = "exp";
        std::vector<double> x{0.0};
        std::string x_grid;
        QuadFlags quad;
    };
    auto p = std::make_shared<P>();
    auto* app = parent->add_subcommand(name, desc + " CSV columns: x,value");
    add_alpha(app, p->alpha);
    add_eta(app, p->eta);
    app->add_option("--func", p->func, kFuncHelp)
        ->check(CLI::IsMember({"exp", "cos", "gauss", "const", "power"}));
    app->add_option("--s", p->s, "parameter s of the test function");
    auto* x = app->add_option("--x", p->x, "evaluation points x, length");
    app->add_option("--x-grid", p->x_grid, "evaluation points as lo,hi,n")->excludes(x);
    p->quad.add(app);
    return {app, [p, op](const Global& g) {
        const TemperParams tp(p->alpha, p->eta);
        p->quad.q.validate();
        const RealFn f = make_function(p->func, p->s);
        const std::vector<double> xs = points_or_grid(p->x, p->x_grid, "--x-grid");
        std::vector<double> vals(xs.size());
        parallel_for(xs.size(), g.threads, [&](std::size_t i) { vals[i] = op(f, xs[i], tp, p->quad.q); });
        Result r;
        r.columns = {"x", "value"};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            r.rows.push_back({xs[i], vals[i]});
        }
        return r;
    }};
}

enum class TimeKind { rl, caputo, tempered };

std::pair<CLI::App*, Action> add_deriv_time(CLI::App* parent, const std::string& name, const std::string& desc,
                      TimeKind kind) {
    struct P {
        double eta = 0.0, s = 1.0;
        std::string func = "exp";
        std::string t_grid = "0,1,101";
    };
    auto p = std::make_shared<P>();
    auto* app = parent->add_subcommand(
        name, desc + " The value at t = 0 is not emitted. CSV columns: t,value");
    if (kind == TimeKind::tempered) {
        app->add_option("--eta", p->eta, "tempering rate eta >= 0, 1/time");
    }
    app->add_option("--func", p->func, kFuncHelp)
        ->check(CLI::IsMember({"exp", "cos", "gauss", "const", "power"}));
    app->add_option("--s", p->s, "parameter s of the test function");
    app->add_option("--t-grid", p->t_grid, "time grid lo,hi,n with lo = 0, time units");
    return {app, [p, kind](const Global&) {
        const Grid1D grid = parse_grid(p->t_grid, "--t-grid");
        const TimeSeries ts(sample_on_grid(make_function(p->func, p->s), grid));
        const SampledField d = kind == TimeKind::rl       ? rl_half(ts)
                               : kind == TimeKind::caputo ? caputo_half(ts)
                                                          : tempered_rl_half(ts, p->eta);
        Result r;
        r.columns = {"t", "value"};
        for (std::size_t k = 0; k < d.size(); ++k) {
            r.rows.push_back({d.grid().point(k), d[k]});
        }
        return r;
    }};
}

std::vector<std::pair<CLI::App*, Action>> add_deriv(CLI::App& root) {
    auto* app = root.add_subcommand("deriv", "Fractional derivatives of a test function");
    app->require_subcommand(1);
    std::vector<std::pair<CLI::App*, Action>> out;
    auto reg = [&](std::pair<CLI::App*, Action> a) { out.push_back(std::move(a)); };
    reg(add_deriv_space(app, "marchaud",
                        "Tempered Marchaud derivative int_0^inf (f(x)-f(x-w)) Pi(dw), "
                        "Pi(dw) = alpha e^{-eta w} w^{-alpha-1} dw / Gamma(1-alpha).",
                        &marchaud_tempered));
    reg(add_deriv_space(app, "weyl+",
                        "Tempered upper Weyl derivative: the Marchaud integral plus "
                        "eta int (f(x)-f(x-w)) e^{-eta w} w^{-alpha} dw / Gamma(1-alpha).",
                        &weyl_plus_tempered));
    reg(add_deriv_space(app, "weyl-",
                        "Tempered lower Weyl derivative, the mirror image of weyl+ "
                        "(forward increments, overall sign of -d/dx).",
                        &weyl_minus_tempered));
    reg(add_deriv_space(app, "riesz",
                        "Tempered Riesz derivative C (weyl+ + weyl-), C = -1/(2 cos(pi alpha/2)).",
                        &riesz_tempered_pointwise));
    reg(add_deriv_time(app, "rl", "Order-1/2 Riemann-Liouville derivative in time (L1 scheme).",
                       TimeKind::rl));
    reg(add_deriv_time(app, "caputo", "Order-1/2 Caputo derivative in time (L1 scheme).",
                       TimeKind::caputo));
    reg(add_deriv_time(app, "tempered-rl",
                       "Tempered order-1/2 derivative e^{-eta t} D^{1/2}(e^{eta t} f) - sqrt(eta) f.",
                       TimeKind::tempered));
    return out;
}

// ---------------------------------------------------------------- diffusion

Action add_diffusion(CLI::App& root) {
    struct P {
        double alpha = 0.5, eta = 1.0, t = 1.0;
        std::string grid;
    };
    auto p = std::make_shared<P>();
    auto* app = root.add_subcommand(
        "diffusion",
        "Density at time t of du/dt = (tempered Riesz derivative) u from a point mass at 0, "
        "by spectral inversion of exp(t psi). CSV columns: x,density");
    add_alpha(app, p->alpha);
    add_eta(app, p->eta);
    add_t(app, p->t);
    app->add_option("--grid", p->grid,
                    "spatial grid lo,hi,n, length; default picks a symmetric power-of-two grid");
    return [p](const Global&) {
        const TemperParams tp(p->alpha, p->eta);
        const Grid1D grid = p->grid.empty() ? diffusion_grid(p->t, tp) : parse_grid(p->grid, "--grid");
        const SampledField u = solve_riesz_diffusion(p->t, grid, tp);
        Result r;
        r.columns = {"x", "density"};
        for (std::size_t i = 0; i < u.size(); ++i) {
            r.rows.push_back({grid.point(i), u[i]});
        }
        r.report["mass"] = pairwise_sum(u.values()) * grid.spacing();
        r.report["n"] = grid.size();
        r.report["h"] = grid.spacing();
        return r;
    };
}

// ---------------------------------------------------------------- density

std::vector<std::pair<CLI::App*, Action>> add_density(CLI::App& root) {
    auto* app = root.add_subcommand("density", "Closed-form transition densities (variance 2t)");
    app->require_subcommand(1);
    std::vector<std::pair<CLI::App*, Action>> out;

    enum class Kind { u, v, g };
    auto make = [&](const std::string& name, const std::string& desc, Kind kind) {
        struct P {
            double mu = 1.0, x = 0.0, t = 1.0;
            std::vector<double> y{1.0};
            std::string y_grid;
        };
        auto p = std::make_shared<P>();
        auto* sub = app->add_subcommand(name, desc);
        if (kind != Kind::g) {
            add_mu(sub, p->mu);
        }
        sub->add_option("--x", p->x, "source point x, length");
        auto* y = sub->add_option("--y", p->y, "target points y, length");
        sub->add_option("--y-grid", p->y_grid, "target points as lo,hi,n")->excludes(y);
        add_t(sub, p->t);
        out.emplace_back(sub, [p, kind](const Global&) {
            const DriftSpec d(p->mu, p->x);
            Result r;
            r.columns = {"x", "y", "t", "value"};
            if (kind == Kind::v) {
                r.columns.push_back("cdf");
            }
            for (double y : points_or_grid(p->y, p->y_grid, "--y-grid")) {
                const EvalPoint pt{p->x, y, p->t};
                switch (kind) {
                    case Kind::u: r.rows.push_back({p->x, y, p->t, drifted_density(pt, d)}); break;
                    case Kind::g: r.rows.push_back({p->x, y, p->t, heat_kernel(pt)}); break;
                    case Kind::v:
                        r.rows.push_back({p->x, y, p->t, folded_drifted_density(pt, d),
                                          folded_drifted_cdf(pt, d)});
                        break;
                }
            }
            return r;
        });
    };
    make("u",
         "Density of B(t) + mu t + x: g exp(-mu^2 t/4 + (mu/2)(y-x)). CSV columns: x,y,t,value",
         Kind::u);
    make("v",
         "Density of |B(t) + mu t| + x on y >= x >= 0: g exp(-mu^2 t/4) 2 cosh((mu/2)(y-x)), "
         "with its distribution function. CSV columns: x,y,t,value,cdf",
         Kind::v);
    make("g", "Heat kernel exp(-(y-x)^2/4t)/sqrt(4 pi t). CSV columns: x,y,t,value", Kind::g);
    return out;
}

// ---------------------------------------------------------------- ml

Action add_ml(CLI::App& root) {
    struct P {
        std::vector<double> z{1.0};
        std::string z_grid;
    };
    auto p = std::make_shared<P>();
    auto* app = root.add_subcommand(
        "ml", "Mittag-Leffler function E_{1/2}(-z) = exp(z^2) erfc(z), z >= 0. CSV columns: z,value");
    auto* z = app->add_option("--z", p->z, "argument z >= 0, dimensionless");
    app->add_option("--z-grid", p->z_grid, "arguments as lo,hi,n")->excludes(z);
    return [p](const Global&) {
        Result r;
        r.columns = {"z", "value"};
        for (double z : points_or_grid(p->z, p->z_grid, "--z-grid")) {
            r.rows.push_back({z, mittag_leffler_half(z)});
        }
        return r;
    };
}

// ---------------------------------------------------------------- mc

struct McCommon {
    double t = 1.0;
    std::size_t n = 100000;
    std::uint64_t seed = 42;
    bool samples = false;
    void add(CLI::App* app) {
        add_t(app, t);
        app->add_option("--n", n, "number of draws")->check(CLI::PositiveNumber);
        app->add_option("--seed", seed, "random seed; output is identical for any --threads");
        app->add_flag("--samples", samples, "print the raw draws (columns index,value) instead of the summary");
    }
    BatchOptions batch(const Global& g) const { return {n, seed, g.threads}; }
};

Result raw_samples(const SampleBatch& b) {
    Result r;
    r.columns = {"index", "value"};
    r.rows.reserve(b.samples.size());
    for (std::size_t i = 0; i < b.samples.size(); ++i) {
        r.rows.push_back({static_cast<std::uint64_t>(i), b.samples[i]});
    }
    return r;
}

Result endpoint_summary(const SampleBatch& b, double exact_mean, const RealFn& cdf) {
    Result r;
    r.columns = {"quantity", "estimate", "stderr", "reference"};
    const EstimateWithError m = empirical_mean(b.samples);
    r.rows.push_back({std::string("mean"), m.value, m.std_error, exact_mean});
    const double ks = ks_statistic(b, cdf);
    const double crit = ks_critical_1pct(b.samples.size());
    r.rows.push_back({std::string("ks_statistic"), ks, std::string(""), crit});
    r.report["n"] = b.samples.size();
    r.report["ks_rejected_1pct"] = ks > crit;
    return r;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

std::vector<std::pair<CLI::App*, Action>> add_mc(CLI::App& root) {
    auto* app = root.add_subcommand("mc", "Monte Carlo sampling of the underlying processes");
    app->require_subcommand(1);
    std::vector<std::pair<CLI::App*, Action>> out;
    {
        struct P {
            double alpha = 0.5, eta = 0.0;
            std::vector<double> lambda{0.5, 1.0, 2.0, 4.0};
            McCommon mc;
        };
        auto p = std::make_shared<P>();
        auto* sub = app->add_subcommand(
            "subordinator",
            "Tempered stable subordinator H_t by exponential tilting of a positive stable draw. "
            "Summary compares E e^{-lambda H_t} with exp(-t((eta+lambda)^alpha - eta^alpha)). "
            "CSV columns: lambda,estimate,stderr,exact");
        add_alpha(sub, p->alpha);
        add_eta(sub, p->eta);
        sub->add_option("--lambda", p->lambda, "Laplace variables lambda >= 0, 1/length");
        p->mc.add(sub);
        out.emplace_back(sub, [p](const Global& g) {
            const TemperParams tp(p->alpha, p->eta);
            const SampleBatch b = sample_tempered_batch(tp, p->mc.t, p->mc.batch(g));
            if (p->mc.samples) {
                return raw_samples(b);
            }
            Result r;
            r.columns = {"lambda", "estimate", "stderr", "exact"};
            for (double lam : p->lambda) {
                const EstimateWithError e = empirical_laplace(b, lam);
                r.rows.push_back({lam, e.value, e.std_error, std::exp(-p->mc.t * laplace_symbol(lam, tp))});
            }
            const double rate = static_cast<double>(b.samples.size()) / static_cast<double>(b.proposals);
            const double expected = std::exp(-p->mc.t * std::pow(p->eta, p->alpha));
            r.report["n"] = b.samples.size();
            r.report["proposals"] = b.proposals;
            r.report["acceptance_rate"] = rate;
            r.report["expected_acceptance"] = expected;
            r.report["acceptance_stderr"] =
                std::sqrt(expected * (1.0 - expected) / static_cast<double>(b.proposals));
            return r;
        });
    }
    {
        struct P {
            double mu = 1.0, x = 0.0;
            McCommon mc;
        };
        auto p = std::make_shared<P>();
        auto* sub = app->add_subcommand(
            "drifted", "Endpoint x + mu t + sqrt(2t) N of drifted Brownian motion. Summary: mean "
                       "against x + mu t, KS distance against the Gaussian law with the 1% critical "
                       "value. CSV columns: quantity,estimate,stderr,reference");
        add_mu(sub, p->mu);
        sub->add_option("--x", p->x, "start point x, length");
        p->mc.add(sub);
        out.emplace_back(sub, [p](const Global& g) {
            const DriftSpec d(p->mu, p->x);
            const double t = p->mc.t;
            const SampleBatch b = sample_drifted_batch(d, t, p->mc.batch(g));
            if (p->mc.samples) {
                return raw_samples(b);
            }
            const double m = p->x + p->mu * t;
            const double sd = std::sqrt(2.0 * t);
            return endpoint_summary(b, m, [=](double y) { return normal_cdf((y - m) / sd); });
        });
    }
    {
        struct P {
            double mu = 1.0, x = 0.5;
            McCommon mc;
        };
        auto p = std::make_shared<P>();
        auto* sub = app->add_subcommand(
            "reflected",
            "Endpoint x + |sqrt(2t) N + mu t| of reflected drifted Brownian motion. Summary: mean "
            "against the folded-normal mean, KS distance against the closed-form distribution "
            "function. CSV columns: quantity,estimate,stderr,reference");
        add_mu(sub, p->mu);
        sub->add_option("--x", p->x, "start point x >= 0, length");
        p->mc.add(sub);
        out.emplace_back(sub, [p](const Global& g) {
            const DriftSpec d(p->mu, p->x);
            const double t = p->mc.t;
            const SampleBatch b = sample_reflected_batch(d, t, p->mc.batch(g));
            if (p->mc.samples) {
                return raw_samples(b);
            }
            const double m = p->mu * t;
            const double sd = std::sqrt(2.0 * t);
            const double folded = sd * std::sqrt(2.0 / std::numbers::pi) * std::exp(-m * m / (2.0 * sd * sd)) +
                                  m * (1.0 - 2.0 * normal_cdf(-m / sd));
            const double x = p->x;
            return endpoint_summary(b, x + folded,
                                    [=](double y) { return folded_drifted_cdf({x, y, t}, d); });
        });
    }
    {
        struct P {
            McCommon mc;
        };
        auto p = std::make_shared<P>();
        auto* sub = app->add_subcommand(
            "inverse", "Inverse 1/2-stable subordinator L_t, equal in law to |sqrt(2t) N|. Summary: "
                       "mean against 2 sqrt(t/pi), KS distance against erf(y / (2 sqrt t)). "
                       "CSV columns: quantity,estimate,stderr,reference");
        p->mc.add(sub);
        out.emplace_back(sub, [p](const Global& g) {
            const double t = p->mc.t;
            const SampleBatch b = sample_inverse_stable_half_batch(t, p->mc.batch(g));
            if (p->mc.samples) {
                return raw_samples(b);
            }
            return endpoint_summary(b, 2.0 * std::sqrt(t / std::numbers::pi), [=](double y) {
                return y > 0.0 ? std::erf(y / (2.0 * std::sqrt(t))) : 0.0;
            });
        });
    }
    return out;
}

// ---------------------------------------------------------------- verify

void refinement(Result& r, const ResidualReport& coarse, const ResidualReport& fine, bool& ok) {
    const double gain = coarse.max_abs / fine.max_abs;
    r.rows.push_back(residual_row(fine));
    r.report["refinement_gain"] = gain;
    r.report["min_refinement_gain"] = reference::min_refinement_gain;
    ok = ok && gain >= reference::min_refinement_gain;
}

std::vector<std::pair<CLI::App*, Action>> add_verify(CLI::App& root) {
    auto* app = root.add_subcommand(
        "verify", "Residual checks of the governing equations; exit status 3 when a check fails");
    app->require_subcommand(1);
    std::vector<std::pair<CLI::App*, Action>> out;
    const std::string residual_cols =
        " CSV columns: tag,grid,max_abs,l2,x_at_max,y_at_max,t_at_max,nodes,boundary_max_abs";
    const char* refine_help = "also run with both spacings halved and require max_abs to drop by 1.5x";
    {
        struct P {
            double x = 0.0, threshold = reference::g_threshold;
            std::string y_grid = "0.5,3,64", t_grid = "0.2,2,256";
            bool refine = false;
        };
        auto p = std::make_shared<P>();
        auto* sub = app->add_subcommand(
            "g", "Heat kernel identity D_t^{1/2} g + dg/dy = 0 on y > x, with boundary value "
                 "g(x,x,t) = 1/sqrt(4 pi t)." + residual_cols);
        sub->add_option("--x", p->x, "source point x, length");
        sub->add_option("--y-grid", p->y_grid, "target grid lo,hi,n with lo > x, length");
        sub->add_option("--t-grid", p->t_grid, "reported time grid lo,hi,n with lo > 0, time units");
        sub->add_option("--threshold", p->threshold, "pass if max_abs <= threshold");
        sub->add_flag("--refine", p->refine, refine_help);
        out.emplace_back(sub, [p](const Global& g) {
            const Grid1D yg = parse_grid(p->y_grid, "--y-grid");
            const Grid1D tg = parse_grid(p->t_grid, "--t-grid");
            const VerifyOptions opt{g.threads};
            const ResidualReport rep = check_g_half_derivative(p->x, yg, tg, opt);
            Result r;
            r.columns = kResidualColumns;
            r.rows.push_back(residual_row(rep));
            bool ok = rep.max_abs <= p->threshold && rep.boundary_max_abs < 1e-12;
            if (p->refine) {
                refinement(r, rep, check_g_half_derivative(p->x, refine(yg), refine(tg), opt), ok);
            }
            r.report["threshold"] = p->threshold;
            r.report["pass"] = ok;
            r.failed_check = !ok;
            return r;
        });
    }
    {
        struct P {
            double mu = 2.0, band = 0.1, threshold = reference::theorem1_threshold;
            std::string x_grid = "-1,1,64", y_grid = "-1,1,64", t_grid = "0.2,2,256";
            bool refine = false;
        };
        auto p = std::make_shared<P>();
        auto* sub = app->add_subcommand(
            "thm1",
            "Drifted density u solves D_t^{1/2,eta} u + sqrt(eta) u = a(x,y)(du/dx + sqrt(eta) u) "
            "= -a(x,y)(du/dy - sqrt(eta) u), eta = mu^2/4, a = +1 for x <= y and -1 otherwise. "
            "Rows: both forms combined, x-form, y-form." + residual_cols);
        add_mu(sub, p->mu);
        sub->add_option("--x-grid", p->x_grid, "source grid lo,hi,n, length (use --x-grid=-1,1,64)");
        sub->add_option("--y-grid", p->y_grid, "target grid lo,hi,n, length");
        sub->add_option("--t-grid", p->t_grid, "reported time grid lo,hi,n with lo > 0, time units");
        sub->add_option("--band", p->band, "nodes with |x - y| <= band are skipped, length");
        sub->add_option("--threshold", p->threshold, "pass if max_abs <= threshold");
        sub->add_flag("--refine", p->refine, refine_help);
        out.emplace_back(sub, [p](const Global& g) {
            const DriftSpec d(p->mu);
            const Grid1D xg = parse_grid(p->x_grid, "--x-grid");
            const Grid1D yg = parse_grid(p->y_grid, "--y-grid");
            const Grid1D tg = parse_grid(p->t_grid, "--t-grid");
            const VerifyOptions opt{g.threads, p->band};
            const Theorem1Report rep = residual_theorem1(d, xg, yg, tg, opt);
            Result r;
            r.columns = kResidualColumns;
            r.rows.push_back(residual_row(rep.combined));
            r.rows.push_back(residual_row(rep.x_form));
            r.rows.push_back(residual_row(rep.y_form));
            bool ok = rep.combined.max_abs <= p->threshold;
            if (p->refine) {
                const Theorem1Report fine = residual_theorem1(d, refine(xg), refine(yg), refine(tg), opt);
                refinement(r, rep.combined, fine.combined, ok);
            }
            r.report["form_ratio_max"] = rep.form_ratio_max;
            r.report["threshold"] = p->threshold;
            r.report["pass"] = ok;
            r.failed_check = !ok;
            return r;
        });
    }
    {
        struct P {
            double mu = 1.0, x = 0.5, threshold = reference::theorem2_threshold;
            std::string y_grid = "0.6,4,64", t_grid = "0.2,2,512";
            bool refine = false;
        };
        auto p = std::make_shared<P>();
        auto* sub = app->add_subcommand(
            "thm2",
            "Folded density v satisfies D_t^{1/2,eta} v = -dv/dy + sqrt(eta) tanh(sqrt(eta)(y-x)) v "
            "- (mu/2) v on y > x, with v(x,x,t) = e^{-eta t}/sqrt(pi t). Also runs the variant "
            "with the tanh sign flipped, which must be at least 100x worse." + residual_cols);
        add_mu(sub, p->mu);
        sub->add_option("--x", p->x, "source point x >= 0, length");
        sub->add_option("--y-grid", p->y_grid, "target grid lo,hi,n with lo > x, length");
        sub->add_option("--t-grid", p->t_grid, "reported time grid lo,hi,n with lo > 0, time units");
        sub->add_option("--threshold", p->threshold, "pass if max_abs <= threshold");
        sub->add_flag("--refine", p->refine, refine_help);
        out.emplace_back(sub, [p](const Global& g) {
            const DriftSpec d(p->mu, p->x);
            const Grid1D yg = parse_grid(p->y_grid, "--y-grid");
            const Grid1D tg = parse_grid(p->t_grid, "--t-grid");
            const VerifyOptions opt{g.threads};
            const ResidualReport plus = residual_theorem2(d, p->x, yg, tg, TanhTerm::plus, opt);
            const ResidualReport minus = residual_theorem2(d, p->x, yg, tg, TanhTerm::minus, opt);
            Result r;
            r.columns = kResidualColumns;
            r.rows.push_back(residual_row(plus));
            r.rows.push_back(residual_row(minus));
            const double ratio = minus.max_abs / plus.max_abs;
            bool ok = plus.max_abs <= p->threshold && plus.boundary_max_abs < 1e-12 &&
                      (p->mu == 0.0 || ratio >= 100.0);
            if (p->refine) {
                refinement(r, plus, residual_theorem2(d, p->x, refine(yg), refine(tg), TanhTerm::plus, opt),
                           ok);
            }
            r.report["sign_ratio"] = ratio;
            r.report["threshold"] = p->threshold;
            r.report["pass"] = ok;
            r.failed_check = !ok;
            return r;
        });
    }
    {
        struct P {
            double alpha = 0.5, eta = 1.0, s = 1.0, x = 0.0, tol = 1e-7;
            std::string func = "exp";
            QuadFlags quad;
        };
        auto p = std::make_shared<P>();
        auto* sub = app->add_subcommand(
            "weyl",
            "Upper Weyl derivative equals the Marchaud derivative plus eta times "
            "int (f(x)-f(x-w)) e^{-eta w} w^{-alpha} dw / Gamma(1-alpha), all from separate "
            "quadratures. CSV columns: x,discrepancy,tol");
        add_alpha(sub, p->alpha);
        add_eta(sub, p->eta);
        sub->add_option("--func", p->func, kFuncHelp)
            ->check(CLI::IsMember({"exp", "cos", "gauss", "const", "power"}));
        sub->add_option("--s", p->s, "parameter s of the test function");
        sub->add_option("--x", p->x, "evaluation point x, length");
        sub->add_option("--tol", p->tol, "pass if the discrepancy is below tol");
        p->quad.add(sub);
        out.emplace_back(sub, [p](const Global&) {
            p->quad.q.validate();
            const double disc =
                check_weyl_decomposition(make_function(p->func, p->s), p->x, TemperParams(p->alpha, p->eta),
                                         p->quad.q);
            Result r;
            r.columns = {"x", "discrepancy", "tol"};
            r.rows.push_back({p->x, disc, p->tol});
            r.report["pass"] = disc < p->tol;
            r.failed_check = !(disc < p->tol);
            return r;
        });
    }
    {
        struct P {
            std::string density = "u";
            double mu = 2.0, x = 0.0, t = 1e-4, min_mass = 0.9999;
        };
        auto p = std::make_shared<P>();
        auto* sub = app->add_subcommand(
            "init", "Point-mass initial condition: mass of the density within 0.1 of the source "
                    "(on the right of it for v) at small t. CSV columns: t,mass,min_mass");
        sub->add_option("--density", p->density, "u (drifted) or v (folded)")
            ->check(CLI::IsMember({"u", "v"}));
        add_mu(sub, p->mu);
        sub->add_option("--x", p->x, "source point x, length");
        add_t(sub, p->t, "; small, e.g. 1e-4");
        sub->add_option("--min-mass", p->min_mass, "pass if mass >= min-mass");
        out.emplace_back(sub, [p](const Global&) {
            const DriftSpec d(p->mu, p->x);
            const double mass =
                p->density == "u"
                    ? check_initial_concentration(drifted_density, d, p->t, Support::line)
                    : check_initial_concentration(folded_drifted_density, d, p->t, Support::right_of_source);
            Result r;
            r.columns = {"t", "mass", "min_mass"};
            r.rows.push_back({p->t, mass, p->min_mass});
            r.report["pass"] = mass >= p->min_mass;
            r.failed_check = !(mass >= p->min_mass);
            return r;
        });
    }
    return out;
}

// ---------------------------------------------------------------- config file

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string find_config(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            return args[i + 1];
        }
        if (args[i].rfind("--config=", 0) == 0) {
            return args[i].substr(9);
        }
    }
    return "";
}

bool has_flag(const std::vector<std::string>& args, const std::string& key) {
    const std::string opt = "--" + key;
    for (const auto& a : args) {
        if (a == opt || a.rfind(opt + "=", 0) == 0) {
            return true;
        }
    }
    return false;
}

// key = value lines become --key=value unless the flag is already on the command line
void merge_config(std::vector<std::string>& args, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot read config file '" + path + "'");
    }
    std::vector<std::string> extra;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || key == "config") {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
        }
        if (!has_flag(args, key)) {
            extra.push_back("--" + key + "=" + value);
        }
    }
    args.insert(args.end(), extra.begin(), extra.end());
}

// option text back to a JSON scalar so numbers and flags are not quoted
json typed(const std::string& v) {
    if (v == "true" || v == "false") {
        return v == "true";
    }
    const char* end = v.data() + v.size();
    std::int64_t i = 0;
    if (auto [p, ec] = std::from_chars(v.data(), end, i); ec == std::errc() && p == end) {
        return i;
    }
    double d = 0.0;
    if (auto [p, ec] = std::from_chars(v.data(), end, d); ec == std::errc() && p == end && !v.empty()) {
        return d;
    }
    return v;
}

json collect_params(const CLI::App* app) {
    json params = json::object();
    for (const CLI::Option* opt : app->get_options()) {
        const std::string name = opt->get_name(false, true);
        if (opt == app->get_help_ptr() || opt == app->get_help_all_ptr() || name.empty()) {
            continue;
        }
        std::string key = name.substr(name.find_first_not_of('-'));
        if (opt->count() > 0) {
            const auto& res = opt->results();
            std::string joined;
            for (std::size_t i = 0; i < res.size(); ++i) {
                joined += (i ? "," : "") + res[i];
            }
            params[key] = typed(joined);
        } else {
            params[key] = typed(opt->get_default_str());
        }
    }
    return params;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tempered fractional derivatives: operators, densities, sampling and residual checks.\n"
                 "Space and time are in arbitrary consistent units; rates are per unit length.\n"
                 "Exit status: 0 ok, 2 invalid input, 3 numerical failure or failed check.",
                 "tfd"};
    app.option_defaults()->always_capture_default();
    app.fallthrough();
    app.require_subcommand(1);
    Global g;
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output,-o", g.output, "write results to this file instead of stdout");
    app.add_option("--config", g.config, "file of key=value lines; command-line flags take precedence");
    app.add_option("--threads", g.threads, "worker threads, 0 = all cores; does not change results");

    std::vector<std::pair<CLI::App*, Action>> actions;
    {
        Action a = add_symbol(app);
        actions.emplace_back(app.get_subcommand("symbol"), std::move(a));
    }
    for (auto& pr : add_deriv(app)) {
        actions.push_back(std::move(pr));
    }
    {
        Action a = add_multiplier(app);
        actions.emplace_back(app.get_subcommand("multiplier"), std::move(a));
    }
    {
        Action a = add_diffusion(app);
        actions.emplace_back(app.get_subcommand("diffusion"), std::move(a));
    }
    for (auto& pr : add_density(app)) {
        actions.push_back(std::move(pr));
    }
    {
        Action a = add_ml(app);
        actions.emplace_back(app.get_subcommand("ml"), std::move(a));
    }
    for (auto& pr : add_mc(app)) {
        actions.push_back(std::move(pr));
    }
    for (auto& pr : add_verify(app)) {
        actions.push_back(std::move(pr));
    }

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        const std::string config = find_config(args);
        if (!config.empty()) {
            merge_config(args, config);
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    for (const auto& [sub, action] : actions) {
        if (!sub->parsed()) {
            continue;
        }
        std::string command;
        for (const CLI::App* a = sub; a != nullptr && a->get_parent() != nullptr; a = a->get_parent()) {
            command = a->get_name() + (command.empty() ? "" : " " + command);
        }
        try {
            const Result r = action(g);
            std::ostringstream buf;
            if (g.format == "json") {
                write_json(buf, command, collect_params(sub), r);
            } else {
                write_csv(buf, r);
            }
            if (g.output.empty()) {
                out << buf.str();
            } else {
                std::ofstream file(g.output, std::ios::binary);
                if (!file || !(file << buf.str()) || !file.flush()) {
                    err << "error: cannot write '" << g.output << "'\n";
                    return 2;
                }
            }
            if (r.failed_check) {
                err << command << ": check failed\n";
                return 3;
            }
            return 0;
        } catch (const ValidationError& e) {
            err << "error: " << e.what() << '\n';
            return 2;
        } catch (const NumericalError& e) {
            err << "numerical failure: " << e.what() << '\n';
            return 3;
        } catch (const std::exception& e) {
            err << "numerical failure: " << e.what() << '\n';
            return 3;
        }
    }
    err << "error: no command given\n";
    return 2;
}

}  // namespace tfd
