// One line per acceptance criterion: number, PASS/FAIL, measured quantities and
// the wall time against its budget. Exit status is nonzero if any line fails.
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tfd/cli.hpp"
#include "tfd/montecarlo.hpp"
#include "tfd/operators.hpp"
#include "tfd/processes.hpp"
#include "tfd/spectral.hpp"
#include "tfd/verify.hpp"

using namespace tfd;

namespace {

struct Outcome {
    bool ok;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double multiplier_oracle(double g, double a, double eta) {
    const double ag = std::abs(g);
    if (ag == 0.0) {
        return 0.0;
    }
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto f = [&](double w) { return std::exp(-eta * w) * std::sin(ag * w) * std::pow(w, -a); };
    const double half = std::numbers::pi / ag;
    boost::math::quadrature::tanh_sinh<double> ts;
    double sum = 0.0;
    for (int k = 0;; ++k) {
        const double lo = k * half, hi = (k + 1) * half;
        sum += k == 0 ? ts.integrate(f, lo, hi) : GK::integrate(f, lo, hi, 0);
        if (std::exp(-eta * hi) * std::pow(hi, -a) < 1e-17) {
            break;
        }
    }
    const double c = -1.0 / (2.0 * std::cos(std::numbers::pi * a / 2.0));
    return c * 2.0 * ag * sum / std::tgamma(1.0 - a);
}

Outcome eigenfunctions() {
    double worst = 0.0;
    for (double a : {0.3, 0.5, 0.8}) {
        for (double eta : {0.0, 0.5, 2.0}) {
            for (double s : {0.5, 1.0, 3.0}) {
                for (double x : {-1.0, 0.0, 1.0}) {
                    const double exact = (std::pow(eta + s, a) - std::pow(eta, a)) * std::exp(s * x);
                    const double got =
                        marchaud_tempered([s](double y) { return std::exp(s * y); }, x, TemperParams(a, eta));
                    worst = std::max(worst, std::abs(got - exact));
                }
            }
        }
    }
    return {worst <= 1e-6, fmt("max error %.2e over 81 points (tol 1e-6)", worst)};
}

Outcome multiplier() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ug(-10.0, 10.0), ua(0.1, 0.9), ue(0.2, 10.0);
    double closed = 0.0, expanded = 0.0, limit = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double g = ug(rng), a = ua(rng), eta = ue(rng);
        const TemperParams p(a, eta);
        const double psi = riesz_multiplier(g, p);
        closed = std::max(closed, std::abs(psi - multiplier_oracle(g, a, eta)));
        expanded = std::max(expanded, std::abs(psi - riesz_multiplier_expanded(g, p)));
    }
    for (double a : {0.3, 0.5, 0.8}) {
        for (int k = -100; k <= 100; ++k) {
            const double g = 0.1 * k;
            limit = std::max(limit, std::abs(riesz_multiplier(g, TemperParams(a, 1e-8)) + std::pow(std::abs(g), a)));
        }
    }
    return {closed <= 1e-8 && expanded <= 1e-12 && limit <= 1e-4,
            fmt("quadrature %.2e (tol 1e-8), expanded %.2e (tol 1e-12), eta->0 %.2e (tol 1e-4)", closed, expanded,
                limit)};
}

Outcome spectral_vs_pointwise() {
    const TemperParams p(0.5, 1.0);
    const std::size_t n = 1024;
    const Grid1D grid(-20.0, 20.0 - 40.0 / n, n);
    const RealFn bump = [](double x) { return std::exp(-x * x); };
    const SpectralField out = riesz_apply(SpectralField(sample_on_grid(bump, grid)), p);
    double worst = 0.0;
    for (std::size_t i = n / 2 - 80; i <= n / 2 + 80; i += 4) {
        worst = std::max(worst, std::abs(out.values()[i] - riesz_tempered_pointwise(bump, grid.point(i), p)));
    }
    return {worst <= 1e-5, fmt("max |spectral - pointwise| %.2e on |x| <= 3.1 (tol 1e-5)", worst)};
}

Outcome diffusion() {
    const TemperParams p(0.5, 1.0);
    const Grid1D g0 = diffusion_grid(1.0, p);
    const SampledField u = solve_riesz_diffusion(1.0, g0, p);
    double mass = 0.0, asym = 0.0;
    for (std::size_t i = 0; i < g0.size(); ++i) {
        mass += u[i] * g0.spacing();
        if (i > 0) {
            asym = std::max(asym, std::abs(u[i] - u[g0.size() - i]));
        }
    }
    // semigroup by direct circular convolution
    const std::size_t n = 2048;
    const double A = 40.0;
    const Grid1D g(-A, A - 2 * A / n, n);
    const SampledField u1 = solve_riesz_diffusion(0.3, g, p);
    const SampledField u2 = solve_riesz_diffusion(0.5, g, p);
    const SampledField u12 = solve_riesz_diffusion(0.8, g, p);
    double semi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += u1[j] * u2[(i + n + n / 2 - j) % n];
        }
        semi = std::max(semi, std::abs(acc * g.spacing() - u12[i]));
    }
    const double mass_err = std::abs(mass - 1.0);
    return {mass_err <= 1e-6 && asym <= 1e-10 && semi <= 1e-6,
            fmt("|mass-1| %.2e, asymmetry %.2e, semigroup %.2e", mass_err, asym, semi)};
}

Outcome drift_equation() {
    const DriftSpec d(2.0);
    const Grid1D x(-1, 1, 64), y(-1, 1, 64), t(0.2, 2.0, 256);
    const Theorem1Report r = residual_theorem1(d, x, y, t);
    const Theorem1Report f = residual_theorem1(d, refine(x), refine(y), refine(t));
    const double gain = r.combined.max_abs / f.combined.max_abs;
    return {r.combined.max_abs <= reference::theorem1_threshold && gain >= reference::min_refinement_gain,
            fmt("max_abs %.3e (threshold %.0e), refinement gain %.2f (min %.1f)", r.combined.max_abs,
                reference::theorem1_threshold, gain, reference::min_refinement_gain)};
}

Outcome folded_equation() {
    const DriftSpec d(1.0, 0.5);
    const Grid1D y(0.6, 4.0, 64), t(0.2, 2.0, 512);
    const ResidualReport plus = residual_theorem2(d, 0.5, y, t, TanhTerm::plus);
    const ResidualReport minus = residual_theorem2(d, 0.5, y, t, TanhTerm::minus);
    const ResidualReport fine = residual_theorem2(d, 0.5, refine(y), refine(t), TanhTerm::plus);
    const double gain = plus.max_abs / fine.max_abs;
    const double ratio = minus.max_abs / plus.max_abs;
    return {plus.max_abs <= reference::theorem2_threshold && gain >= reference::min_refinement_gain &&
                plus.boundary_max_abs <= 1e-12 && ratio >= 100.0,
            fmt("max_abs %.3e, gain %.2f, boundary %.1e, sign ratio %.1f", plus.max_abs, gain,
                plus.boundary_max_abs, ratio)};
}

Outcome subordinator() {
    bool ok = true;
    double worst_z = 0.0, worst_rate_z = 0.0;
    for (double eta : {0.0, 1.0}) {
        const TemperParams p(0.5, eta);
        const SampleBatch b = sample_tempered_batch(p, 1.0, {1000000, 20240501, 0});
        for (double lam : {0.5, 1.0, 2.0, 4.0}) {
            const EstimateWithError e = empirical_laplace(b, lam);
            const double exact = std::exp(-(std::pow(eta + lam, 0.5) - std::pow(eta, 0.5)));
            const double z = std::abs(e.value - exact) / e.std_error;
            worst_z = std::max(worst_z, z);
            ok = ok && z <= 3.0;
        }
        const double expected = std::exp(-std::pow(eta, 0.5));
        const double rate = static_cast<double>(b.samples.size()) / static_cast<double>(b.proposals);
        const double se = std::sqrt(expected * (1 - expected) / static_cast<double>(b.proposals));
        const double z = se > 0 ? std::abs(rate - expected) / se : (rate == expected ? 0.0 : INFINITY);
        worst_rate_z = std::max(worst_rate_z, z);
        ok = ok && z <= 3.0;
    }
    return {ok, fmt("worst Laplace deviation %.2f stderr, worst acceptance deviation %.2f stderr (max 3)", worst_z,
                    worst_rate_z)};
}

Outcome reflected_ks() {
    bool ok = true;
    std::string detail;
    struct Case {
        double mu, x, t;
    };
    std::uint64_t seed = 77;
    for (const Case c : {Case{1.0, 0.5, 1.0}, Case{2.0, 0.0, 0.5}}) {
        const DriftSpec d(c.mu, c.x);
        const SampleBatch b = sample_reflected_batch(d, c.t, {100000, seed++, 0});
        const double ks = ks_statistic(b, [&](double y) { return folded_drifted_cdf({c.x, y, c.t}, d); });
        const double crit = ks_critical_1pct(b.samples.size());
        ok = ok && ks < crit;
        detail += (detail.empty() ? "" : ", ") + fmt("(mu,x,t)=(%g,%g,%g) ", c.mu, c.x, c.t) +
                  fmt("D=%.4f vs %.4f", ks, crit);
    }
    return {ok, detail};
}

Outcome ml_laplace() {
    boost::math::quadrature::tanh_sinh<double> ts;
    double worst = 0.0;
    for (double lam : {1.0, 2.0}) {
        for (double xi : {0.5, 1.0, 2.0}) {
            const double num = ts.integrate(
                [&](double t) { return std::exp(-lam * t) * mittag_leffler_half(xi * std::sqrt(t)); }, 0.0, 200.0);
            worst = std::max(worst, std::abs(num - 1.0 / (std::sqrt(lam) * (xi + std::sqrt(lam)))));
        }
    }
    return {worst <= 1e-6, fmt("max error %.2e on 6 (lambda, xi) pairs (tol 1e-6)", worst)};
}

std::string cli_output(std::vector<std::string> args, int& code) {
    args.insert(args.begin(), "tfd");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return out.str();
}

Outcome determinism() {
    const std::vector<std::vector<std::string>> cmds{
        {"mc", "subordinator", "--alpha", "0.5", "--eta", "1", "--n", "200000", "--seed", "5"},
        {"mc", "subordinator", "--alpha", "0.3", "--eta", "0.5", "--n", "100000", "--seed", "6"},
        {"mc", "drifted", "--mu", "2", "--n", "100000", "--seed", "7"},
        {"mc", "reflected", "--mu", "1", "--x", "0.5", "--n", "100000", "--seed", "8"},
        {"mc", "inverse", "--n", "100000", "--seed", "9", "--samples"},
    };
    bool ok = true;
    int compared = 0;
    for (const auto& c : cmds) {
        std::string first;
        for (const char* threads : {"1", "4", "8", "1"}) {
            for (const char* format : {"csv", "json"}) {
                std::vector<std::string> args{"--threads", threads, "--format", format};
                args.insert(args.end(), c.begin(), c.end());
                int code = 0;
                const std::string out = cli_output(args, code);
                ok = ok && code == 0 && !out.empty();
                if (std::string(format) == "csv") {
                    if (first.empty()) {
                        first = out;
                    } else {
                        ok = ok && out == first;
                        ++compared;
                    }
                }
            }
        }
    }
    return {ok, fmt("%.0f repeated runs across thread counts 1/4/8 byte-identical", compared)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        double budget;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {1, 10, eigenfunctions}, {2, 5, multiplier},   {3, 10, spectral_vs_pointwise}, {4, 10, diffusion},
        {5, 60, drift_equation},      {6, 60, folded_equation},   {7, 30, subordinator},          {8, 20, reflected_ks},
        {9, 5, ml_laplace},      {10, 0, determinism},
    };
    bool all = true;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.budget == 0 || secs < c.budget;
        const bool pass = o.ok && in_time;
        all = all && pass;
        std::string timing = c.budget > 0 ? fmt("%.2f s (limit %.0f s)", secs, c.budget) : fmt("%.2f s", secs);
        std::printf("criterion %d: %s  %s; %s\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), timing.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
