#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include "tfd/operators.hpp"
#include "tfd/spectral.hpp"

using namespace tfd;

namespace {

// int_0^inf incr(w) * kernel(w) dw by double-exponential rules, split at w = 1
template <typename F>
double de_integral(F&& integrand) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    return ts.integrate(integrand, 0.0, 1.0) + es.integrate(integrand, 1.0, std::numeric_limits<double>::infinity());
}

// incr(w) = f(x) - f(x - w), supplied in a cancellation-free form
using Incr = std::function<double(double)>;

double marchaud_oracle(const Incr& incr, double a, double eta) {
    return de_integral([&](double w) {
        // (d / w) w^{-a} keeps tiny w from overflowing the kernel
        return incr(w) / w * a * std::exp(-eta * w) * std::pow(w, -a) / std::tgamma(1.0 - a);
    });
}

double weyl_plus_oracle(const Incr& incr, double a, double eta) {
    const double jump = marchaud_oracle(incr, a, eta);
    if (eta == 0.0) {
        return jump;
    }
    return jump + eta * de_integral([&](double w) {
               return incr(w) * std::exp(-eta * w) * std::pow(w, -a) / std::tgamma(1.0 - a);
           });
}

// e^{-x^2}: f(x) - f(x-w) = -e^{-x^2} expm1(2xw - w^2)
Incr bump_incr(double x) {
    return [x](double w) { return -std::exp(-x * x) * std::expm1(2 * x * w - w * w); };
}

// Re e^{cx}, c = 0.3 + 2i: f(x) - f(x-w) = -Re(e^{cx} expm1(-cw))
Incr wave_incr(double x) {
    return [x](double w) {
        const double re = -0.3 * w, im = -2.0 * w;
        const std::complex<double> em1(std::expm1(re) * std::cos(im) - 2.0 * std::pow(std::sin(im / 2), 2),
                                       std::exp(re) * std::sin(im));
        return -std::real(std::exp(std::complex<double>(0.3, 2.0) * x) * em1);
    };
}

// 1/(1+x^2): f(x) - f(x-w) = w(w - 2x) / ((1+x^2)(1+(x-w)^2))
Incr lorentz_incr(double x) {
    return [x](double w) { return w * (w - 2 * x) / ((1 + x * x) * (1 + (x - w) * (x - w))); };
}

RealFn exp_fn(double s) {
    return [s](double x) { return std::exp(s * x); };
}

}  // namespace

TEST_CASE("marchaud examples") {
    const TemperParams half0(0.5, 0.0);
    CHECK(marchaud_tempered(exp_fn(1), 0.0, half0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(marchaud_tempered(exp_fn(3), 0.0, TemperParams(0.5, 1.0)) == doctest::Approx(1.0).epsilon(1e-8));
    for (double a : {0.2, 0.5, 0.9}) {
        for (double eta : {0.0, 1.0}) {
            for (double x : {-2.0, 0.0, 3.0}) {
                CHECK(marchaud_tempered([](double) { return 7.0; }, x, TemperParams(a, eta)) == 0.0);
            }
        }
    }
}

TEST_CASE("marchaud agrees with a double-exponential quadrature oracle") {
    const RealFn bump = [](double x) { return std::exp(-x * x); };
    const RealFn wave = [](double x) { return std::cos(2 * x) * std::exp(0.3 * x); };
    for (double a : {0.3, 0.5, 0.8}) {
        for (double eta : {0.5, 2.0}) {
            const TemperParams p(a, eta);
            CHECK(marchaud_tempered(bump, 0.4, p) == doctest::Approx(marchaud_oracle(bump_incr(0.4), a, eta)).epsilon(1e-7));
            CHECK(marchaud_tempered(wave, -0.7, p) == doctest::Approx(marchaud_oracle(wave_incr(-0.7), a, eta)).epsilon(1e-7));
        }
    }
}

TEST_CASE("eigenfunction identity on the alpha x eta x x grid") {
    const QuadConfig q;
    double worst = 0.0;
    for (double a : {0.3, 0.5, 0.8}) {
        for (double eta : {0.0, 0.5, 2.0}) {
            for (double s : {0.5, 1.0, 3.0}) {
                for (double x : {-1.0, 0.0, 1.0}) {
                    const TemperParams p(a, eta);
                    const double exact = laplace_symbol(s, p) * std::exp(s * x);
                    worst = std::max(worst, std::abs(marchaud_tempered(exp_fn(s), x, p, q) - exact));
                }
            }
        }
    }
    MESSAGE("worst eigenfunction error " << worst);
    CHECK(worst <= 10 * q.abs_tol);
}

TEST_CASE("upper weyl derivative") {
    CHECK(weyl_plus_tempered(exp_fn(1), 0.0, TemperParams(0.5, 0.0)) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(weyl_plus_tempered(exp_fn(1), 0.0, TemperParams(0.5, 1.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
    CHECK(weyl_plus_tempered([](double) { return -2.5; }, 1.0, TemperParams(0.4, 3.0)) == 0.0);
    // closed form s (eta + s)^{a-1} e^{s x}
    for (double a : {0.3, 0.7}) {
        for (double eta : {0.0, 0.5, 2.0}) {
            for (double s : {0.5, 2.0}) {
                const double exact = s * std::pow(eta + s, a - 1.0) * std::exp(s * 0.5);
                CHECK(weyl_plus_tempered(exp_fn(s), 0.5, TemperParams(a, eta)) == doctest::Approx(exact).epsilon(1e-8));
            }
        }
    }
    const RealFn bump = [](double x) { return 1.0 / (1.0 + x * x); };
    CHECK(weyl_plus_tempered(bump, 0.3, TemperParams(0.6, 1.5)) ==
          doctest::Approx(weyl_plus_oracle(lorentz_incr(0.3), 0.6, 1.5)).epsilon(1e-7));
}

TEST_CASE("lower weyl derivative") {
    CHECK(weyl_minus_tempered(exp_fn(-1), 0.0, TemperParams(0.5, 0.0)) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(weyl_minus_tempered(exp_fn(0.5), 0.0, TemperParams(0.5, 1.0)) ==
          doctest::Approx(-0.5 / std::sqrt(0.5)).epsilon(1e-8));
    CHECK(weyl_minus_tempered([](double) { return 4.0; }, -1.0, TemperParams(0.5, 1.0)) == 0.0);
    // reflection: lower derivative of f at x is the upper derivative of f(-.) at -x
    // f(x) = e^{-x^2} is even, so f(-.) = f and the oracle is the upper form at -x
    const RealFn f = [](double x) { return std::exp(-x * x); };
    for (double eta : {0.0, 0.7}) {
        for (double a : {0.45, 0.8}) {
            const TemperParams p(a, eta);
            CHECK(weyl_minus_tempered(f, 0.2, p) == doctest::Approx(weyl_plus_oracle(bump_incr(-0.2), a, eta)).epsilon(1e-7));
        }
    }
}

TEST_CASE("riesz pointwise") {
    const TemperParams p(0.5, 1.0);
    CHECK(riesz_tempered_pointwise([](double) { return 1.0; }, 0.0, p) == 0.0);
    const RealFn c1 = [](double x) { return std::cos(x); };
    CHECK(riesz_tempered_pointwise(c1, 0.0, p) == doctest::Approx(-0.45509).epsilon(1e-5));
    CHECK(riesz_tempered_pointwise(c1, 0.0, p) == doctest::Approx(riesz_multiplier(1.0, p)).epsilon(1e-8));
    // near-untempered limit: oscillatory tail needs a finite outer cutoff
    QuadConfig q;
    q.wmax = 2000.0;
    const RealFn c4 = [](double x) { return std::cos(4 * x); };
    CHECK(riesz_tempered_pointwise(c4, 0.0, TemperParams(0.5, 1e-6), q) == doctest::Approx(-2.0).epsilon(1e-4));
    // cos is an eigenfunction at any x
    for (double x : {-0.8, 0.6}) {
        for (double a : {0.3, 0.8}) {
            const TemperParams pa(a, 0.7);
            const RealFn c = [](double y) { return std::cos(1.7 * y); };
            CHECK(riesz_tempered_pointwise(c, x, pa) ==
                  doctest::Approx(riesz_multiplier(1.7, pa) * std::cos(1.7 * x)).epsilon(1e-7));
        }
    }
}

TEST_CASE("riesz symmetry under reflection") {
    const RealFn f = [](double x) { return std::exp(-x * x) * (1.0 + 0.3 * std::sin(x)); };
    const RealFn g = [&](double x) { return f(-x); };
    for (double x : {-1.0, 0.25, 2.0}) {
        const TemperParams p(0.6, 0.8);
        CHECK(riesz_tempered_pointwise(f, x, p) == doctest::Approx(riesz_tempered_pointwise(g, -x, p)).epsilon(1e-9));
    }
}

TEST_CASE("operators are linear") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const RealFn f = [](double x) { return std::exp(-x * x); };
    const RealFn g = [](double x) { return 1.0 / (1.0 + x * x); };
    const QuadConfig q;
    using Op = double (*)(const RealFn&, double, const TemperParams&, const QuadConfig&);
    for (Op op : {Op(&marchaud_tempered), Op(&weyl_plus_tempered), Op(&weyl_minus_tempered),
                  Op(&riesz_tempered_pointwise)}) {
        for (int trial = 0; trial < 3; ++trial) {
            const double a = u(rng), b = u(rng), x = u(rng);
            const TemperParams p(0.5, 1.0);
            const RealFn h = [&](double y) { return a * f(y) + b * g(y); };
            const double lhs = op(h, x, p, q);
            const double rhs = a * op(f, x, p, q) + b * op(g, x, p, q);
            CHECK(std::abs(lhs - rhs) <= 10 * q.abs_tol * (std::abs(a) + std::abs(b) + 1.0));
        }
    }
}

TEST_CASE("quadrature errors surface") {
    QuadConfig q;
    q.max_subdiv = 1;
    const RealFn wild = [](double x) { return std::sin(50 * x) * std::exp(-0.01 * x * x); };
    CHECK_THROWS_AS(marchaud_tempered(wild, 0.0, TemperParams(0.5, 0.1), q), NumericalError);
    const RealFn blow = [](double x) { return std::exp(-1000 * x); };
    CHECK_THROWS_AS(marchaud_tempered(blow, 0.0, TemperParams(0.5, 0.0)), NumericalError);
    q = {};
    q.eps = -1;
    CHECK_THROWS_AS(marchaud_tempered(exp_fn(1), 0.0, TemperParams(0.5, 0.0), q), ValidationError);
}

// ---------------------------------------------------------------- time-fractional

namespace {
TimeSeries series(const RealFn& f, double T, std::size_t n) { return TimeSeries(sample_on_grid(f, Grid1D(0.0, T, n))); }
}  // namespace

TEST_CASE("time series must start at zero and have three nodes") {
    CHECK_THROWS_AS(TimeSeries(Grid1D(0.1, 1.0, 5), std::vector<double>(5, 1.0)), ValidationError);
    CHECK_THROWS_AS(rl_half(series([](double) { return 1.0; }, 1.0, 2)), ValidationError);
}

TEST_CASE("rl_half of simple functions") {
    const double c = 2.5;
    const SampledField k = rl_half(series([c](double) { return c; }, 2.0, 201));
    REQUIRE(k.size() == 200);
    CHECK(k.grid().lo() == doctest::Approx(0.01));
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double t = k.grid().point(i);
        CHECK(k[i] == doctest::Approx(c / std::sqrt(std::numbers::pi * t)).epsilon(1e-13));
    }
    // the L1 scheme is exact on linear data
    const SampledField lin = rl_half(series([](double t) { return t; }, 1.0, 101));
    for (std::size_t i = 0; i < lin.size(); ++i) {
        CHECK(lin[i] == doctest::Approx(2.0 * std::sqrt(lin.grid().point(i) / std::numbers::pi)).epsilon(1e-12));
    }
    // sqrt t: half-derivative is sqrt(pi)/2; the scheme converges away from t = 0
    const SampledField sq = rl_half(series([](double t) { return std::sqrt(t); }, 1.0, 4001));
    CHECK(sq[sq.size() - 1] == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(2e-3));
    CHECK(sq[sq.size() / 2] == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(2e-3));
}

TEST_CASE("caputo_half") {
    const SampledField k = caputo_half(series([](double) { return -3.0; }, 1.0, 11));
    for (double v : k.values()) {
        CHECK(v == 0.0);
    }
    const SampledField lin = caputo_half(series([](double t) { return t; }, 3.0, 61));
    for (std::size_t i = 0; i < lin.size(); ++i) {
        CHECK(lin[i] == doctest::Approx(2.0 * std::sqrt(lin.grid().point(i) / std::numbers::pi)).epsilon(1e-12));
    }
    // D^{1/2} e^t = e^t erf(sqrt t) for the Caputo form
    const TimeSeries e = series([](double t) { return std::exp(t); }, 1.0, 1001);
    const SampledField ce = caputo_half(e);
    const SampledField re = rl_half(e);
    const std::size_t last = ce.size() - 1;
    CHECK(ce[last] == doctest::Approx(std::exp(1.0) * std::erf(1.0)).epsilon(1e-4));
    CHECK(std::abs(ce[last] - (re[last] - 1.0 / std::sqrt(std::numbers::pi))) < 1e-4);
}

TEST_CASE("rl minus caputo is the initial-value term") {
    const TimeSeries ts = series([](double t) { return std::cos(3 * t) + 0.5; }, 2.0, 301);
    const SampledField r = rl_half(ts);
    const SampledField c = caputo_half(ts);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double t = r.grid().point(i);
        CHECK(std::abs(r[i] - c[i] - ts.f0() / std::sqrt(std::numbers::pi * t)) <= 1e-10);
    }
}

TEST_CASE("tempered_rl_half") {
    const double eta = 1.0;
    const SampledField d = tempered_rl_half(series([eta](double t) { return std::exp(-eta * t); }, 3.0, 301), eta);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double t = d.grid().point(i);
        const double exact = std::exp(-t) / std::sqrt(std::numbers::pi * t) - std::exp(-t);
        CHECK(d[i] == doctest::Approx(exact).epsilon(1e-11));
    }

    const TimeSeries ts = series([](double t) { return std::sin(t) + 1.0; }, 2.0, 101);
    const SampledField a = tempered_rl_half(ts, 0.0);
    const SampledField b = rl_half(ts);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
    }

    CHECK_THROWS_AS(tempered_rl_half(series([](double) { return 1.0; }, 100.0, 11), 8.0), ValidationError);
    CHECK_THROWS_AS(tempered_rl_half(ts, -1.0), ValidationError);
}

TEST_CASE("tempered_rl_half laplace spot check") {
    // int e^{-3t} D f dt for f = e^{-t}, eta = 1 equals (sqrt(4) - 1) / 4
    const double lambda = 3.0, T = 20.0;
    const std::size_t n = 20001;
    const SampledField d = tempered_rl_half(series([](double t) { return std::exp(-t); }, T, n), 1.0);
    const double h = T / static_cast<double>(n - 1);
    // [0, t1]: output ~ c t^{-1/2}, integrated analytically from the value at t1
    double acc = 2.0 * h * d[0] * std::exp(-lambda * h);
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        const double t0 = d.grid().point(i), t1 = d.grid().point(i + 1);
        acc += 0.5 * h * (std::exp(-lambda * t0) * d[i] + std::exp(-lambda * t1) * d[i + 1]);
    }
    CHECK(acc == doctest::Approx(0.25).epsilon(2e-3));
}
