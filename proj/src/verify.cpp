#include "tfd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "tfd/operators.hpp"
#include "tfd/parallel.hpp"
#include "tfd/quadrature.hpp"

namespace tfd {
namespace {

struct TimeAxis {
    Grid1D full;
    std::size_t first;  // first reported node of `full`
};

TimeAxis time_axis(const Grid1D& tgrid) {
    if (!(tgrid.lo() > 0.0)) {
        throw ValidationError("residual time grid must start above t = 0");
    }
    const double h = tgrid.spacing();
    const auto steps = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(tgrid.hi() / h)));
    Grid1D full(0.0, tgrid.hi(), steps + 1);
    std::size_t first = 1;
    while (first < steps && full.point(first) < tgrid.lo() - 1e-12 * tgrid.hi()) {
        ++first;
    }
    return {full, first};
}

// 4th-order central difference of samples(i) at i, 2 <= i <= n-3
template <typename Sample>
double d4(Sample&& s, std::size_t i, double h) {
    return (-s(i + 2) + 8.0 * s(i + 1) - 8.0 * s(i - 1) + s(i - 2)) / (12.0 * h);
}

void require_stencil(const Grid1D& g, const char* what) {
    if (g.size() < 5) {
        throw ValidationError(std::string(what) + " needs at least 5 nodes for the difference stencil");
    }
}

class Accumulator {
public:
    void add(double r, double x, double y, double t) {
        const double a = std::abs(r);
        sum_sq_ += r * r;
        ++count_;
        if (a > max_abs_ || count_ == 1) {
            max_abs_ = a;
            x_ = x;
            y_ = y;
            t_ = t;
        }
    }

    void merge(const Accumulator& o) {
        if (o.count_ == 0) {
            return;
        }
        if (count_ == 0 || o.max_abs_ > max_abs_) {
            max_abs_ = o.max_abs_;
            x_ = o.x_;
            y_ = o.y_;
            t_ = o.t_;
        }
        sum_sq_ += o.sum_sq_;
        count_ += o.count_;
    }

    ResidualReport report(std::string tag, std::string grid) const {
        ResidualReport r;
        r.tag = std::move(tag);
        r.grid = std::move(grid);
        r.max_abs = max_abs_;
        r.l2 = count_ ? std::sqrt(sum_sq_ / static_cast<double>(count_)) : 0.0;
        r.x_at_max = x_;
        r.y_at_max = y_;
        r.t_at_max = t_;
        r.nodes = count_;
        return r;
    }

private:
    double sum_sq_ = 0.0;
    double max_abs_ = 0.0;
    double x_ = 0.0, y_ = 0.0, t_ = 0.0;
    std::size_t count_ = 0;
};

std::string describe(const Grid1D& g) {
    std::ostringstream os;
    os << "[" << g.lo() << ":" << g.hi() << "]x" << g.size();
    return os.str();
}

}  // namespace

Grid1D refine(const Grid1D& g) { return Grid1D(g.lo(), g.hi(), 2 * g.size() - 1); }

ResidualReport check_g_half_derivative(double x, const Grid1D& ygrid, const Grid1D& tgrid,
                                       const VerifyOptions& opt) {
    if (!(ygrid.lo() > x)) {
        throw ValidationError("y grid must lie strictly right of x");
    }
    require_stencil(ygrid, "y grid");
    const TimeAxis axis = time_axis(tgrid);
    const std::size_t nt = axis.full.size();
    const std::size_t ny = ygrid.size();

    auto g = [&](double y, double t) { return t > 0.0 ? heat_kernel({x, y, t}) : 0.0; };

    // D[j][k-1] = D_t^{1/2} g(x, y_j, t_k)
    std::vector<std::vector<double>> deriv(ny);
    parallel_for(ny - 4, opt.threads, [&](std::size_t jj) {
        const std::size_t j = jj + 2;
        std::vector<double> series(nt);
        for (std::size_t k = 0; k < nt; ++k) {
            series[k] = g(ygrid.point(j), axis.full.point(k));
        }
        const SampledField d = rl_half(TimeSeries(axis.full, std::move(series)));
        deriv[j].assign(d.values().begin(), d.values().end());
    });

    Accumulator acc;
    const double hy = ygrid.spacing();
    for (std::size_t j = 2; j + 2 < ny; ++j) {
        for (std::size_t k = axis.first; k < nt; ++k) {
            const double t = axis.full.point(k);
            const double dgdy = d4([&](std::size_t i) { return g(ygrid.point(i), t); }, j, hy);
            acc.add(deriv[j][k - 1] + dgdy, x, ygrid.point(j), t);
        }
    }
    ResidualReport rep = acc.report("g", "y" + describe(ygrid) + " t" + describe(tgrid));
    for (std::size_t k = axis.first; k < nt; ++k) {
        const double t = axis.full.point(k);
        rep.boundary_max_abs =
            std::max(rep.boundary_max_abs,
                     std::abs(heat_kernel({x, x, t}) - 1.0 / std::sqrt(4.0 * std::numbers::pi * t)));
    }
    return rep;
}

Theorem1Report residual_theorem1(const DriftSpec& d, const Grid1D& xgrid, const Grid1D& ygrid,
                                 const Grid1D& tgrid, const VerifyOptions& opt) {
    require_stencil(xgrid, "x grid");
    require_stencil(ygrid, "y grid");
    const TimeAxis axis = time_axis(tgrid);
    const double eta = d.eta();
    const double root = std::sqrt(eta);
    if (eta * axis.full.hi() > 700.0) {
        throw ValidationError("e^{eta t} overflows on this time grid");
    }
    const std::size_t nx = xgrid.size();
    const std::size_t ny = ygrid.size();
    const std::size_t nt = axis.full.size();
    const double band = opt.diagonal_band;

    auto u = [&](double x, double y, double t) {
        return t > 0.0 ? drifted_density({x, y, t}, d) : 0.0;
    };

    struct RowAcc {
        Accumulator both;
        Accumulator xs;
        Accumulator ys;
    };
    // per x row, merged in row order afterwards so the reduction is deterministic
    std::vector<RowAcc> rows(nx);
    parallel_for(nx - 4, opt.threads, [&](std::size_t ii) {
        const std::size_t i = ii + 2;
        const double x = xgrid.point(i);
        RowAcc& acc = rows[i];
        std::vector<double> series(nt);
        for (std::size_t j = 2; j + 2 < ny; ++j) {
            const double y = ygrid.point(j);
            if (std::abs(x - y) <= band) {
                continue;
            }
            for (std::size_t k = 0; k < nt; ++k) {
                series[k] = u(x, y, axis.full.point(k));
            }
            const SampledField dt = tempered_rl_half(TimeSeries(axis.full, series), eta);
            const double a = sign_weight(x, y);
            for (std::size_t k = axis.first; k < nt; ++k) {
                const double t = axis.full.point(k);
                const double uk = series[k];
                const double dudx =
                    d4([&](std::size_t m) { return u(xgrid.point(m), y, t); }, i, xgrid.spacing());
                const double dudy =
                    d4([&](std::size_t m) { return u(x, ygrid.point(m), t); }, j, ygrid.spacing());
                const double lhs = dt[k - 1] + root * uk;
                const double rx = lhs - a * (dudx + root * uk);
                const double ry = lhs + a * (dudy - root * uk);
                acc.xs.add(rx, x, y, t);
                acc.ys.add(ry, x, y, t);
                acc.both.add(std::abs(rx) >= std::abs(ry) ? rx : ry, x, y, t);
            }
        }
    });

    Accumulator both;
    Accumulator xs;
    Accumulator ys;
    for (const RowAcc& r : rows) {
        both.merge(r.both);
        xs.merge(r.xs);
        ys.merge(r.ys);
    }
    const std::string grid = "x" + describe(xgrid) + " y" + describe(ygrid) + " t" + describe(tgrid);
    Theorem1Report rep{both.report("thm1", grid), xs.report("thm1-x", grid),
                       ys.report("thm1-y", grid), 0.0};
    const double lo = std::min(rep.x_form.max_abs, rep.y_form.max_abs);
    const double hi = std::max(rep.x_form.max_abs, rep.y_form.max_abs);
    rep.form_ratio_max = lo > 0.0 ? hi / lo : (hi > 0.0 ? INFINITY : 1.0);
    return rep;
}

namespace {

struct FoldedField {
    TimeAxis axis;
    std::size_t ny;
    // res[j][k], filled for 2 <= j <= ny-3 and k >= axis.first
    std::vector<std::vector<double>> res;
};

FoldedField folded_field(const DriftSpec& d, double x, const Grid1D& ygrid,
                             const Grid1D& tgrid, TanhTerm term, const VerifyOptions& opt) {
    if (!(x >= 0.0)) {
        throw ValidationError("folded process needs x >= 0");
    }
    if (!(ygrid.lo() > x)) {
        throw ValidationError("y grid must lie strictly right of x");
    }
    require_stencil(ygrid, "y grid");
    const TimeAxis axis = time_axis(tgrid);
    const double eta = d.eta();
    const double root = std::sqrt(eta);
    if (eta * axis.full.hi() > 700.0) {
        throw ValidationError("e^{eta t} overflows on this time grid");
    }
    const std::size_t ny = ygrid.size();
    const std::size_t nt = axis.full.size();

    auto v = [&](double y, double t) {
        return t > 0.0 ? folded_drifted_density({x, y, t}, d) : 0.0;
    };

    std::vector<std::vector<double>> res(ny);
    parallel_for(ny - 4, opt.threads, [&](std::size_t jj) {
        const std::size_t j = jj + 2;
        const double y = ygrid.point(j);
        std::vector<double> series(nt);
        for (std::size_t k = 0; k < nt; ++k) {
            series[k] = v(y, axis.full.point(k));
        }
        const SampledField dt = tempered_rl_half(TimeSeries(axis.full, series), eta);
        double coeff = 0.0;
        switch (term) {
            case TanhTerm::plus: coeff = root * std::tanh(root * (y - x)); break;
            case TanhTerm::minus: coeff = -root * std::tanh(root * (y - x)); break;
            case TanhTerm::constant_one: coeff = root; break;
        }
        res[j].assign(nt, 0.0);
        for (std::size_t k = axis.first; k < nt; ++k) {
            const double t = axis.full.point(k);
            const double dvdy =
                d4([&](std::size_t m) { return v(ygrid.point(m), t); }, j, ygrid.spacing());
            res[j][k] = dt[k - 1] + dvdy - coeff * series[k] + 0.5 * d.mu() * series[k];
        }
    });
    return {axis, ny, std::move(res)};
}

}  // namespace

ResidualReport residual_theorem2(const DriftSpec& d, double x, const Grid1D& ygrid,
                                 const Grid1D& tgrid, TanhTerm term, const VerifyOptions& opt) {
    const FoldedField field = folded_field(d, x, ygrid, tgrid, term, opt);
    const auto& axis = field.axis;
    Accumulator acc;
    for (std::size_t j = 2; j + 2 < field.ny; ++j) {
        for (std::size_t k = axis.first; k < axis.full.size(); ++k) {
            acc.add(field.res[j][k], x, ygrid.point(j), axis.full.point(k));
        }
    }
    const char* tag = term == TanhTerm::plus ? "thm2" : term == TanhTerm::minus ? "thm2-minus" : "thm2-const";
    ResidualReport rep = acc.report(tag, "y" + describe(ygrid) + " t" + describe(tgrid));
    const double eta = d.eta();
    for (std::size_t k = axis.first; k < axis.full.size(); ++k) {
        const double t = axis.full.point(k);
        const double expected = std::exp(-eta * t) / std::sqrt(std::numbers::pi * t);
        rep.boundary_max_abs =
            std::max(rep.boundary_max_abs, std::abs(folded_drifted_density({x, x, t}, d) - expected));
    }
    return rep;
}

double theorem2_coefficient_gap(const DriftSpec& d, double x, const Grid1D& ygrid,
                                const Grid1D& tgrid, const VerifyOptions& opt) {
    const FoldedField a = folded_field(d, x, ygrid, tgrid, TanhTerm::plus, opt);
    const FoldedField b = folded_field(d, x, ygrid, tgrid, TanhTerm::constant_one, opt);
    double gap = 0.0;
    for (std::size_t j = 2; j + 2 < a.ny; ++j) {
        for (std::size_t k = a.axis.first; k < a.axis.full.size(); ++k) {
            gap = std::max(gap, std::abs(a.res[j][k] - b.res[j][k]));
        }
    }
    return gap;
}

double check_weyl_decomposition(const RealFn& f, double x, const TemperParams& p,
                                const QuadConfig& q) {
    const double weyl = weyl_plus_tempered(f, x, p, q);
    const double marchaud = marchaud_tempered(f, x, p, q);
    double correction = 0.0;
    if (p.eta() > 0.0) {
        const double fx = f(x);
        const double d1 = detail::central_first(f, x, q.eps / 10.0);
        const double d2 = -0.5 * detail::central_second(f, x, 1e-4);
        correction = detail::tempered_increment_integral([&](double w) { return f(x - w); }, fx, d1,
                                                         d2, p, 0.0, 1.0, q);
    }
    return std::abs(weyl - (marchaud + p.eta() * correction));
}

double check_initial_concentration(const DensityFn& density, const DriftSpec& d, double t,
                                   Support support) {
    if (!(t > 0.0)) {
        throw ValidationError("concentration check needs t > 0");
    }
    const double x = d.x0();
    const double lo = support == Support::line ? x - 0.1 : x;
    auto f = [&](double y) { return density({x, y, t}, d); };
    // split at the source so the peak sits on a panel boundary
    double mass = integrate_adaptive(f, x, x + 0.1, 1e-12, 4000).value;
    if (lo < x) {
        mass += integrate_adaptive(f, lo, x, 1e-12, 4000).value;
    }
    return mass;
}

}  // namespace tfd
