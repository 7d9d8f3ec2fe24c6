#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <optional>

#include "tfd/montecarlo.hpp"
#include "tfd/operators.hpp"
#include "tfd/processes.hpp"
#include "tfd/spectral.hpp"
#include "tfd/verify.hpp"

namespace py = pybind11;
using namespace tfd;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
    // no base handle, so pybind11 copies the buffer
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

// (times, values) of a field, times taken from its grid
py::tuple field_tuple(const SampledField& f) {
    return py::make_tuple(to_array(f.grid().points()), to_array(f.values()));
}

TimeSeries series(double t_max, const std::vector<double>& values) {
    return TimeSeries(Grid1D(0.0, t_max, values.size()), values);
}

// elementwise over any array-like, keeping its shape
template <typename Fn>
py::array_t<double> map_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& in, Fn&& fn) {
    py::array_t<double> out(in.request().shape);
    const double* src = in.data();
    double* dst = out.mutable_data();
    for (py::ssize_t i = 0; i < in.size(); ++i) {
        dst[i] = fn(src[i]);
    }
    return out;
}

py::dict report_dict(const ResidualReport& r) {
    py::dict d;
    d["tag"] = r.tag;
    d["grid"] = r.grid;
    d["max_abs"] = r.max_abs;
    d["l2"] = r.l2;
    d["x_at_max"] = r.x_at_max;
    d["y_at_max"] = r.y_at_max;
    d["t_at_max"] = r.t_at_max;
    d["nodes"] = r.nodes;
    d["boundary_max_abs"] = r.boundary_max_abs;
    return d;
}

py::dict batch_dict(SampleBatch&& b) {
    py::dict d;
    d["process"] = to_string(b.process);
    d["t"] = b.t;
    d["seed"] = b.seed;
    d["proposals"] = b.proposals;
    d["samples"] = to_array(b.samples);
    return d;
}

template <typename Sampler>
py::dict sample(Sampler&& s, std::size_t n, std::uint64_t seed, unsigned threads) {
    SampleBatch b = [&] {
        py::gil_scoped_release release;
        return s(BatchOptions{n, seed, threads});
    }();
    return batch_dict(std::move(b));
}

}  // namespace

PYBIND11_MODULE(tfd, m) {
    m.doc() = "Tempered fractional derivatives, densities of drifted Brownian motion and samplers";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<TemperParams>(m, "TemperParams")
        .def(py::init<double, double>(), py::arg("alpha"), py::arg("eta"))
        .def_property_readonly("alpha", &TemperParams::alpha)
        .def_property_readonly("eta", &TemperParams::eta)
        .def("__repr__", [](const TemperParams& p) {
            return "TemperParams(alpha=" + std::to_string(p.alpha()) + ", eta=" + std::to_string(p.eta()) + ")";
        });

    py::class_<DriftSpec>(m, "DriftSpec")
        .def(py::init<double, double>(), py::arg("mu"), py::arg("x0") = 0.0)
        .def_property_readonly("mu", &DriftSpec::mu)
        .def_property_readonly("x0", &DriftSpec::x0)
        .def_property_readonly("eta", &DriftSpec::eta);

    py::class_<Grid1D>(m, "Grid1D")
        .def(py::init<double, double, std::size_t>(), py::arg("lo"), py::arg("hi"), py::arg("n"))
        .def_property_readonly("lo", &Grid1D::lo)
        .def_property_readonly("hi", &Grid1D::hi)
        .def_property_readonly("n", &Grid1D::size)
        .def_property_readonly("spacing", &Grid1D::spacing)
        .def("points", [](const Grid1D& g) { return to_array(g.points()); });

    py::class_<QuadConfig>(m, "QuadConfig")
        .def(py::init([](double eps, double wmax, double abs_tol, std::size_t max_subdiv) {
                 QuadConfig q{eps, wmax, abs_tol, max_subdiv};
                 q.validate();
                 return q;
             }),
             py::arg("eps") = 1e-6, py::arg("wmax") = std::numeric_limits<double>::infinity(),
             py::arg("abs_tol") = 1e-8, py::arg("max_subdiv") = 2000)
        .def_readonly("eps", &QuadConfig::eps)
        .def_readonly("wmax", &QuadConfig::wmax)
        .def_readonly("abs_tol", &QuadConfig::abs_tol)
        .def_readonly("max_subdiv", &QuadConfig::max_subdiv);

    // pointwise operators take any Python callable f(x) -> float
    m.def("marchaud_tempered", &marchaud_tempered, py::arg("f"), py::arg("x"), py::arg("p"),
          py::arg("q") = QuadConfig{});
    m.def("weyl_plus_tempered", &weyl_plus_tempered, py::arg("f"), py::arg("x"), py::arg("p"),
          py::arg("q") = QuadConfig{});
    m.def("weyl_minus_tempered", &weyl_minus_tempered, py::arg("f"), py::arg("x"), py::arg("p"),
          py::arg("q") = QuadConfig{});
    m.def("riesz_tempered_pointwise", &riesz_tempered_pointwise, py::arg("f"), py::arg("x"), py::arg("p"),
          py::arg("q") = QuadConfig{});

    m.def(
        "caputo_half", [](double t_max, const std::vector<double>& v) { return field_tuple(caputo_half(series(t_max, v))); },
        py::arg("t_max"), py::arg("values"),
        "Samples on an equispaced grid [0, t_max]; returns (t[1:], derivative).");
    m.def(
        "rl_half", [](double t_max, const std::vector<double>& v) { return field_tuple(rl_half(series(t_max, v))); },
        py::arg("t_max"), py::arg("values"));
    m.def(
        "tempered_rl_half",
        [](double t_max, const std::vector<double>& v, double eta) {
            return field_tuple(tempered_rl_half(series(t_max, v), eta));
        },
        py::arg("t_max"), py::arg("values"), py::arg("eta"));

    m.def("laplace_symbol", &laplace_symbol, py::arg("lam"), py::arg("p"));
    m.def("riesz_constant", &riesz_constant, py::arg("p"));
    m.def("riesz_multiplier", &riesz_multiplier, py::arg("gamma"), py::arg("p"));
    m.def(
        "riesz_multiplier",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& g, const TemperParams& p) {
            return map_array(g, [&](double x) { return riesz_multiplier(x, p); });
        },
        py::arg("gamma"), py::arg("p"));
    m.def("riesz_multiplier_expanded", &riesz_multiplier_expanded, py::arg("gamma"), py::arg("p"));
    m.def(
        "riesz_multiplier_expanded",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& g, const TemperParams& p) {
            return map_array(g, [&](double x) { return riesz_multiplier_expanded(x, p); });
        },
        py::arg("gamma"), py::arg("p"));
    m.def("diffusion_grid", &diffusion_grid, py::arg("t"), py::arg("p"));
    m.def(
        "solve_riesz_diffusion",
        [](double t, const TemperParams& p, std::optional<Grid1D> grid) {
            const Grid1D g = grid ? *grid : diffusion_grid(t, p);
            return field_tuple(solve_riesz_diffusion(t, g, p));
        },
        py::arg("t"), py::arg("p"), py::arg("grid") = py::none(), "Returns (x, density).");
    m.def(
        "riesz_apply",
        [](double lo, double hi, const std::vector<double>& v, const TemperParams& p) {
            const SpectralField out = riesz_apply(SpectralField(SampledField(Grid1D(lo, hi, v.size()), v)), p);
            return to_array(out.values());
        },
        py::arg("lo"), py::arg("hi"), py::arg("values"), py::arg("p"));

    m.def(
        "heat_kernel", [](double x, double y, double t) { return heat_kernel({x, y, t}); }, py::arg("x"),
        py::arg("y"), py::arg("t"));
    m.def(
        "drifted_density", [](double x, double y, double t, const DriftSpec& d) { return drifted_density({x, y, t}, d); },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("d"));
    m.def(
        "folded_drifted_density",
        [](double x, double y, double t, const DriftSpec& d) { return folded_drifted_density({x, y, t}, d); },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("d"));
    m.def(
        "folded_drifted_cdf",
        [](double x, double y, double t, const DriftSpec& d) { return folded_drifted_cdf({x, y, t}, d); },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("d"));
    m.def("mittag_leffler_half", &mittag_leffler_half, py::arg("z"));
    m.def(
        "mittag_leffler_half",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& z) {
            return map_array(z, mittag_leffler_half);
        },
        py::arg("z"));

    m.def(
        "sample_tempered",
        [](const TemperParams& p, double t, std::size_t n, std::uint64_t seed, unsigned threads) {
            return sample([&](const BatchOptions& o) { return sample_tempered_batch(p, t, o); }, n, seed, threads);
        },
        py::arg("p"), py::arg("t"), py::arg("n") = 100000, py::arg("seed") = 42, py::arg("threads") = 0);
    m.def(
        "sample_drifted",
        [](const DriftSpec& d, double t, std::size_t n, std::uint64_t seed, unsigned threads) {
            return sample([&](const BatchOptions& o) { return sample_drifted_batch(d, t, o); }, n, seed, threads);
        },
        py::arg("d"), py::arg("t"), py::arg("n") = 100000, py::arg("seed") = 42, py::arg("threads") = 0);
    m.def(
        "sample_reflected",
        [](const DriftSpec& d, double t, std::size_t n, std::uint64_t seed, unsigned threads) {
            return sample([&](const BatchOptions& o) { return sample_reflected_batch(d, t, o); }, n, seed, threads);
        },
        py::arg("d"), py::arg("t"), py::arg("n") = 100000, py::arg("seed") = 42, py::arg("threads") = 0);
    m.def(
        "sample_inverse_stable_half",
        [](double t, std::size_t n, std::uint64_t seed, unsigned threads) {
            return sample([&](const BatchOptions& o) { return sample_inverse_stable_half_batch(t, o); }, n, seed,
                          threads);
        },
        py::arg("t"), py::arg("n") = 100000, py::arg("seed") = 42, py::arg("threads") = 0);
    m.def(
        "empirical_laplace",
        [](const std::vector<double>& samples, double lam) {
            const SampleBatch b{Process::drifted, DriftSpec(0.0), 1.0, 0, samples, samples.size()};
            const EstimateWithError e = empirical_laplace(b, lam);
            return py::make_tuple(e.value, e.std_error);
        },
        py::arg("samples"), py::arg("lam"), "Returns (mean of exp(-lam X), standard error).");

    m.def(
        "check_g_half_derivative",
        [](double x, const Grid1D& y, const Grid1D& t, unsigned threads) {
            ResidualReport r;
            {
                py::gil_scoped_release release;
                r = check_g_half_derivative(x, y, t, {threads});
            }
            return report_dict(r);
        },
        py::arg("x"), py::arg("ygrid"), py::arg("tgrid"), py::arg("threads") = 0);
    m.def(
        "residual_theorem1",
        [](const DriftSpec& d, const Grid1D& x, const Grid1D& y, const Grid1D& t, double band, unsigned threads) {
            Theorem1Report r;
            {
                py::gil_scoped_release release;
                r = residual_theorem1(d, x, y, t, {threads, band});
            }
            py::dict out = report_dict(r.combined);
            out["x_form"] = report_dict(r.x_form);
            out["y_form"] = report_dict(r.y_form);
            out["form_ratio_max"] = r.form_ratio_max;
            return out;
        },
        py::arg("d"), py::arg("xgrid"), py::arg("ygrid"), py::arg("tgrid"), py::arg("band") = 0.1,
        py::arg("threads") = 0);
    m.def(
        "residual_theorem2",
        [](const DriftSpec& d, double x, const Grid1D& y, const Grid1D& t, const std::string& tanh_sign,
           unsigned threads) {
            TanhTerm term = TanhTerm::plus;
            if (tanh_sign == "minus") {
                term = TanhTerm::minus;
            } else if (tanh_sign == "one") {
                term = TanhTerm::constant_one;
            } else if (tanh_sign != "plus") {
                throw ValidationError("tanh_sign must be plus, minus or one");
            }
            ResidualReport r;
            {
                py::gil_scoped_release release;
                r = residual_theorem2(d, x, y, t, term, {threads});
            }
            return report_dict(r);
        },
        py::arg("d"), py::arg("x"), py::arg("ygrid"), py::arg("tgrid"), py::arg("tanh_sign") = "plus",
        py::arg("threads") = 0);
    m.def("refine", &refine, py::arg("grid"));
}
