#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "riemfpp/experiments.hpp"
#include "riemfpp/geodesics.hpp"
#include "riemfpp/starlattice.hpp"

namespace py = pybind11;
using namespace riemfpp;

namespace {

Point as_point(const std::vector<double>& v) {
    Point p{};
    for (size_t i = 0; i < v.size() && i < 3; ++i) p[i] = v[i];
    return p;
}

LatticePoint as_site(const std::vector<int64_t>& v) {
    LatticePoint z{};
    for (size_t i = 0; i < v.size() && i < 3; ++i) z[i] = v[i];
    return z;
}

std::vector<LatticePoint> as_sites(const std::vector<std::vector<int64_t>>& v) {
    std::vector<LatticePoint> out;
    for (auto& z : v) out.push_back(as_site(z));
    return out;
}

py::array_t<double> field_values_array(const ScalarField& f) {
    const int d = f.grid.dimension;
    std::vector<py::ssize_t> shape;
    for (int i = d - 1; i >= 0; --i) shape.push_back(py::ssize_t(f.grid.nodes_along(i)));
    py::array_t<double> arr(shape);
    std::memcpy(arr.mutable_data(), f.values.data(), f.values.size() * sizeof(double));
    return arr;
}

py::array_t<double> metric_matrix(const MetricField& m, const std::vector<double>& x) {
    MetricValue g = m.value_at(as_point(x));
    const int d = m.dimension();
    py::array_t<double> arr({py::ssize_t(d), py::ssize_t(d)});
    auto buf = arr.mutable_unchecked<2>();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) buf(i, j) = g.entry(i, j);
    return arr;
}

Polyline as_polyline(const std::vector<std::vector<double>>& pts) {
    Polyline poly;
    for (auto& p : pts) poly.push_back(as_point(p));
    return poly;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Riemannian first-passage percolation laboratory (core bindings)";

    py::register_exception<OutOfWindowError>(m, "OutOfWindowError");
    py::register_exception<WindowTooSmallError>(m, "WindowTooSmallError");
    py::register_exception<ResourceLimitError>(m, "ResourceLimitError");

    py::class_<CovarianceModel>(m, "CovarianceModel")
        .def_static("spherical", &CovarianceModel::spherical, py::arg("variance"),
                    py::arg("range"))
        .def_static("wendland", &CovarianceModel::wendland, py::arg("variance"), py::arg("range"))
        .def_static("tabulated", &CovarianceModel::tabulated, py::arg("r"), py::arg("c"))
        .def("__call__", &CovarianceModel::operator(), py::arg("r"))
        .def_readonly("variance", &CovarianceModel::variance)
        .def_readonly("range", &CovarianceModel::range)
        .def_property_readonly("kind", &CovarianceModel::kind_name);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](int d, std::vector<double> origin, std::vector<double> extent,
                         double spacing) {
                 return GridSpec(d, as_point(origin), as_point(extent), spacing);
             }),
             py::arg("dimension"), py::arg("origin"), py::arg("extent"), py::arg("spacing"))
        .def_readonly("dimension", &GridSpec::dimension)
        .def_readonly("spacing", &GridSpec::spacing)
        .def("node_count", &GridSpec::node_count);

    py::class_<ScalarField, std::shared_ptr<ScalarField>>(m, "ScalarField")
        .def_property_readonly("grid", [](const ScalarField& f) { return f.grid; })
        .def_readonly("seed", &ScalarField::seed)
        .def("values", &field_values_array)
        .def("value", [](const ScalarField& f, std::vector<double> x,
                         bool cubic) { return f.value(as_point(x),
                                                      cubic ? InterpOrder::Cubic
                                                            : InterpOrder::Linear); },
             py::arg("x"), py::arg("cubic") = false)
        .def("prepare_cubic", &ScalarField::prepare_cubic);

    m.def("sample_field", &sample_field, py::arg("grid"), py::arg("model"), py::arg("seed"),
          "Sample a stationary Gaussian field by circulant embedding.");

    py::class_<MetricField>(m, "MetricField")
        .def_static("constant",
                    [](int d, double value, const GridSpec& w) {
                        return MetricField::constant(d, value, w);
                    },
                    py::arg("dimension"), py::arg("diag_value"), py::arg("window"))
        .def_static("hyperbolic_halfplane", &MetricField::hyperbolic_halfplane, py::arg("window"))
        .def_static("paper_diagonal",
                    [](std::shared_ptr<ScalarField> f, bool cubic) {
                        return MetricField::paper_diagonal(
                            std::move(f), cubic ? InterpOrder::Cubic : InterpOrder::Linear);
                    },
                    py::arg("field"), py::arg("cubic") = false)
        .def_static("conformal",
                    [](std::shared_ptr<ScalarField> f, bool cubic) {
                        return MetricField::conformal(
                            std::move(f), cubic ? InterpOrder::Cubic : InterpOrder::Linear);
                    },
                    py::arg("field"), py::arg("cubic") = false)
        .def_property_readonly("dimension", &MetricField::dimension)
        .def("metric_at", &metric_matrix, py::arg("x"))
        .def("speed",
             [](const MetricField& m, std::vector<double> x, std::vector<double> v) {
                 return m.speed(as_point(x), as_point(v));
             },
             py::arg("x"), py::arg("v"))
        .def("curve_length",
             [](const MetricField& m, std::vector<std::vector<double>> pts, int min_intervals,
                double max_len) {
                 CurveLength c = m.curve_length(as_polyline(pts), min_intervals, max_len);
                 return py::make_tuple(c.riemannian, c.euclidean);
             },
             py::arg("polyline"), py::arg("min_intervals") = 8,
             py::arg("max_interval_length") = 0.05)
        .def("cube_extremes",
             [](const MetricField& m, std::vector<int64_t> z, int samples) {
                 CubeExtremes e = m.cube_extremes(as_site(z), samples);
                 return py::make_tuple(e.lambda, e.Lambda);
             },
             py::arg("site"), py::arg("samples_per_axis") = 16)
        .def("lambda_min_window", &MetricField::lambda_min_window)
        .def("lambda_max_window", &MetricField::lambda_max_window);

    m.def("stencil_factor", &stencil_factor, py::arg("radius"), py::arg("dimension"));

    py::class_<DistanceResult>(m, "DistanceResult")
        .def_readonly("value", &DistanceResult::value)
        .def_readonly("graph_value", &DistanceResult::graph_value)
        .def_readonly("chord_value", &DistanceResult::chord_value)
        .def_readonly("lower", &DistanceResult::lower)
        .def_readonly("upper", &DistanceResult::upper)
        .def_readonly("eta", &DistanceResult::eta)
        .def_readonly("lambda_window", &DistanceResult::lambda_window)
        .def_readonly("exit_certified", &DistanceResult::exit_certified);

    py::class_<SolverOptions>(m, "SolverOptions")
        .def(py::init<>())
        .def_readwrite("h", &SolverOptions::h)
        .def_readwrite("stencil_k", &SolverOptions::stencil_k)
        .def_readwrite("quad_intervals", &SolverOptions::quad_intervals)
        .def_readwrite("padding_fraction", &SolverOptions::padding_fraction)
        .def_readwrite("chord_edges", &SolverOptions::chord_edges);

    m.def("distance",
          [](const MetricField& metric, std::vector<double> x, std::vector<double> y,
             const SolverOptions& opts) { return distance(metric, as_point(x), as_point(y), opts); },
          py::arg("metric"), py::arg("x"), py::arg("y"), py::arg("options") = SolverOptions{});

    py::class_<DistanceField>(m, "DistanceField")
        .def("at", [](const DistanceField& f, std::vector<double> p) {
            return f.at_point(as_point(p));
        })
        .def_property_readonly("eta", [](const DistanceField& f) { return f.eta; });

    m.def("distance_field",
          [](const MetricField& metric, std::vector<double> source, double t_max,
             const SolverOptions& opts) {
              return distance_field(metric, as_point(source), t_max, opts);
          },
          py::arg("metric"), py::arg("source"), py::arg("t_max"),
          py::arg("options") = SolverOptions{});

    m.def("ball",
          [](const MetricField& metric, double t, const SolverOptions& opts) {
              BallBoundary b = ball(metric, t, opts);
              py::list loops;
              for (auto& loop : b.loops) {
                  py::array_t<double> arr({py::ssize_t(loop.size()), py::ssize_t(2)});
                  auto buf = arr.mutable_unchecked<2>();
                  for (size_t i = 0; i < loop.size(); ++i) {
                      buf(py::ssize_t(i), 0) = loop[i][0];
                      buf(py::ssize_t(i), 1) = loop[i][1];
                  }
                  loops.append(arr);
              }
              return loops;
          },
          py::arg("metric"), py::arg("t"), py::arg("options") = SolverOptions{});

    m.def("richardson_refine",
          [](double v1, double v2, double order) {
              RichardsonResult r = richardson_refine(v1, v2, order);
              return py::make_tuple(r.value, r.observed_order);
          },
          py::arg("value_h"), py::arg("value_h2"), py::arg("order") = 1.0);

    // star lattice
    m.def("star_adjacent",
          [](std::vector<int64_t> a, std::vector<int64_t> b, int d) {
              return star_adjacent(as_site(a), as_site(b), d);
          },
          py::arg("a"), py::arg("b"), py::arg("dimension") = 2);
    m.def("is_star_connected",
          [](std::vector<std::vector<int64_t>> sites, int d) {
              return is_star_connected(as_sites(sites), d);
          },
          py::arg("sites"), py::arg("dimension") = 2);
    m.def("enumerate_connected_sets",
          [](int n, int d) {
              EnumerationReport r = enumerate_connected_sets(n, d);
              return py::make_tuple(r.counts, r.sigma_hat);
          },
          py::arg("n"), py::arg("dimension") = 2);
    m.def("curve_to_sites",
          [](std::vector<std::vector<double>> pts, int d, double threshold) {
              StarSet s = curve_to_sites(as_polyline(pts), d, threshold);
              std::vector<std::vector<int64_t>> out;
              for (auto& z : s.sites) out.push_back({z.begin(), z.begin() + d});
              return out;
          },
          py::arg("polyline"), py::arg("dimension") = 2, py::arg("threshold") = 0.25);

    // geodesics
    py::class_<GeodesicCurve>(m, "GeodesicCurve")
        .def_property_readonly("length", &GeodesicCurve::length)
        .def_readonly("truncated", &GeodesicCurve::truncated)
        .def_readonly("max_speed_drift", &GeodesicCurve::max_speed_drift)
        .def("points", [](const GeodesicCurve& c) {
            py::array_t<double> arr({py::ssize_t(c.samples.size()), py::ssize_t(4)});
            auto buf = arr.mutable_unchecked<2>();
            for (size_t i = 0; i < c.samples.size(); ++i) {
                buf(py::ssize_t(i), 0) = c.samples[i].t;
                buf(py::ssize_t(i), 1) = c.samples[i].x[0];
                buf(py::ssize_t(i), 2) = c.samples[i].x[1];
                buf(py::ssize_t(i), 3) = c.samples[i].speed;
            }
            return arr;
        });

    m.def("integrate_geodesic",
          [](const MetricField& metric, std::vector<double> x0, std::vector<double> v0,
             double length, double step, double fd_step) {
              return integrate_geodesic(metric, as_point(x0), as_point(v0), length, step, fd_step);
          },
          py::arg("metric"), py::arg("x0"), py::arg("v0"), py::arg("length"),
          py::arg("step") = 1e-3, py::arg("fd_step") = 1e-2);

    m.def("shoot",
          [](const MetricField& metric, std::vector<double> x, std::vector<double> y,
             double tolerance, double step, double fd_step) {
              ShootResult r = shoot(metric, as_point(x), as_point(y), tolerance, step, fd_step);
              return py::make_tuple(r.converged, r.riemannian_length, r.miss);
          },
          py::arg("metric"), py::arg("x"), py::arg("y"), py::arg("tolerance") = 1e-3,
          py::arg("step") = 1e-3, py::arg("fd_step") = 1e-2);

    m.def("christoffel",
          [](const MetricField& metric, std::vector<double> x, double fd_step) {
              ChristoffelArray G = christoffel(metric, as_point(x), fd_step);
              const int d = metric.dimension();
              py::array_t<double> arr({py::ssize_t(d), py::ssize_t(d), py::ssize_t(d)});
              auto buf = arr.mutable_unchecked<3>();
              for (int i = 0; i < d; ++i)
                  for (int j = 0; j < d; ++j)
                      for (int k = 0; k < d; ++k)
                          buf(i, j, k) = G[size_t(i)][size_t(j)][size_t(k)];
              return arr;
          },
          py::arg("metric"), py::arg("x"), py::arg("fd_step") = 1e-2);

    // experiments
    m.def("run_experiment_file",
          [](const std::string& config_path, py::object seed, py::object out_dir) {
              ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
              if (!seed.is_none()) cfg.base_seed = seed.cast<uint64_t>();
              if (!out_dir.is_none()) cfg.out_dir = out_dir.cast<std::string>();
              RunResult r = run_experiment(cfg);
              py::dict out;
              out["all_pass"] = r.all_pass;
              out["out_dir"] = r.out_dir;
              py::list checks;
              for (auto& c : r.checks) {
                  py::dict cd;
                  cd["name"] = c.name;
                  cd["pass"] = c.pass;
                  cd["value"] = c.value;
                  cd["bound"] = c.bound;
                  checks.append(cd);
              }
              out["checks"] = checks;
              return out;
          },
          py::arg("config_path"), py::arg("seed") = py::none(), py::arg("out_dir") = py::none());

    m.attr("__version__") = kToolVersion;
}
