#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "monolasso/data.hpp"
#include "monolasso/errors.hpp"
#include "monolasso/experiments.hpp"
#include "monolasso/io.hpp"
#include "monolasso/lars.hpp"
#include "monolasso/loss.hpp"
#include "monolasso/monotonicity.hpp"
#include "monolasso/stagewise.hpp"

namespace py = pybind11;
using namespace monolasso;

namespace {

ExpandedDesign design_of(const Matrix& x, const Vector& y) {
    return ExpandedDesign(standardize(Dataset{x, y, {}}));
}

IndexBy parse_index(const std::string& name) {
    if (name == "norm") return IndexBy::norm;
    if (name == "arclength" || name == "arc-length") return IndexBy::arc_length;
    if (name == "native") return IndexBy::native;
    throw ConfigError("unknown index '" + name + "' (norm, arclength, native)");
}

LossModel parse_loss(const std::string& name) {
    if (name == "squared") return squared_error_loss();
    if (name == "logistic") return logistic_loss();
    throw ConfigError("unknown loss '" + name + "' (squared, logistic)");
}

Matrix stack(const std::vector<Vector>& rows, bool collapsed) {
    if (rows.empty()) return Matrix(0, 0);
    const Index width = collapsed ? rows.front().size() / 2 : rows.front().size();
    Matrix out(static_cast<Index>(rows.size()), width);
    for (std::size_t k = 0; k < rows.size(); ++k)
        out.row(static_cast<Index>(k)) = collapsed ? collapse(rows[k]) : rows[k];
    return out;
}

py::dict stagewise_dict(const StagewiseResult& r) {
    py::dict d;
    d["path"] = r.path;
    d["iterations"] = r.iterations;
    d["selections"] = r.selections;
    return d;
}

StagewiseConfig stagewise_config(double epsilon, long max_iterations, int record_stride) {
    StagewiseConfig cfg;
    cfg.epsilon = epsilon;
    cfg.max_iterations = max_iterations;
    cfg.record_stride = record_stride;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Least angle, lasso and monotone (forward stagewise) coefficient paths";

    auto base = py::register_exception<Error>(m, "MonolassoError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<DataError>(m, "DataError", base);
    py::register_exception<SolverError>(m, "SolverError", base);
    py::register_exception<ConsistencyError>(m, "ConsistencyError", base);

    py::class_<PiecewiseLinearPath>(m, "Path")
        .def_property_readonly("dimension", &PiecewiseLinearPath::dimension)
        .def_property_readonly("p", &PiecewiseLinearPath::p)
        .def_property_readonly("length", &PiecewiseLinearPath::length)
        .def_property_readonly("segments", &PiecewiseLinearPath::segments)
        .def_property_readonly("breakpoints", &PiecewiseLinearPath::breakpoints)
        .def_property_readonly("lambdas", &PiecewiseLinearPath::lambdas)
        .def_property_readonly("active_sets", &PiecewiseLinearPath::segment_active_sets)
        .def_property_readonly("vertices",
                               [](const PiecewiseLinearPath& p) { return stack(p.vertices(), false); })
        .def_property_readonly("coefficients",
                               [](const PiecewiseLinearPath& p) { return stack(p.vertices(), true); })
        .def_property_readonly("events",
                               [](const PiecewiseLinearPath& p) {
                                   py::list out;
                                   for (const PathEvent& e : p.events())
                                       out.append(py::make_tuple(to_string(e.kind), e.index, e.gamma));
                                   return out;
                               })
        .def_property_readonly("parametrization",
                               [](const PiecewiseLinearPath& p) { return std::string(to_string(p.parametrization())); })
        .def_property_readonly("termination",
                               [](const PiecewiseLinearPath& p) { return std::string(to_string(p.termination)); })
        .def_readonly("truncated", &PiecewiseLinearPath::truncated)
        .def("evaluate", &PiecewiseLinearPath::evaluate, py::arg("ell"))
        .def("coefficients_at", [](const PiecewiseLinearPath& p, double ell) { return collapse(p.evaluate(ell)); },
             py::arg("ell"))
        .def("to_json", [](const PiecewiseLinearPath& p) { return path_to_json(p).dump(); })
        .def_static("from_json",
                    [](const std::string& text) { return path_from_json(nlohmann::json::parse(text)); })
        .def("__repr__", [](const PiecewiseLinearPath& p) {
            return "<Path p=" + std::to_string(p.p()) + " segments=" + std::to_string(p.segments()) +
                   " termination=" + to_string(p.termination) + ">";
        });

    m.def(
        "solve_path",
        [](const Matrix& x, const Vector& y, const std::string& method, std::optional<double> stop_l1_norm,
           std::optional<double> stop_lambda, int max_steps) {
            SolverConfig cfg;
            cfg.mode = parse_path_mode(method);
            cfg.stop_l1_norm = stop_l1_norm;
            cfg.stop_lambda = stop_lambda;
            cfg.max_steps = max_steps;
            return solve_path(design_of(x, y), cfg);
        },
        py::arg("x"), py::arg("y"), py::arg("method") = "lasso", py::arg("stop_l1_norm") = py::none(),
        py::arg("stop_lambda") = py::none(), py::arg("max_steps") = 0,
        "Exact piecewise-linear path (method: lar, lasso, fs0) on standardized predictors.");

    m.def(
        "fs_epsilon",
        [](const Matrix& x, const Vector& y, double epsilon, long max_iterations, int record_stride) {
            return stagewise_dict(fs_epsilon(standardize(Dataset{x, y, {}}),
                                             stagewise_config(epsilon, max_iterations, record_stride)));
        },
        py::arg("x"), py::arg("y"), py::arg("epsilon") = 0.01, py::arg("max_iterations") = 1'000'000,
        py::arg("record_stride") = 1);

    m.def(
        "monotone_incremental",
        [](const Matrix& x, const Vector& y, double epsilon, long max_iterations, int record_stride) {
            return stagewise_dict(
                monotone_incremental(design_of(x, y), stagewise_config(epsilon, max_iterations, record_stride)));
        },
        py::arg("x"), py::arg("y"), py::arg("epsilon") = 0.01, py::arg("max_iterations") = 1'000'000,
        py::arg("record_stride") = 1);

    m.def(
        "stagewise",
        [](const Matrix& x, const Vector& y, const std::string& loss, double epsilon, long max_iterations,
           int record_stride) {
            const LossModel model = parse_loss(loss);
            const ExpandedDesign e = design_of(x, y);
            return stagewise_dict(generalized_monotone_incremental(
                e, default_response(e, model), model, stagewise_config(epsilon, max_iterations, record_stride)));
        },
        py::arg("x"), py::arg("y"), py::arg("loss") = "squared", py::arg("epsilon") = 0.01,
        py::arg("max_iterations") = 1'000'000, py::arg("record_stride") = 1,
        "Epsilon steps on the largest negative loss gradient in the expanded design.");

    m.def(
        "integrate_monotone_path",
        [](const Matrix& x, const Vector& y, const std::string& loss, double step, double arc_budget,
           long max_steps, int record_stride) {
            const LossModel model = parse_loss(loss);
            const ExpandedDesign e = design_of(x, y);
            StepControl ctl;
            ctl.step = step;
            ctl.arc_budget = arc_budget;
            ctl.max_steps = max_steps;
            ctl.record_stride = record_stride;
            const IntegrationResult r = integrate_monotone_path(e, default_response(e, model), model, ctl);
            py::dict d;
            d["path"] = r.path;
            d["steps"] = r.steps;
            d["halvings"] = r.halvings;
            d["losses"] = r.losses;
            return d;
        },
        py::arg("x"), py::arg("y"), py::arg("loss") = "logistic", py::arg("step") = 0.01,
        py::arg("arc_budget") = std::numeric_limits<double>::infinity(), py::arg("max_steps") = 1'000'000,
        py::arg("record_stride") = 1);

    m.def(
        "kkt_certify",
        [](const Matrix& x, const Vector& y, const Vector& beta_expanded, double lam, double tolerance) {
            const KktReport r = kkt_certify(design_of(x, y), beta_expanded, lam, tolerance);
            py::dict d;
            d["pass"] = r.pass;
            d["worst_violation"] = r.worst_violation;
            d["correlations"] = r.correlations;
            d["pair_conflicts"] = r.pair_conflicts;
            return d;
        },
        py::arg("x"), py::arg("y"), py::arg("beta_expanded"), py::arg("lam"), py::arg("tolerance") = 1e-8);

    m.def(
        "check_condition",
        [](const Matrix& x, const std::vector<Index>& indices, const std::vector<int>& signs) {
            const ConditionResult r = check_condition(standardize(Dataset{x, Vector::Zero(x.rows()), {}}),
                                                      SignedSubset{indices, signs});
            return py::make_tuple(r.pass, r.v);
        },
        py::arg("x"), py::arg("indices"), py::arg("signs"));

    m.def(
        "exhaustive_check",
        [](const Matrix& x, int max_subset_size, unsigned threads, bool allow_large) {
            ExhaustiveOptions opt;
            opt.max_subset_size = max_subset_size;
            opt.threads = threads;
            opt.allow_large = allow_large;
            const ExhaustiveReport r =
                exhaustive_check(standardize(Dataset{x, Vector::Zero(x.rows()), {}}), opt);
            py::dict d;
            d["pass"] = r.pass;
            d["checks"] = r.checks;
            if (r.violation) {
                d["indices"] = r.violation->indices;
                d["signs"] = r.violation->signs;
                d["v"] = r.v;
            }
            return d;
        },
        py::arg("x"), py::arg("max_subset_size") = 0, py::arg("threads") = 1, py::arg("allow_large") = false);

    m.def("pc_gram", &pc_gram, py::arg("knot_counts"), py::arg("n"));
    m.def("pc_inverse_gram", &pc_inverse_gram, py::arg("knot_counts"), py::arg("n"));

    m.def(
        "gen_sine",
        [](long n, const std::string& basis, std::optional<std::vector<double>> knots, double noise_scale,
           std::uint64_t seed) {
            SineSpec spec;
            spec.n = n;
            spec.basis = parse_sine_basis(basis);
            if (knots) spec.knots = *knots;
            spec.noise_scale = noise_scale;
            spec.seed = seed;
            const SineData s = gen_sine(spec);
            py::dict d;
            d["x"] = s.data.x;
            d["y"] = s.data.y;
            d["grid"] = s.x;
            d["knots"] = s.knots;
            d["warnings"] = s.warnings;
            return d;
        },
        py::arg("n") = 300, py::arg("basis") = "piecewise-linear", py::arg("knots") = py::none(),
        py::arg("noise_scale") = 0.25, py::arg("seed") = 0);

    m.def(
        "gen_block",
        [](long n, long p, long block, double rho, double sigma2, std::uint64_t seed) {
            BlockSpec spec;
            spec.n = n;
            spec.p = p;
            spec.block = block;
            spec.rho = rho;
            spec.sigma2 = sigma2;
            spec.seed = seed;
            const BlockData b = gen_block(spec);
            py::dict d;
            d["x"] = b.data.x;
            d["y"] = b.data.y;
            d["beta"] = b.beta;
            d["noise_to_signal"] = block_noise_to_signal(spec);
            return d;
        },
        py::arg("n") = 60, py::arg("p") = 1000, py::arg("block") = 20, py::arg("rho") = 0.95,
        py::arg("sigma2") = 36.0, py::arg("seed") = 0);

    m.def(
        "compare_paths",
        [](const PiecewiseLinearPath& a, const PiecewiseLinearPath& b, const std::string& index, double threshold) {
            const PathComparison c = compare_paths(a, b, parse_index(index), threshold);
            py::dict d;
            d["sup_difference"] = c.sup_difference;
            d["divergence"] = c.divergence ? py::cast(*c.divergence) : py::none();
            d["common_extent"] = c.common_extent;
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("index") = "norm", py::arg("threshold") = 1e-8);

    m.def(
        "rss_profile",
        [](const Matrix& x, const Vector& y, const PiecewiseLinearPath& path, const std::string& index, int grid) {
            const Curve c = rss_profile(design_of(x, y), path, parse_index(index), grid);
            return py::make_tuple(c.index, c.value);
        },
        py::arg("x"), py::arg("y"), py::arg("path"), py::arg("index") = "norm", py::arg("grid") = 100);

    m.def("total_variation_at_norm", &total_variation_at_norm, py::arg("path"), py::arg("s"));

    m.def("load_path", &load_path, py::arg("file"));
    m.def(
        "save_path", [](const std::string& file, const PiecewiseLinearPath& path) { save_path(file, path); },
        py::arg("file"), py::arg("path"));
}
