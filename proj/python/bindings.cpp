#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xorcop/copula.hpp"
#include "xorcop/datasets.hpp"
#include "xorcop/error.hpp"
#include "xorcop/linalg.hpp"
#include "xorcop/network.hpp"
#include "xorcop/problogic.hpp"
#include "xorcop/surface.hpp"
#include "xorcop/trainer.hpp"

namespace py = pybind11;
using namespace xorcop;

namespace {

using ParamArg = std::variant<double, std::string>;

CopulaParam to_param(const ParamArg& s) {
  if (const auto* text = std::get_if<std::string>(&s)) return CopulaParam::parse(*text);
  return CopulaParam::from_value(std::get<double>(s));
}

double param_value(const CopulaParam& s) {
  return s.kind() == CopulaParam::Kind::Infinity ? std::numeric_limits<double>::infinity() : s.value();
}

using Rows = std::vector<std::vector<double>>;

Rows to_rows(const Matrix& m) {
  Rows rows(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  }
  return rows;
}

Matrix matrix_from_rows(const Rows& rows) {
  if (rows.empty()) throw ShapeError("matrix needs at least one row");
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw ShapeError("ragged matrix rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Matrix(rows.size(), rows.front().size(), std::move(flat));
}

Network make_network(const std::string& spec, const std::vector<Rows>& weights) {
  std::vector<Matrix> mats;
  for (const Rows& w : weights) mats.push_back(matrix_from_rows(w));
  return Network(parse_spec(spec), std::move(mats));
}

std::vector<Rows> network_weights(const Network& net) {
  std::vector<Rows> out;
  for (const Matrix& w : net.weights()) out.push_back(to_rows(w));
  return out;
}

py::dict dataset_dict(const Dataset& d) {
  py::dict out;
  out["name"] = d.name();
  out["inputs"] = d.input_names();
  out["targets"] = d.target_names();
  py::list rows;
  for (const auto& s : d.samples()) rows.append(py::make_tuple(s.inputs, s.targets));
  out["rows"] = rows;
  return out;
}

py::dict label_dict(const FunctionLabel& l) {
  py::dict out;
  out["label"] = l.to_string();
  out["kind"] = l.kind_name();
  out["max_deviation"] = l.max_deviation;
  out["s"] = l.s ? py::cast(*l.s) : py::none();
  return out;
}

std::size_t target_index(const Dataset& d, const std::string& target) {
  return target.empty() ? 0 : d.target_column(target);
}

}  // namespace

PYBIND11_MODULE(_xorcop, m) {
  m.doc() = "Frank-copula xor, probabilistic logic and small feedforward networks";

  // Registered base first: translators run most recent first.
  auto& base = py::register_exception<Error>(m, "XorcopError", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  auto& domain = py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", domain.ptr());
  py::register_exception<LookupError>(m, "LookupError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<NotLinearError>(m, "NotLinearError", base.ptr());
  py::register_exception<UnboundVariableError>(m, "UnboundVariableError", base.ptr());

  // copula
  m.def(
      "frank_and", [](const ParamArg& s, double x, double y) { return frank_and(to_param(s), UnitValue(x), UnitValue(y)).value(); },
      py::arg("s"), py::arg("x"), py::arg("y"), "Frank copula A_s(x, y).");
  m.def(
      "frank_or", [](const ParamArg& s, double x, double y) { return frank_or(to_param(s), UnitValue(x), UnitValue(y)).value(); },
      py::arg("s"), py::arg("x"), py::arg("y"));
  m.def(
      "xor_f", [](const ParamArg& s, double x, double y) { return xor_f(to_param(s), UnitValue(x), UnitValue(y)).value(); },
      py::arg("s"), py::arg("x"), py::arg("y"), "x + y - 2 A_s(x, y).");
  m.def(
      "frechet_bounds",
      [](double x, double y) {
        const auto b = frechet_bounds(UnitValue(x), UnitValue(y));
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "solve_s", [](double x, double y, double p) { return param_value(solve_s(UnitValue(x), UnitValue(y), UnitValue(p))); },
      py::arg("x"), py::arg("y"), py::arg("p"), "Parameter s with A_s(x, y) = p; inf for the lower bound.");

  // logic
  m.def(
      "parse_expr", [](const std::string& text) { return parse_expr(text).to_string(); }, py::arg("text"),
      "Canonical rendering of a parsed expression.");
  m.def(
      "copula_prob",
      [](const std::string& expr, const std::map<std::string, double>& probs, const ParamArg& s) {
        std::map<std::string, UnitValue> assign;
        for (const auto& [k, v] : probs) assign.emplace(k, UnitValue(v));
        return copula_prob(parse_expr(expr), assign, to_param(s)).value.value();
      },
      py::arg("expr"), py::arg("probs"), py::arg("s") = 1.0);
  m.def(
      "truth_table_prob",
      [](const std::string& expr, const std::string& data) {
        const BoolExpr e = parse_expr(expr);
        if (data.empty()) {
          const auto vars = e.variables();
          return truth_table_prob(e, SampleSpace::uniform({vars.begin(), vars.end()})).value();
        }
        return truth_table_prob(e, SampleSpace::from_dataset(resolve_dataset(data))).value();
      },
      py::arg("expr"), py::arg("data") = "", "Probability over a Boolean dataset, or the uniform space.");
  m.def(
      "empirical_frequencies",
      [](const std::string& data) {
        std::map<std::string, double> out;
        for (const auto& [k, v] : empirical_frequencies(resolve_dataset(data))) out[k] = v.value();
        return out;
      },
      py::arg("data"));
  m.def(
      "check_consistency",
      [](double px, double py_, double pand, double por) {
        return check_consistency(UnitValue(px), UnitValue(py_), UnitValue(pand), UnitValue(por)).consistent();
      },
      py::arg("px"), py::arg("py"), py::arg("pand"), py::arg("por"));

  // datasets
  m.def("builtin_names", &builtin_names);
  m.def(
      "dataset", [](const std::string& name) { return dataset_dict(resolve_dataset(name)); }, py::arg("name"),
      "Built-in name or CSV path as {name, inputs, targets, rows}.");
  m.def(
      "synth_copula", [](const ParamArg& s, std::size_t steps) { return dataset_dict(synth_copula(to_param(s), steps)); },
      py::arg("s"), py::arg("steps"));
  m.def("baseline_names", &baseline_names);
  m.def("baseline", &baseline, py::arg("name"), py::arg("x1"), py::arg("x2"));

  // linear algebra
  m.def(
      "least_squares",
      [](const Rows& inputs, const Rows& targets) {
        return to_rows(least_squares(matrix_from_rows(inputs), matrix_from_rows(targets)));
      },
      py::arg("inputs"), py::arg("targets"), "Inputs (k+1) x n with a trailing bias row; targets 1 x n.");
  m.def(
      "regress",
      [](const std::string& data, bool product_feature, const std::string& target) {
        const Dataset d = resolve_dataset(data);
        const auto [x, t] = regression_arrays(d, target_index(d, target), product_feature);
        const Matrix w = least_squares(x, t);
        return py::make_tuple(to_rows(w)[0], least_squares_sse(w, x, t));
      },
      py::arg("data"), py::arg("product_feature") = false, py::arg("target") = "",
      "Returns (weights, sse); the bias is the last weight.");

  // networks
  m.def(
      "count_weights",
      [](const std::string& spec) {
        const auto slash = spec.find('/');
        return count_weights(parse_sizes(spec.substr(0, slash)));
      },
      py::arg("spec"));

  py::class_<Network>(m, "Network")
      .def(py::init(&make_network), py::arg("spec"), py::arg("weights"))
      .def_static(
          "random",
          [](const std::string& spec, std::uint64_t seed, double range) {
            std::mt19937_64 rng(seed);
            return Network::random(parse_spec(spec), rng, range);
          },
          py::arg("spec"), py::arg("seed") = 0, py::arg("range") = 1.0)
      .def_static(
          "from_json", [](const std::string& text) { return model_from_json(text).network; }, py::arg("text"))
      .def_static(
          "load", [](const std::string& path) { return load_model(path).network; }, py::arg("path"))
      .def_property_readonly("spec", [](const Network& n) { return n.topology().to_string(); })
      .def_property_readonly("weights", &network_weights)
      .def("weight_count", &Network::weight_count)
      .def(
          "predict", [](const Network& n, double x1, double x2) { return predict(n, x1, x2); }, py::arg("x1"),
          py::arg("x2"))
      .def(
          "forward", [](const Network& n, const std::vector<double>& x) { return forward(n, x).outputs(); },
          py::arg("inputs"))
      .def(
          "gradient",
          [](const Network& n, const std::vector<double>& x, double t) {
            std::vector<Rows> out;
            for (const Matrix& g : gradient(n, x, t)) out.push_back(to_rows(g));
            return out;
          },
          py::arg("inputs"), py::arg("target"))
      .def("collapse", &collapse_linear)
      .def(
          "with_weight", [](const Network& n, const std::string& coord, double v) {
            const WeightCoord c = WeightCoord::parse(coord);
            check_coord(n.topology(), c);
            return n.with_weight(c.layer, c.row, c.col, v);
          },
          py::arg("coord"), py::arg("value"))
      .def(
          "to_json", [](const Network& n) { return model_to_json(n); })
      .def(
          "save", [](const Network& n, const std::string& path) { save_model(path, n); }, py::arg("path"))
      .def("__eq__", [](const Network& a, const Network& b) { return a == b; })
      .def("__repr__", [](const Network& n) { return "<Network " + n.topology().to_string() + ">"; });

  m.def(
      "anchor_network",
      [](const std::string& hidden, const std::string& output) {
        return anchor_network(parse_activation(hidden), parse_activation(output));
      },
      py::arg("hidden") = "id", py::arg("output") = "id");

  // training
  auto config = [](double lr, std::size_t max_iters, double tol, const std::string& mode, std::uint64_t seed,
                   double init_range) {
    TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.max_iters = max_iters;
    cfg.tol = tol;
    cfg.mode = parse_train_mode(mode);
    cfg.seed = seed;
    cfg.init_range = init_range;
    return cfg;
  };

  m.def(
      "sse",
      [](const Network& n, const std::string& data, const std::string& target) {
        const Dataset d = resolve_dataset(data);
        return sse(n, d, target_index(d, target));
      },
      py::arg("network"), py::arg("data"), py::arg("target") = "");
  m.def(
      "train",
      [config](const std::string& spec, const std::string& data, double lr, std::size_t max_iters, double tol,
               const std::string& mode, std::uint64_t seed, double init_range, const std::string& target) {
        TrainConfig cfg = config(lr, max_iters, tol, mode, seed, init_range);
        cfg.record_trajectory = true;
        const Dataset d = resolve_dataset(data);
        const TrainResult r = [&] {
          py::gil_scoped_release release;
          return train(parse_spec(spec), d.select_target(target_index(d, target)), cfg);
        }();
        py::dict out;
        out["network"] = r.final_net;
        out["iterations"] = r.iterations;
        out["final_sse"] = r.final_sse;
        out["converged"] = r.converged;
        out["trajectory"] = *r.trajectory;
        return out;
      },
      py::arg("spec"), py::arg("data"), py::arg("lr") = 0.1, py::arg("max_iters") = 10000, py::arg("tol") = 0.001,
      py::arg("mode") = "per-sample", py::arg("seed") = 0, py::arg("init_range") = 1.0, py::arg("target") = "");
  m.def(
      "classify", [](const Network& n, double tol, std::size_t grid) { return label_dict(classify(n, tol, grid)); },
      py::arg("network"), py::arg("tol") = kClassifyTolerance, py::arg("grid") = kClassifyGrid);
  m.def(
      "sweep",
      [config](const std::string& spec, const std::string& data, std::size_t restarts, double lr,
               std::size_t max_iters, double tol, std::uint64_t seed, double classify_tol, std::size_t threads) {
        const TrainConfig cfg = config(lr, max_iters, tol, "per-sample", seed, 1.0);
        SweepOptions opts;
        opts.classify_tol = classify_tol;
        opts.threads = threads;
        const Dataset d = resolve_dataset(data);
        const SweepReport rep = [&] {
          py::gil_scoped_release release;
          return sweep(parse_spec(spec), d, cfg, restarts, opts);
        }();
        py::list runs;
        for (const auto& r : rep.runs) {
          py::dict run = label_dict(r.label);
          run["seed"] = r.seed;
          run["diverged"] = r.diverged;
          run["converged"] = r.result && r.result->converged;
          run["iterations"] = r.result ? py::cast(r.result->iterations) : py::none();
          run["final_sse"] = r.result ? py::cast(r.result->final_sse) : py::none();
          runs.append(run);
        }
        py::dict out;
        out["runs"] = runs;
        out["histogram"] = rep.histogram;
        out["converged"] = rep.converged;
        out["diverged"] = rep.diverged;
        return out;
      },
      py::arg("spec"), py::arg("data"), py::arg("restarts"), py::arg("lr") = 0.1, py::arg("max_iters") = 10000,
      py::arg("tol") = 0.001, py::arg("seed") = 0, py::arg("classify_tol") = kClassifyTolerance,
      py::arg("threads") = 0);

  // surfaces
  m.def(
      "enumerate_pairs",
      [](const std::string& spec) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [a, b] : enumerate_pairs(parse_spec(spec))) out.emplace_back(a.to_string(), b.to_string());
        return out;
      },
      py::arg("spec"));
  m.def(
      "surface",
      [](const Network& n, const std::string& data, const std::string& wa, const std::string& wb, double lo,
         double hi, std::size_t steps) {
        const Dataset d = resolve_dataset(data);
        const SurfaceGrid g = [&] {
          py::gil_scoped_release release;
          return project(n, d, WeightCoord::parse(wa), WeightCoord::parse(wb), {lo, hi}, {lo, hi}, steps, 0);
        }();
        py::dict out;
        out["values"] = to_rows(g.values);
        if (steps >= 3) {
          const LandscapeStats st = landscape_stats(g);
          out["min"] = st.min_value;
          out["max"] = st.max_value;
          out["min_at"] = py::make_tuple(st.min_a, st.min_b);
          out["local_minima"] = st.local_minima;
          out["plateau_fraction"] = st.plateau_fraction;
        }
        return out;
      },
      py::arg("network"), py::arg("data"), py::arg("wa"), py::arg("wb"), py::arg("lo") = -5.0, py::arg("hi") = 5.0,
      py::arg("steps") = kDefaultSurfaceSteps);
}
