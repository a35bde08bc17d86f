#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xorcop/copula.hpp"
#include "xorcop/datasets.hpp"
#include "xorcop/error.hpp"
#include "xorcop/linalg.hpp"
#include "xorcop/network.hpp"
#include "xorcop/problogic.hpp"
#include "xorcop/surface.hpp"
#include "xorcop/trainer.hpp"

namespace xorcop::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

/// Raised for argument combinations CLI11 cannot express; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Json jnum(double v) { return std::isfinite(v) ? Json(v) : Json(num(v)); }

/// Tabular result plus its JSON form. A 1x1 table prints as a bare value.
struct Result {
  Result() = default;
  Result(std::vector<std::string> cols, std::vector<std::vector<std::string>> body)
      : columns(std::move(cols)), rows(std::move(body)) {}

  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  Json json = Json::object();
  std::vector<std::string> notes;  // human lines printed after the table
};

void render(const Result& r, const std::string& format, std::ostream& out) {
  if (format == "json") {
    Json doc;
    doc["schema_version"] = "1";
    for (auto it = r.json.begin(); it != r.json.end(); ++it) doc[it.key()] = it.value();
    out << doc.dump(2) << "\n";
    return;
  }
  const bool scalar = r.rows.size() == 1 && r.columns.size() == 1;
  if (format == "csv") {
    if (scalar) {
      out << r.rows[0][0] << "\n";
    } else {
      for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
      out << "\n";
      for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
      }
    }
    for (const auto& n : r.notes) out << "# " << n << "\n";
    return;
  }
  if (scalar) {
    out << r.rows[0][0] << "\n";
  } else {
    std::vector<std::size_t> width(r.columns.size());
    for (std::size_t i = 0; i < r.columns.size(); ++i) width[i] = r.columns[i].size();
    for (const auto& row : r.rows) {
      for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
        width[i] = std::max(width[i], row[i].size());
      }
    }
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i])) << cells[i];
      }
      out << "\n";
    };
    line(r.columns);
    std::vector<std::string> rule;
    for (std::size_t w : width) rule.emplace_back(w, '-');
    line(rule);
    for (const auto& row : r.rows) line(row);
  }
  for (const auto& n : r.notes) out << n << "\n";
}

/// Writes via a sibling temporary and renames, so readers never see a
/// partial file.
void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path() && !fs::exists(path.parent_path())) {
    throw Error("directory '" + path.parent_path().string() + "' does not exist");
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + tmp.string() + "' for writing");
    body(f);
    f.flush();
    if (!f) throw Error("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
    values.push_back(v);
  }
  return values;
}

Dataset single_target(const Dataset& data, const std::string& target) {
  if (!target.empty()) return data.select_target(data.target_column(target));
  if (data.target_count() != 1) {
    std::string names;
    for (const auto& t : data.target_names()) names += (names.empty() ? "" : ", ") + t;
    throw UsageError("dataset '" + data.name() + "' has several targets (" + names +
                     "); pick one with --target");
  }
  return data;
}

Json label_json(const FunctionLabel& label) {
  Json j;
  j["label"] = label.to_string();
  j["kind"] = label.kind_name();
  j["max_deviation"] = jnum(label.max_deviation);
  j["s"] = label.s ? jnum(*label.s) : Json(nullptr);
  return j;
}

Json weights_json(const Network& net) {
  Json layers = Json::array();
  for (const Matrix& m : net.weights()) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      Json row = Json::array();
      for (double v : m.row_span(r)) row.push_back(v);
      rows.push_back(row);
    }
    layers.push_back(rows);
  }
  return layers;
}

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError(flag + " is required");
}

// -- copula -----------------------------------------------------------------

struct CopulaArgs {
  std::string s;
  double x = 0, y = 0, p = 0;
  std::string fn = "xor";
  std::size_t steps = 21;
  std::string out;
};

UnitValue eval_fn(const std::string& fn, CopulaParam s, UnitValue x, UnitValue y) {
  if (fn == "and") return frank_and(s, x, y);
  if (fn == "or") return frank_or(s, x, y);
  return xor_f(s, x, y);
}

Result copula_eval(const CopulaArgs& a) {
  const CopulaParam s = CopulaParam::parse(a.s);
  const double v = eval_fn(a.fn, s, UnitValue(a.x), UnitValue(a.y));
  Result r{{"value"}, {{num(v)}}};
  r.json = {{"command", "copula eval"}, {"s", s.to_string()}, {"x", a.x}, {"y", a.y}, {"fn", a.fn},
            {"value", v}};
  return r;
}

Result copula_solve(const CopulaArgs& a) {
  const UnitValue x(a.x), y(a.y), p(a.p);
  const CopulaParam s = solve_s(x, y, p);
  const double attained = frank_and(s, x, y);
  const double f = xor_f(s, x, y);
  Result r{{"s"}, {{s.to_string()}}};
  r.json = {{"command", "copula solve-s"}, {"x", a.x}, {"y", a.y}, {"p", a.p},
            {"s", s.to_string()}, {"and", attained}, {"xor", f}};
  if (std::abs(attained - a.p) > 1e-6) {
    r.notes.push_back("note: nearest representable s reaches A_s = " + num(attained));
  }
  return r;
}

Result copula_grid(const CopulaArgs& a) {
  if (a.steps < 2) throw UsageError("--steps must be at least 2");
  const CopulaParam s = CopulaParam::parse(a.s);
  Result r{{"x", "y", "value"}, {}};
  for (std::size_t i = 0; i < a.steps; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(a.steps - 1);
    for (std::size_t j = 0; j < a.steps; ++j) {
      const double y = static_cast<double>(j) / static_cast<double>(a.steps - 1);
      r.rows.push_back({num(x), num(y), num(eval_fn(a.fn, s, UnitValue(x), UnitValue(y)))});
    }
  }
  if (!a.out.empty()) {
    write_file(a.out, [&](std::ostream& f) {
      f << "x,y,value\n";
      for (const auto& row : r.rows) f << row[0] << ',' << row[1] << ',' << row[2] << '\n';
    });
    Result w{{"rows", "out"}, {{std::to_string(r.rows.size()), a.out}}};
    w.json = {{"command", "copula grid"}, {"s", s.to_string()}, {"fn", a.fn},
              {"steps", a.steps}, {"rows", r.rows.size()}, {"out", a.out}};
    return w;
  }
  Json cells = Json::array();
  for (const auto& row : r.rows) cells.push_back({std::stod(row[0]), std::stod(row[1]), std::stod(row[2])});
  r.json = {{"command", "copula grid"}, {"s", s.to_string()}, {"fn", a.fn}, {"steps", a.steps},
            {"columns", {"x", "y", "value"}}, {"cells", cells}};
  return r;
}

// -- logic ------------------------------------------------------------------

struct LogicArgs {
  std::string expr;
  std::string assign;
  std::string s = "1";
  std::string data;
  bool check = false;
};

Result logic_prob(const LogicArgs& a) {
  const BoolExpr e = parse_expr(a.expr);
  std::map<std::string, UnitValue> env;
  std::stringstream ss(a.assign);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--assign expects name=value pairs");
    const auto v = parse_list(item.substr(eq + 1), "--assign");
    env[item.substr(0, eq)] = UnitValue(v.at(0));
  }
  const CopulaParam s = CopulaParam::parse(a.s);
  const CopulaProbResult res = copula_prob(e, env, s);
  Result r{{"value"}, {{num(res.value)}}};
  r.json = {{"command", "logic prob"}, {"expr", e.to_string()}, {"s", s.to_string()},
            {"value", res.value.value()}, {"repeated_variables", res.repeated_variables}};
  if (res.repeated_variables) {
    r.notes.push_back(
        "warning: a variable occurs more than once; compositional evaluation may differ from "
        "the truth-table probability");
  }
  return r;
}

Result logic_table(const LogicArgs& a) {
  const BoolExpr e = parse_expr(a.expr);
  const auto vars = e.variables();
  std::vector<std::string> names(vars.begin(), vars.end());
  const SampleSpace space = SampleSpace::uniform(names);
  Result r;
  r.columns = names;
  r.columns.push_back("value");
  Json rows = Json::array();
  for (const auto& row : space.rows()) {
    std::map<std::string, bool> env;
    std::vector<std::string> cells;
    Json jrow = Json::object();
    for (std::size_t i = 0; i < names.size(); ++i) {
      env[names[i]] = row.bits[i];
      cells.push_back(row.bits[i] ? "1" : "0");
      jrow[names[i]] = row.bits[i] ? 1 : 0;
    }
    const bool v = e.evaluate(env);
    cells.push_back(v ? "1" : "0");
    jrow["value"] = v ? 1 : 0;
    r.rows.push_back(std::move(cells));
    rows.push_back(jrow);
  }
  const double p = truth_table_prob(e, space);
  r.json = {{"command", "logic table"}, {"expr", e.to_string()}, {"rows", rows},
            {"probability", p}};
  r.notes.push_back("probability under uniform assignments: " + num(p));
  return r;
}

Result logic_freq(const LogicArgs& a) {
  const Dataset data = resolve_dataset(a.data);
  const auto freq = empirical_frequencies(data);
  Result r{{"statement", "probability"}, {}};
  Json jf = Json::object();
  std::vector<std::string> order = data.input_names();
  order.insert(order.end(), data.target_names().begin(), data.target_names().end());
  for (const auto& name : order) {
    const double p = freq.at(name);
    r.rows.push_back({name, num(p)});
    jf[name] = p;
  }
  r.json = {{"command", "logic freq"}, {"data", data.name()}, {"frequencies", jf}};
  if (a.check) {
    if (data.input_arity() < 2) throw UsageError("--check needs at least two input columns");
    const std::string& x = data.input_names()[0];
    const std::string& y = data.input_names()[1];
    const SampleSpace space = SampleSpace::from_dataset(data);
    const UnitValue pand = truth_table_prob(BoolExpr::conj(BoolExpr::var(x), BoolExpr::var(y)), space);
    const UnitValue por = truth_table_prob(BoolExpr::disj(BoolExpr::var(x), BoolExpr::var(y)), space);
    const ConsistencyVerdict verdict = check_consistency(freq.at(x), freq.at(y), pand, por);
    Json checks = Json::array();
    for (const auto& c : verdict.checks) {
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      r.notes.push_back(std::string(c.passed ? "ok   " : "FAIL ") + c.name + ": " + c.detail);
    }
    r.notes.push_back(verdict.consistent() ? "consistent" : "inconsistent");
    r.json["checks"] = checks;
    r.json["consistent"] = verdict.consistent();
  }
  return r;
}

// -- regress ----------------------------------------------------------------

struct RegressArgs {
  std::string data;
  std::string target;
  bool product = false;
};

Result regress(const RegressArgs& a) {
  const Dataset data = single_target(resolve_dataset(a.data), a.target);
  const auto [x, t] = regression_arrays(data, 0, a.product);
  const Matrix w = least_squares(x, t);
  const double err = least_squares_sse(w, x, t);
  Result r;
  Json jw = Json::array();
  std::vector<std::string> row;
  for (std::size_t i = 0; i < w.cols(); ++i) {
    r.columns.push_back("w" + std::to_string(i + 1));
    row.push_back(num(w(0, i)));
    jw.push_back(w(0, i));
  }
  r.columns.push_back("sse");
  row.push_back(num(err));
  r.rows.push_back(row);
  r.json = {{"command", "regress"}, {"data", data.name()}, {"product_feature", a.product},
            {"weights", jw}, {"sse", err}};
  return r;
}

// -- net --------------------------------------------------------------------

struct NetArgs {
  std::string model;
  std::string input;
  std::string out;
  std::string spec;
};

Result net_forward(const NetArgs& a) {
  const ModelFile m = load_model(a.model);
  const auto in = parse_list(a.input, "--input");
  const ForwardTrace trace = forward(m.network, in);
  Result r{{"out"}, {{num(trace.output())}}};
  Json layers = Json::array();
  for (std::size_t l = 0; l < trace.post.size(); ++l) {
    layers.push_back({{"pre", trace.pre[l]}, {"post", trace.post[l]}});
  }
  if (trace.outputs().size() > 1) {
    r.columns.clear();
    r.rows = {{}};
    for (std::size_t i = 0; i < trace.outputs().size(); ++i) {
      r.columns.push_back("out" + std::to_string(i + 1));
      r.rows[0].push_back(num(trace.outputs()[i]));
    }
  }
  r.json = {{"command", "net forward"}, {"spec", m.network.topology().to_string()},
            {"input", in}, {"out", trace.outputs()}, {"layers", layers}};
  return r;
}

Result net_collapse(const NetArgs& a) {
  const ModelFile m = load_model(a.model);
  const Network c = collapse_linear(m.network);
  write_file(a.out, [&](std::ostream& f) { f << model_to_json(c, m.seed); });
  Result r;
  const Matrix& w = c.weights()[0];
  r.columns = {"row"};
  for (std::size_t j = 0; j + 1 < w.cols(); ++j) r.columns.push_back("a" + std::to_string(j + 1));
  r.columns.push_back("b");
  for (std::size_t i = 0; i < w.rows(); ++i) {
    std::vector<std::string> row{std::to_string(i + 1)};
    for (double v : w.row_span(i)) row.push_back(num(v));
    r.rows.push_back(row);
  }
  r.json = {{"command", "net collapse"}, {"spec", c.topology().to_string()},
            {"weights", weights_json(c)}, {"out", a.out}};
  return r;
}

Result net_count(const NetArgs& a) {
  const std::size_t slash = a.spec.find('/');
  const std::size_t n = slash == std::string::npos ? count_weights(parse_sizes(a.spec))
                                                   : count_weights(parse_spec(a.spec));
  Result r{{"weights"}, {{std::to_string(n)}}};
  r.json = {{"command", "net count"}, {"spec", a.spec}, {"weights", n}};
  return r;
}

// -- train / classify / sweep ------------------------------------------------

struct TrainArgs {
  std::string spec;
  std::string data;
  std::string target;
  double lr = TrainConfig{}.learning_rate;
  std::size_t max_iters = TrainConfig{}.max_iters;
  double tol = TrainConfig{}.tol;
  std::string mode = "per-sample";
  std::uint64_t seed = 0;
  double init_range = TrainConfig{}.init_range;
  std::string out;
  std::string log;
  std::size_t restarts = 1;
  std::size_t threads = 0;
  double classify_tol = kClassifyTolerance;
  std::size_t grid = kClassifyGrid;
};

TrainConfig make_config(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.max_iters = a.max_iters;
  cfg.tol = a.tol;
  cfg.mode = parse_train_mode(a.mode);
  cfg.seed = a.seed;
  cfg.init_range = a.init_range;
  cfg.validate();
  return cfg;
}

Json config_json(const TrainConfig& cfg) {
  return {{"learning_rate", cfg.learning_rate}, {"max_iters", cfg.max_iters}, {"tol", cfg.tol},
          {"mode", to_string(cfg.mode)}, {"seed", cfg.seed}, {"init_range", cfg.init_range}};
}

Result train_cmd(const TrainArgs& a) {
  const Topology topo = parse_spec(a.spec);
  const Dataset data = single_target(resolve_dataset(a.data), a.target);
  TrainConfig cfg = make_config(a);
  cfg.record_trajectory = !a.log.empty();
  const TrainResult res = train(topo, data, cfg);
  std::optional<FunctionLabel> label;
  if (topo.input_size() == 2 && topo.output_size() == 1) label = classify(res.final_net);

  if (!a.out.empty()) {
    write_file(a.out, [&](std::ostream& f) { f << model_to_json(res.final_net, cfg.seed); });
  }
  if (!a.log.empty()) {
    write_file(a.log, [&](std::ostream& f) {
      f << "iteration,sse\n";
      for (std::size_t i = 0; i < res.trajectory->size(); ++i) {
        f << (i + 1) << ',' << num((*res.trajectory)[i]) << '\n';
      }
    });
  }

  Result r{{"spec", "iterations", "final_sse", "converged", "label"},
           {{topo.to_string(), std::to_string(res.iterations), num(res.final_sse),
             res.converged ? "true" : "false", label ? label->to_string() : "-"}}};
  r.json = {{"command", "train"},
            {"spec", topo.to_string()},
            {"data", data.name()},
            {"config", config_json(cfg)},
            {"iterations", res.iterations},
            {"final_sse", res.final_sse},
            {"converged", res.converged},
            {"label", label ? label_json(*label) : Json(nullptr)},
            {"weights", weights_json(res.final_net)},
            {"model", a.out.empty() ? Json(nullptr) : Json(a.out)}};
  return r;
}

Result classify_cmd(const TrainArgs& a, const std::string& model) {
  const ModelFile m = load_model(model);
  const FunctionLabel label = classify(m.network, a.classify_tol, a.grid);
  Result r{{"label", "max_deviation"}, {{label.to_string(), num(label.max_deviation)}}};
  r.json = {{"command", "classify"}, {"tol", a.classify_tol}, {"grid", a.grid}};
  r.json.update(label_json(label));
  return r;
}

Result sweep_cmd(const TrainArgs& a) {
  const Topology topo = parse_spec(a.spec);
  const Dataset data = single_target(resolve_dataset(a.data), a.target);
  const TrainConfig cfg = make_config(a);
  if (a.restarts < 1) throw UsageError("--restarts must be at least 1");
  SweepOptions opts;
  opts.threads = a.threads;
  opts.classify_tol = a.classify_tol;
  opts.classify_grid = a.grid;
  const SweepReport rep = sweep(topo, data, cfg, a.restarts, opts);

  Json runs = Json::array();
  for (const auto& run : rep.runs) {
    Json j{{"seed", run.seed}, {"diverged", run.diverged}};
    if (run.result) {
      j["converged"] = run.result->converged;
      j["iterations"] = run.result->iterations;
      j["final_sse"] = jnum(run.result->final_sse);
      j["label"] = label_json(run.label);
      j["envelope_flag"] = run.envelope_flag;
    } else {
      j["error"] = run.error;
    }
    runs.push_back(j);
  }
  if (!a.out.empty()) {
    write_file(a.out, [&](std::ostream& f) {
      f << "seed,converged,diverged,iterations,final_sse,label,max_deviation,envelope_flag\n";
      for (const auto& run : rep.runs) {
        f << run.seed << ',';
        if (run.result) {
          f << (run.result->converged ? 1 : 0) << ",0," << run.result->iterations << ','
            << num(run.result->final_sse) << ',' << run.label.to_string() << ','
            << num(run.label.max_deviation) << ',' << (run.envelope_flag ? 1 : 0) << '\n';
        } else {
          f << "0,1,,,,,\n";
        }
      }
    });
  }

  Result r{{"label", "count"}, {}};
  Json hist = Json::object();
  for (const auto& [label, count] : rep.histogram) {
    r.rows.push_back({label, std::to_string(count)});
    hist[label] = count;
  }
  r.notes.push_back("restarts " + std::to_string(a.restarts) + ", converged " +
                    std::to_string(rep.converged) + ", diverged " + std::to_string(rep.diverged));
  r.json = {{"command", "sweep"},   {"spec", topo.to_string()},   {"data", data.name()},
            {"config", config_json(cfg)}, {"restarts", a.restarts}, {"converged", rep.converged},
            {"diverged", rep.diverged}, {"histogram", hist},         {"runs", runs}};
  return r;
}

// -- surface ----------------------------------------------------------------

struct SurfaceArgs {
  std::string model;
  std::string data;
  std::string target;
  std::string pair;
  std::string range = "-5,5";
  std::size_t steps = kDefaultSurfaceSteps;
  std::string out;
  std::string out_dir;
  std::size_t threads = 0;
};

AxisRange parse_range(const std::string& text) {
  const auto v = parse_list(text, "--range");
  if (v.size() != 2) throw UsageError("--range expects LO,HI");
  return {v[0], v[1]};
}

fs::path meta_path(const fs::path& csv) {
  fs::path p = csv;
  p += ".meta.json";
  return p;
}

Json stats_json(const LandscapeStats& st) {
  return {{"min", st.min_value},         {"min_wa", st.min_a},
          {"min_wb", st.min_b},          {"max", st.max_value},
          {"local_minima", st.local_minima}, {"plateau_fraction", st.plateau_fraction}};
}

Result surface_cmd(const SurfaceArgs& a) {
  const ModelFile m = load_model(a.model);
  const Dataset data = single_target(resolve_dataset(a.data), a.target);
  const auto comma = a.pair.find(',');
  if (comma == std::string::npos) throw UsageError("--pair expects two weight names, e.g. w1_11,w1_12");
  const WeightCoord wa = WeightCoord::parse(a.pair.substr(0, comma));
  const WeightCoord wb = WeightCoord::parse(a.pair.substr(comma + 1));
  const AxisRange range = parse_range(a.range);
  const SurfaceGrid grid = project(m.network, data, wa, wb, range, range, a.steps, a.threads);
  write_file(a.out, [&](std::ostream& f) { write_grid_csv(grid, f); });
  write_file(meta_path(a.out),
             [&](std::ostream& f) { f << grid_metadata_json(grid, data.name(), a.model); });

  Result r{{"wa", "wb", "cells", "min", "local_minima", "plateau_fraction"}, {}};
  Json j{{"command", "surface"}, {"wa", wa.to_string()}, {"wb", wb.to_string()},
         {"steps", a.steps}, {"out", a.out}, {"meta", meta_path(a.out).string()}};
  std::vector<std::string> row{wa.to_string(), wb.to_string(), std::to_string(a.steps * a.steps)};
  if (a.steps >= 3) {
    const LandscapeStats st = landscape_stats(grid);
    row.insert(row.end(), {num(st.min_value), std::to_string(st.local_minima), num(st.plateau_fraction)});
    j["stats"] = stats_json(st);
  } else {
    row.insert(row.end(), {"-", "-", "-"});
  }
  r.rows.push_back(row);
  r.json = j;
  return r;
}

Result surface_all(const SurfaceArgs& a) {
  const ModelFile m = load_model(a.model);
  const Dataset data = single_target(resolve_dataset(a.data), a.target);
  const AxisRange range = parse_range(a.range);
  const fs::path dir(a.out_dir);
  if (!fs::is_directory(dir)) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create directory '" + a.out_dir + "': " + ec.message());
  }
  const auto pairs = enumerate_pairs(m.network.topology());
  Result r{{"wa", "wb", "file", "min", "local_minima", "plateau_fraction"}, {}};
  Json list = Json::array();
  std::ostringstream index;
  index << "wa,wb,file,min,local_minima,plateau_fraction\n";
  for (const auto& [wa, wb] : pairs) {
    const SurfaceGrid grid = project(m.network, data, wa, wb, range, range, a.steps, a.threads);
    const std::string file = wa.to_string() + "__" + wb.to_string() + ".csv";
    write_file(dir / file, [&](std::ostream& f) { write_grid_csv(grid, f); });
    write_file(meta_path(dir / file),
               [&](std::ostream& f) { f << grid_metadata_json(grid, data.name(), a.model); });
    std::vector<std::string> row{wa.to_string(), wb.to_string(), file};
    Json j{{"wa", wa.to_string()}, {"wb", wb.to_string()}, {"file", file}};
    if (a.steps >= 3) {
      const LandscapeStats st = landscape_stats(grid);
      row.insert(row.end(), {num(st.min_value), std::to_string(st.local_minima), num(st.plateau_fraction)});
      j["stats"] = stats_json(st);
    } else {
      row.insert(row.end(), {"", "", ""});
    }
    index << row[0] << ',' << row[1] << ',' << row[2] << ',' << row[3] << ',' << row[4] << ','
          << row[5] << '\n';
    r.rows.push_back(row);
    list.push_back(j);
  }
  write_file(dir / "index.csv", [&](std::ostream& f) { f << index.str(); });
  r.json = {{"command", "surface all-pairs"}, {"pairs", pairs.size()}, {"out_dir", a.out_dir},
            {"grids", list}};
  return r;
}

// -- dataset ----------------------------------------------------------------

Result dataset_emit(const std::string& name, const std::string& out) {
  const Dataset data = builtin(name);
  write_file(out, [&](std::ostream& f) { emit_csv(data, f); });
  Result r{{"name", "rows", "out"}, {{data.name(), std::to_string(data.size()), out}}};
  r.json = {{"command", "dataset emit"}, {"name", data.name()}, {"rows", data.size()}, {"out", out}};
  if (!data.note().empty()) {
    r.notes.push_back("note: " + data.note());
    r.json["note"] = data.note();
  }
  return r;
}

Result dataset_list() {
  Result r{{"name", "rows", "inputs", "targets"}, {}};
  Json list = Json::array();
  for (const auto& name : builtin_names()) {
    const Dataset d = builtin(name);
    std::string targets;
    for (const auto& t : d.target_names()) targets += (targets.empty() ? "" : " ") + t;
    r.rows.push_back({name, std::to_string(d.size()), std::to_string(d.input_arity()), targets});
    list.push_back({{"name", name}, {"rows", d.size()}, {"inputs", d.input_names()},
                    {"targets", d.target_names()}, {"note", d.note()}});
  }
  r.json = {{"command", "dataset list"}, {"datasets", list}};
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"xor approximation, copula and error-surface experiments", "xorcop"};
  app.fallthrough();
  app.require_subcommand(1);
  std::string format = "csv";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "table"}))
      ->capture_default_str();

  std::function<Result()> action;

  // copula
  CopulaArgs ca;
  auto* copula = app.add_subcommand("copula", "Frank copula evaluation");
  copula->require_subcommand(1);
  auto* c_eval = copula->add_subcommand("eval", "Evaluate A_s, R_s or F_s at one point");
  c_eval->add_option("--s", ca.s, "0, 1, inf or a positive number")->required();
  c_eval->add_option("--x", ca.x)->required();
  c_eval->add_option("--y", ca.y)->required();
  c_eval->add_option("--fn", ca.fn)->check(CLI::IsMember({"and", "or", "xor"}))->capture_default_str();
  c_eval->callback([&] { action = [&] { return copula_eval(ca); }; });
  auto* c_solve = copula->add_subcommand("solve-s", "Find s with A_s(x, y) = p");
  c_solve->add_option("--x", ca.x)->required();
  c_solve->add_option("--y", ca.y)->required();
  c_solve->add_option("--p", ca.p)->required();
  c_solve->callback([&] { action = [&] { return copula_solve(ca); }; });
  auto* c_grid = copula->add_subcommand("grid", "Tabulate a copula function on a lattice");
  c_grid->add_option("--s", ca.s)->required();
  c_grid->add_option("--fn", ca.fn)->check(CLI::IsMember({"and", "or", "xor"}))->capture_default_str();
  c_grid->add_option("--steps", ca.steps)->capture_default_str();
  c_grid->add_option("--out", ca.out);
  c_grid->callback([&] { action = [&] { return copula_grid(ca); }; });

  // logic
  LogicArgs la;
  auto* logic = app.add_subcommand("logic", "Probabilistic logic");
  logic->require_subcommand(1);
  auto* l_prob = logic->add_subcommand("prob", "Compositional copula probability of an expression");
  l_prob->add_option("--expr", la.expr)->required();
  l_prob->add_option("--assign", la.assign, "name=value,...")->required();
  l_prob->add_option("--s", la.s)->capture_default_str();
  l_prob->callback([&] { action = [&] { return logic_prob(la); }; });
  auto* l_table = logic->add_subcommand("table", "Truth table of an expression");
  l_table->add_option("--expr", la.expr)->required();
  l_table->callback([&] { action = [&] { return logic_table(la); }; });
  auto* l_freq = logic->add_subcommand("freq", "Empirical frequencies of a Boolean dataset");
  l_freq->add_option("--data", la.data, "Built-in name or CSV path")->required();
  l_freq->add_flag("--check", la.check, "Also run the and/or consistency checks");
  l_freq->callback([&] { action = [&] { return logic_freq(la); }; });

  // regress
  RegressArgs ra;
  auto* reg = app.add_subcommand("regress", "Least-squares linear fit");
  reg->add_option("--data", ra.data)->required();
  reg->add_option("--target", ra.target, "Target column for multi-target datasets");
  reg->add_flag("--product-feature", ra.product, "Add x1*x2 as a third input");
  reg->callback([&] { action = [&] { return regress(ra); }; });

  // net
  NetArgs na;
  auto* net = app.add_subcommand("net", "Network utilities");
  net->require_subcommand(1);
  auto* n_fwd = net->add_subcommand("forward", "Evaluate a saved model");
  n_fwd->add_option("--model", na.model)->required();
  n_fwd->add_option("--input", na.input, "x1,x2")->required();
  n_fwd->callback([&] { action = [&] { return net_forward(na); }; });
  auto* n_col = net->add_subcommand("collapse", "Fold an all-linear model into one layer");
  n_col->add_option("--model", na.model)->required();
  n_col->add_option("--out", na.out)->required();
  n_col->callback([&] { action = [&] { return net_collapse(na); }; });
  auto* n_cnt = net->add_subcommand("count", "Number of weights including biases");
  n_cnt->add_option("--spec", na.spec)->required();
  n_cnt->callback([&] { action = [&] { return net_count(na); }; });

  // train / classify / sweep
  TrainArgs ta;
  std::string classify_model;
  auto add_train_opts = [&](CLI::App* sub) {
    sub->add_option("--spec", ta.spec, "e.g. 2-2-1/inp-tanh-tanh")->required();
    sub->add_option("--data", ta.data)->required();
    sub->add_option("--target", ta.target);
    sub->add_option("--lr", ta.lr)->capture_default_str();
    sub->add_option("--max-iters", ta.max_iters)->capture_default_str();
    sub->add_option("--tol", ta.tol)->capture_default_str();
    sub->add_option("--mode", ta.mode)
        ->check(CLI::IsMember({"per-sample", "full-batch"}))
        ->capture_default_str();
    sub->add_option("--seed", ta.seed)->required();
    sub->add_option("--init-range", ta.init_range)->capture_default_str();
  };
  auto* tr = app.add_subcommand("train", "Gradient-descent training");
  add_train_opts(tr);
  tr->add_option("--out", ta.out, "Model file");
  tr->add_option("--log", ta.log, "Per-epoch SSE CSV");
  tr->callback([&] { action = [&] { return train_cmd(ta); }; });

  auto* cl = app.add_subcommand("classify", "Label a 2-input model against the limit functions");
  cl->add_option("--model", classify_model)->required();
  cl->add_option("--tol", ta.classify_tol)->capture_default_str();
  cl->add_option("--grid", ta.grid)->capture_default_str();
  cl->callback([&] { action = [&] { return classify_cmd(ta, classify_model); }; });

  auto* sw = app.add_subcommand("sweep", "Seeded restarts with a label histogram");
  add_train_opts(sw);
  sw->add_option("--restarts", ta.restarts)->required();
  sw->add_option("--out", ta.out, "Per-run CSV");
  sw->add_option("--threads", ta.threads, "0 = all cores")->capture_default_str();
  sw->add_option("--classify-tol", ta.classify_tol)->capture_default_str();
  sw->add_option("--grid", ta.grid)->capture_default_str();
  sw->callback([&] { action = [&] { return sweep_cmd(ta); }; });

  // surface
  SurfaceArgs sa;
  auto* surf = app.add_subcommand("surface", "2-D error-surface projections");
  auto add_surface_opts = [&](CLI::App* sub) {
    sub->add_option("--model", sa.model);
    sub->add_option("--data", sa.data);
    sub->add_option("--target", sa.target);
    sub->add_option("--range", sa.range, "LO,HI")->capture_default_str();
    sub->add_option("--steps", sa.steps)->capture_default_str();
    sub->add_option("--threads", sa.threads, "0 = all cores")->capture_default_str();
  };
  add_surface_opts(surf);
  surf->add_option("--pair", sa.pair, "e.g. w1_11,w1_12");
  surf->add_option("--out", sa.out);
  auto* all = surf->add_subcommand("all-pairs", "Every weight pair");
  add_surface_opts(all);
  all->add_option("--out-dir", sa.out_dir);
  surf->callback([&] {
    if (all->parsed()) return;
    action = [&] {
      require(sa.model, "--model");
      require(sa.data, "--data");
      require(sa.pair, "--pair");
      require(sa.out, "--out");
      return surface_cmd(sa);
    };
  });
  all->callback([&] {
    action = [&] {
      require(sa.model, "--model");
      require(sa.data, "--data");
      require(sa.out_dir, "--out-dir");
      return surface_all(sa);
    };
  });

  // dataset
  std::string ds_name;
  std::string ds_out;
  auto* ds = app.add_subcommand("dataset", "Built-in datasets");
  ds->require_subcommand(1);
  auto* d_emit = ds->add_subcommand("emit", "Write a built-in dataset as CSV");
  d_emit->add_option("--name", ds_name)->required();
  d_emit->add_option("--out", ds_out)->required();
  d_emit->callback([&] { action = [&] { return dataset_emit(ds_name, ds_out); }; });
  auto* d_list = ds->add_subcommand("list", "List built-in datasets");
  d_list->callback([&] { action = [] { return dataset_list(); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    const Result result = action();
    render(result, format, out);
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace xorcop::cli
