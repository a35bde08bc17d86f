#include "xorcop/datasets.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "xorcop/error.hpp"

namespace xorcop {

Dataset::Dataset(std::string name, std::vector<std::string> input_names,
                 std::vector<std::string> target_names, std::vector<Sample> samples)
    : name_(std::move(name)),
      input_names_(std::move(input_names)),
      target_names_(std::move(target_names)),
      samples_(std::move(samples)) {
  if (samples_.empty()) throw ShapeError("dataset '" + name_ + "' has no samples");
  if (input_names_.empty() || target_names_.empty()) {
    throw ShapeError("dataset '" + name_ + "' needs at least one input and one target column");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (s.inputs.size() != input_names_.size() || s.targets.size() != target_names_.size()) {
      throw ShapeError("dataset '" + name_ + "' row " + std::to_string(i) + " has " +
                       std::to_string(s.inputs.size()) + " inputs and " +
                       std::to_string(s.targets.size()) + " targets, expected " +
                       std::to_string(input_names_.size()) + " and " +
                       std::to_string(target_names_.size()));
    }
    for (const auto* column : {&s.inputs, &s.targets}) {
      for (double v : *column) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw DomainError("dataset '" + name_ + "' row " + std::to_string(i) + " has value " +
                            std::to_string(v) + " outside [0, 1]");
        }
      }
    }
  }
}

std::size_t Dataset::target_column(const std::string& name) const {
  for (std::size_t i = 0; i < target_names_.size(); ++i) {
    if (target_names_[i] == name) return i;
  }
  std::string known;
  for (const auto& t : target_names_) known += (known.empty() ? "" : ", ") + t;
  throw LookupError("dataset '" + name_ + "' has no target '" + name + "' (targets: " + known + ")");
}

Dataset Dataset::select_target(std::size_t column) const {
  if (column >= target_names_.size()) {
    throw ShapeError("target column " + std::to_string(column) + " out of range for '" + name_ +
                     "'");
  }
  std::vector<Sample> rows;
  rows.reserve(samples_.size());
  for (const Sample& s : samples_) rows.push_back({s.inputs, {s.targets[column]}});
  Dataset out(name_ + ":" + target_names_[column], input_names_, {target_names_[column]},
              std::move(rows));
  out.set_note(note_);
  return out;
}

namespace {

using Row = std::vector<double>;

Dataset table(std::string name, std::vector<std::string> inputs, std::vector<std::string> targets,
              const std::vector<Row>& rows) {
  const std::size_t k = inputs.size();
  std::vector<Sample> samples;
  for (const Row& r : rows) {
    samples.push_back({Row(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k)),
                       Row(r.begin() + static_cast<std::ptrdiff_t>(k), r.end())});
  }
  return Dataset(std::move(name), std::move(inputs), std::move(targets), std::move(samples));
}

Dataset two_input(std::string name, const std::vector<Row>& rows) {
  return table(std::move(name), {"x1", "x2"}, {"target"}, rows);
}

// Truth-table rows drawn in the worked probability examples:
// columns x1, x2, and, or, xor.
Dataset statement_table(std::string name, const std::vector<Row>& rows) {
  return table(std::move(name), {"x1", "x2"}, {"and", "or", "xor"}, rows);
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"boolean_xor", "boolean_and", "boolean_or",
                                              "fig2_1",      "fig2_4",      "analog",
                                              "copula_s1",   "all",         "outsample_fig7_2"};
  return names;
}

Dataset builtin(const std::string& name) {
  if (name == "boolean_xor") {
    return two_input(name, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  }
  if (name == "boolean_and") {
    return two_input(name, {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1}});
  }
  if (name == "boolean_or") {
    return two_input(name, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}});
  }
  if (name == "fig2_1") {
    return statement_table(name, {{0, 0, 0, 0, 0},
                                  {0, 0, 0, 0, 0},
                                  {1, 0, 0, 1, 1},
                                  {1, 1, 1, 1, 0},
                                  {0, 1, 0, 1, 1},
                                  {1, 0, 0, 1, 1},
                                  {0, 0, 0, 0, 0},
                                  {1, 1, 1, 1, 0},
                                  {1, 1, 1, 1, 0},
                                  {0, 1, 0, 1, 1}});
  }
  if (name == "fig2_4") {
    return statement_table(name, {{1, 0, 0, 1, 1},
                                  {0, 1, 0, 1, 1},
                                  {1, 0, 0, 1, 1},
                                  {0, 1, 0, 1, 1},
                                  {0, 1, 0, 1, 1},
                                  {1, 1, 1, 1, 0},
                                  {1, 0, 0, 1, 1},
                                  {0, 1, 0, 1, 1},
                                  {0, 1, 0, 1, 1},
                                  {0, 1, 0, 1, 1}});
  }
  if (name == "analog") {
    return two_input(name, {{0, 0, 0}, {0, 0.5, 0.5}, {0, 0.75, 0.75}, {0, 1, 1}, {0.5, 0, 0.5}});
  }
  if (name == "copula_s1") {
    return two_input(name, {{0.25, 0.25, 0.375},
                            {0.25, 0.5, 0.5},
                            {0.25, 0.75, 0.625},
                            {0.5, 0.25, 0.5},
                            {0.5, 0.5, 0.5}});
  }
  if (name == "all") {
    Dataset ds = two_input(name, {{0, 0, 0},
                                  {0, 0.5, 0.5},
                                  {0, 1, 1},
                                  {0.5, 0, 0.5},
                                  {0.5, 0.5, 0.5},
                                  {0.5, 1, 0.5},
                                  {1, 0, 1},
                                  {1, 0.5, 0.5},
                                  {1, 1, 0}});
    ds.set_note(
        "rows 5-8 reconstructed: the printed table stops after row 4; the remaining cells of "
        "the {0, 0.5, 1} lattice carry F_1 targets");
    return ds;
  }
  if (name == "outsample_fig7_2") {
    return table(name, {"x1", "x2"}, {"s0", "s1", "sinf"},
                 {{0.5, 1, 0.5, 0.5, 0.5},
                  {0.5, 0.5, 0, 0.5, 1},
                  {0.75, 0.25, 0.5, 0.625, 1},
                  {0.75, 0.5, 0.25, 0.5, 0.75},
                  {0.75, 0.75, 0, 0.375, 0.5}});
  }
  std::string known;
  for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
  throw LookupError("unknown dataset '" + name + "' (known: " + known + ")");
}

Dataset synth_copula(CopulaParam s, const std::vector<std::pair<double, double>>& points) {
  std::vector<Sample> rows;
  rows.reserve(points.size());
  for (auto [x, y] : points) {
    rows.push_back({{x, y}, {xor_f(s, UnitValue(x), UnitValue(y)).value()}});
  }
  return Dataset("copula_s" + s.to_string(), {"x1", "x2"}, {"target"}, std::move(rows));
}

Dataset synth_copula(CopulaParam s, std::size_t steps) {
  if (steps < 2) throw ShapeError("synth_copula lattice needs at least 2 steps per axis");
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < steps; ++i) {
    for (std::size_t j = 0; j < steps; ++j) {
      points.emplace_back(static_cast<double>(i) / static_cast<double>(steps - 1),
                          static_cast<double>(j) / static_cast<double>(steps - 1));
    }
  }
  return synth_copula(s, points);
}

const std::vector<std::string>& baseline_names() {
  static const std::vector<std::string> names{"Fa",   "Fb",  "Fc",     "Fd",   "Fe",
                                              "Fg",   "Rand", "Ror",   "outAnd", "outOr"};
  return names;
}

double baseline(const std::string& name, double x1, double x2) {
  const double rand = 0.5 * x1 + 0.5 * x2 - 0.25;
  const double ror = 0.5 * x1 + 0.5 * x2 + 0.25;
  if (name == "Fa") return 1.0;
  if (name == "Fb") return 0.0;
  if (name == "Fc") return 0.5;
  if (name == "Fd") return 2.0 * x1 + 2.0 * x2 - 1.0;
  if (name == "Fe") return x1 + x2 - 2.0 * x1 * x2;
  if (name == "Fg") return x1 + x2 - 2.0 * (x1 * x2);
  if (name == "Rand") return rand;
  if (name == "Ror") return ror;
  if (name == "outAnd") return rand > 0.5 ? 1.0 : 0.0;
  if (name == "outOr") return ror > 0.5 ? 1.0 : 0.0;
  std::string known;
  for (const auto& n : baseline_names()) known += (known.empty() ? "" : ", ") + n;
  throw LookupError("unknown baseline '" + name + "' (known: " + known + ")");
}

namespace {

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

}  // namespace

void emit_csv(const Dataset& data, std::ostream& out) {
  std::string header;
  for (const auto& n : data.input_names()) header += n + ",";
  if (data.target_count() == 1) {
    header += "target";
  } else {
    for (std::size_t i = 0; i < data.target_count(); ++i) {
      header += (i ? ",target_" : "target_") + data.target_names()[i];
    }
  }
  out << header << "\n";
  for (const Sample& s : data.samples()) {
    std::string line;
    for (double v : s.inputs) line += format17(v) + ",";
    for (std::size_t i = 0; i < s.targets.size(); ++i) line += (i ? "," : "") + format17(s.targets[i]);
    out << line << "\n";
  }
}

void emit_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  emit_csv(data, out);
}

Dataset load_csv(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (!line.empty()) break;
  }
  if (line.empty()) throw ParseError("CSV '" + name + "' is empty", line_no, {"header"});
  for (auto& h : split_csv_line(line)) header.push_back(trim(h));

  std::vector<std::string> inputs;
  std::vector<std::string> targets;
  for (const auto& h : header) {
    if (h == "target") {
      targets.push_back("target");
    } else if (h.rfind("target_", 0) == 0 && h.size() > 7) {
      targets.push_back(h.substr(7));
    } else if (!targets.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": input column '" + h +
                           "' follows a target column",
                       line_no, {"target_<name>"});
    } else if (h.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty column name", line_no);
    } else {
      inputs.push_back(h);
    }
  }
  if (targets.empty()) {
    throw ParseError("line " + std::to_string(line_no) + ": header has no target column", line_no,
                     {"target", "target_<name>"});
  }

  std::vector<Sample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    Sample s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": '" + cell +
                             "' is not a number (column " + header[c] + ")",
                         line_no, {"decimal"});
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError("line " + std::to_string(line_no) + ": value " + cell + " in column " +
                          header[c] + " is outside [0, 1]");
      }
      (c < inputs.size() ? s.inputs : s.targets).push_back(v);
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw ParseError("CSV '" + name + "' has no data rows", line_no);
  return Dataset(name, std::move(inputs), std::move(targets), std::move(samples));
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open CSV '" + path.string() + "'");
  return load_csv(in, path.stem().string());
}

Dataset resolve_dataset(const std::string& name_or_path) {
  for (const auto& n : builtin_names()) {
    if (n == name_or_path) return builtin(n);
  }
  if (std::filesystem::exists(name_or_path)) return load_csv(std::filesystem::path(name_or_path));
  return builtin(name_or_path);
}

std::pair<Matrix, Matrix> regression_arrays(const Dataset& data, std::size_t target,
                                            bool product_feature) {
  if (target >= data.target_count()) {
    throw ShapeError("target column " + std::to_string(target) + " out of range for '" +
                     data.name() + "'");
  }
  if (product_feature && data.input_arity() != 2) {
    throw ShapeError("the x1*x2 feature needs exactly two inputs, '" + data.name() + "' has " +
                     std::to_string(data.input_arity()));
  }
  const std::size_t k = data.input_arity() + (product_feature ? 1 : 0);
  const std::size_t n = data.size();
  Matrix x(k + 1, n);
  Matrix t(1, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Sample& s = data.samples()[j];
    for (std::size_t i = 0; i < s.inputs.size(); ++i) x(i, j) = s.inputs[i];
    if (product_feature) x(2, j) = s.inputs[0] * s.inputs[1];
    x(k, j) = 1.0;
    t(0, j) = s.targets[target];
  }
  return {x, t};
}

}  // namespace xorcop
