#include "xorcop/surface.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "xorcop/error.hpp"
#include "xorcop/trainer.hpp"

namespace xorcop {

std::string WeightCoord::to_string() const {
  const std::size_t r = row + 1;
  const std::size_t c = col + 1;
  std::string out = "w" + std::to_string(layer + 1) + "_" + std::to_string(r);
  if (r >= 10 || c >= 10) out += "_";
  return out + std::to_string(c);
}

WeightCoord WeightCoord::parse(const std::string& text) {
  auto fail = [&](const std::string& why, std::size_t at) -> ParseError {
    return ParseError("bad weight name '" + text + "': " + why, at, {"w<layer>_<row><col>"});
  };
  if (text.size() < 4 || (text[0] != 'w' && text[0] != 'W')) throw fail("expected leading 'w'", 0);
  const std::size_t us = text.find('_');
  if (us == std::string::npos) throw fail("missing '_'", text.size());

  auto number = [&](std::size_t from, std::size_t to) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data() + from, text.data() + to, v);
    if (from == to || ec != std::errc() || ptr != text.data() + to || v == 0) {
      throw fail("expected a positive index", from);
    }
    return v;
  };

  WeightCoord c;
  c.layer = number(1, us) - 1;
  const std::size_t us2 = text.find('_', us + 1);
  if (us2 == std::string::npos) {
    // Compact form: exactly one digit each for row and column.
    if (text.size() != us + 3) throw fail("compact form needs one digit each for row and column", us + 1);
    c.row = number(us + 1, us + 2) - 1;
    c.col = number(us + 2, us + 3) - 1;
  } else {
    c.row = number(us + 1, us2) - 1;
    c.col = number(us2 + 1, text.size()) - 1;
  }
  return c;
}

void check_coord(const Topology& topology, const WeightCoord& c) {
  const auto& sizes = topology.layer_sizes();
  if (c.layer >= topology.depth() || c.row >= sizes[c.layer + 1] || c.col >= sizes[c.layer] + 1) {
    throw LookupError("weight " + c.to_string() + " does not exist in " + topology.to_string());
  }
}

std::vector<WeightCoord> weight_coords(const Topology& topology) {
  std::vector<WeightCoord> coords;
  const auto& sizes = topology.layer_sizes();
  for (std::size_t l = 0; l < topology.depth(); ++l) {
    for (std::size_t r = 0; r < sizes[l + 1]; ++r) {
      for (std::size_t c = 0; c <= sizes[l]; ++c) coords.push_back({l, r, c});
    }
  }
  return coords;
}

std::vector<std::pair<WeightCoord, WeightCoord>> enumerate_pairs(const Topology& topology) {
  const auto coords = weight_coords(topology);
  std::vector<std::pair<WeightCoord, WeightCoord>> pairs;
  pairs.reserve(coords.size() * (coords.size() - 1) / 2);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = i + 1; j < coords.size(); ++j) pairs.emplace_back(coords[i], coords[j]);
  }
  return pairs;
}

double surface_cell(const Network& net, const Dataset& data, const WeightCoord& a, double va,
                    const WeightCoord& b, double vb) {
  return sse(net.with_weight(a.layer, a.row, a.col, va).with_weight(b.layer, b.row, b.col, vb), data);
}

SurfaceGrid project(const Network& net, const Dataset& data, const WeightCoord& a,
                    const WeightCoord& b, AxisRange range_a, AxisRange range_b, std::size_t steps,
                    std::size_t threads) {
  check_coord(net.topology(), a);
  check_coord(net.topology(), b);
  if (a == b) throw DomainError("projection needs two distinct weights, got " + a.to_string() + " twice");
  if (steps < 2) throw ShapeError("a surface grid needs at least 2 steps per axis");
  if (data.input_arity() != net.topology().input_size() || data.target_count() != 1) {
    throw ShapeError("dataset '" + data.name() + "' does not match " + net.topology().to_string());
  }
  for (const AxisRange* r : {&range_a, &range_b}) {
    if (!std::isfinite(r->lo) || !std::isfinite(r->hi) || !(r->lo < r->hi)) {
      throw DomainError("surface range must satisfy lo < hi");
    }
  }

  SurfaceGrid grid{a, b, range_a, range_b, steps, Matrix(steps, steps), net};
  std::atomic<std::size_t> next_row{0};
  auto worker = [&] {
    for (std::size_t i = next_row++; i < steps; i = next_row++) {
      const double va = range_a.at(i, steps);
      Network row_net = net.with_weight(a.layer, a.row, a.col, va);
      for (std::size_t j = 0; j < steps; ++j) {
        grid.values(i, j) = sse(row_net.with_weight(b.layer, b.row, b.col, range_b.at(j, steps)), data);
      }
    }
  };
  std::size_t n = threads ? threads : std::thread::hardware_concurrency();
  n = std::clamp<std::size_t>(n, 1, steps);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  return grid;
}

LandscapeStats landscape_stats(const Matrix& v) {
  if (v.rows() < 3 || v.cols() < 3) throw ShapeError("landscape statistics need at least 3x3 cells");
  LandscapeStats st;
  st.min_value = v(0, 0);
  st.max_value = v(0, 0);
  std::size_t plateau = 0;
  const std::size_t rows = v.rows();
  const std::size_t cols = v.cols();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double x = v(i, j);
      if (x < st.min_value) {
        st.min_value = x;
        st.min_i = i;
        st.min_j = j;
      }
      st.max_value = std::max(st.max_value, x);
      bool strict_min = true;
      bool flat = false;
      auto visit = [&](std::size_t r, std::size_t c) {
        const double y = v(r, c);
        if (!(x < y)) strict_min = false;
        if (std::abs(x - y) <= kPlateauTolerance) flat = true;
      };
      if (i > 0) visit(i - 1, j);
      if (i + 1 < rows) visit(i + 1, j);
      if (j > 0) visit(i, j - 1);
      if (j + 1 < cols) visit(i, j + 1);
      if (strict_min) ++st.local_minima;
      if (flat) ++plateau;
    }
  }
  st.plateau_fraction = static_cast<double>(plateau) / static_cast<double>(rows * cols);
  return st;
}

LandscapeStats landscape_stats(const SurfaceGrid& grid) {
  LandscapeStats st = landscape_stats(grid.values);
  st.min_a = grid.range_a.at(st.min_i, grid.steps);
  st.min_b = grid.range_b.at(st.min_j, grid.steps);
  return st;
}

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_grid_csv(const SurfaceGrid& grid, std::ostream& out) {
  out << "wa,wb,err\n";
  for (std::size_t i = 0; i < grid.steps; ++i) {
    const std::string wa = g17(grid.range_a.at(i, grid.steps));
    for (std::size_t j = 0; j < grid.steps; ++j) {
      out << wa << ',' << g17(grid.range_b.at(j, grid.steps)) << ',' << g17(grid.values(i, j))
          << '\n';
    }
  }
}

std::string grid_metadata_json(const SurfaceGrid& grid, const std::string& dataset_name,
                               const std::string& model_ref) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = "1";
  doc["wa"] = grid.coord_a.to_string();
  doc["wb"] = grid.coord_b.to_string();
  doc["range_a"] = {grid.range_a.lo, grid.range_a.hi};
  doc["range_b"] = {grid.range_b.lo, grid.range_b.hi};
  doc["steps"] = grid.steps;
  doc["dataset"] = dataset_name;
  doc["model"] = model_ref;
  doc["spec"] = grid.frozen_net.topology().to_string();
  if (grid.steps >= 3) {
    const LandscapeStats st = landscape_stats(grid);
    doc["stats"] = {{"min", st.min_value},
                    {"min_wa", st.min_a},
                    {"min_wb", st.min_b},
                    {"max", st.max_value},
                    {"local_minima", st.local_minima},
                    {"plateau_fraction", st.plateau_fraction}};
  }
  return doc.dump(2) + "\n";
}

Network anchor_network(Activation hidden, Activation output) {
  return Network(Topology({2, 2, 1}, {hidden, output}),
                 {Matrix{{0.1, -0.1, 0.2}, {-0.2, 0.3, 0.1}}, Matrix{{-0.4, -0.2, 0.3}}});
}

}  // namespace xorcop
