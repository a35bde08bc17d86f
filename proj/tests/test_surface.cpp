#include <doctest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "xorcop/error.hpp"
#include "xorcop/surface.hpp"
#include "xorcop/trainer.hpp"

using namespace xorcop;

namespace {

using A = Activation;

const WeightCoord w11{0, 0, 0};
const WeightCoord w12{0, 0, 1};

// Brute-force 4-neighbour scan, independent of landscape_stats.
std::size_t count_strict_minima(const Matrix& v) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
      bool strict = true;
      if (i > 0) strict = strict && v(i, j) < v(i - 1, j);
      if (i + 1 < v.rows()) strict = strict && v(i, j) < v(i + 1, j);
      if (j > 0) strict = strict && v(i, j) < v(i, j - 1);
      if (j + 1 < v.cols()) strict = strict && v(i, j) < v(i, j + 1);
      if (strict) ++n;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("weight coordinate names") {
  CHECK(w11.to_string() == "w1_11");
  CHECK((WeightCoord{1, 0, 2}).to_string() == "w2_13");
  CHECK((WeightCoord{0, 2, 11}).to_string() == "w1_3_12");
  CHECK(WeightCoord::parse("w1_12") == w12);
  CHECK(WeightCoord::parse("w1_1_2") == w12);
  CHECK(WeightCoord::parse("w1_3_12") == WeightCoord{0, 2, 11});
  CHECK_THROWS_AS(WeightCoord::parse("w0_11"), ParseError);
  CHECK_THROWS_AS(WeightCoord::parse("x1_11"), ParseError);
  CHECK_THROWS_AS(WeightCoord::parse("w1_1"), ParseError);
  for (const auto& c : weight_coords(parse_spec("2-12-1/inp-tanh-tanh"))) {
    CHECK(WeightCoord::parse(c.to_string()) == c);
  }
  CHECK_THROWS_AS(check_coord(parse_spec("2-2-1/inp-id-id"), WeightCoord{1, 1, 0}), LookupError);
}

TEST_CASE("pair enumeration") {
  CHECK(enumerate_pairs(parse_spec("2-2-1/inp-id-id")).size() == 36);
  CHECK(enumerate_pairs(parse_spec("2-1/inp-id")).size() == 3);
  CHECK(enumerate_pairs(parse_spec("2-4-1/inp-relu-relu")).size() == 136);
  const auto pairs = enumerate_pairs(parse_spec("2-2-1/inp-id-id"));
  CHECK(pairs.front().first == w11);
  CHECK(pairs.front().second == w12);
  for (std::size_t i = 1; i < pairs.size(); ++i) CHECK(pairs[i - 1] < pairs[i]);
  for (const auto& [a, b] : pairs) CHECK(a < b);
}

TEST_CASE("project argument checks") {
  const Network net = anchor_network(A::Id, A::Id);
  const Dataset x = builtin("boolean_xor");
  CHECK_THROWS_AS(project(net, x, w11, w11), DomainError);
  CHECK_THROWS_AS(project(net, x, w11, w12, {}, {}, 1), ShapeError);
  CHECK_THROWS_AS(project(net, x, w11, WeightCoord{2, 0, 0}), LookupError);
}

TEST_CASE("a two-step grid is the four corner SSEs") {
  const Network net = anchor_network(A::Tanh, A::Tanh);
  const Dataset x = builtin("boolean_xor");
  const SurfaceGrid g = project(net, x, w11, WeightCoord{1, 0, 2}, {}, {}, 2);
  REQUIRE(g.values.rows() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double va = i == 0 ? -5.0 : 5.0, vb = j == 0 ? -5.0 : 5.0;
      CHECK(g.values(i, j) == sse(net.with_weight(0, 0, 0, va).with_weight(1, 0, 2, vb), x));
    }
  }
}

TEST_CASE("random cells match direct evaluation and thread count does not matter") {
  gen::Rng rng(71);
  const Dataset x = builtin("boolean_xor");
  for (int trial = 0; trial < 5; ++trial) {
    const Network net = gen::network(rng, {2, 2, 1}, {A::Tanh, A::Sigmoid});
    const auto pairs = enumerate_pairs(net.topology());
    const auto [a, b] = pairs[gen::index(rng, pairs.size())];
    const SurfaceGrid g1 = project(net, x, a, b, {-2, 2}, {-3, 1}, 17, 1);
    const SurfaceGrid g4 = project(net, x, a, b, {-2, 2}, {-3, 1}, 17, 4);
    CHECK(g1.values == g4.values);
    for (int k = 0; k < 10; ++k) {
      const std::size_t i = gen::index(rng, 17), j = gen::index(rng, 17);
      const double va = g1.range_a.at(i, 17), vb = g1.range_b.at(j, 17);
      const Network edited = net.with_weight(a.layer, a.row, a.col, va).with_weight(b.layer, b.row, b.col, vb);
      CHECK(g1.values(i, j) == sse(edited, x));
    }
  }
}

TEST_CASE("swapping the coordinates transposes the grid") {
  gen::Rng rng(72);
  const Dataset x = builtin("analog");
  for (int trial = 0; trial < 5; ++trial) {
    const Network net = gen::network(rng, {2, 2, 1}, {A::Tanh, A::Tanh});
    const auto pairs = enumerate_pairs(net.topology());
    const auto [a, b] = pairs[gen::index(rng, pairs.size())];
    const SurfaceGrid ab = project(net, x, a, b, {}, {}, 11);
    const SurfaceGrid ba = project(net, x, b, a, {}, {}, 11);
    CHECK(ab.values == transpose(ba.values));
  }
}

TEST_CASE("linear projections are convex along grid lines") {
  const SurfaceGrid g = project(anchor_network(A::Id, A::Id), builtin("boolean_xor"), w11, w12);
  const Matrix& v = g.values;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 1; j + 1 < v.cols(); ++j) {
      CHECK(v(i, j - 1) + v(i, j + 1) - 2 * v(i, j) >= -1e-9);
      CHECK(v(j - 1, i) + v(j + 1, i) - 2 * v(j, i) >= -1e-9);
    }
  }
  const LandscapeStats st = landscape_stats(g);
  CHECK(st.local_minima == count_strict_minima(v));
  // The continuous minimum sits at (-0.4, -0.65), midway between two lattice
  // columns; the two neighbouring cells tie exactly, so neither is strict.
  CHECK(std::abs(st.min_a + 0.4) < 1e-9);
  CHECK(std::abs(v(46, 43) - v(46, 44)) < 1e-12);
  CHECK(st.local_minima == 0);
}

TEST_CASE("paraboloid with an off-lattice centre has one strict minimum") {
  // Irrational-looking offsets keep neighbouring cells from tying.
  Matrix v(41, 41);
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < 41; ++i) {
    for (std::size_t j = 0; j < 41; ++j) {
      const double a = static_cast<double>(i) - 13.371, b = static_cast<double>(j) - 27.613;
      v(i, j) = 2 * a * a + 0.537 * a * b + b * b + 1.0;
      if (v(i, j) < v(bi, bj)) bi = i, bj = j;
    }
  }
  const LandscapeStats st = landscape_stats(v);
  CHECK(st.local_minima == 1);
  CHECK(st.plateau_fraction == 0.0);
  CHECK(st.min_i == bi);
  CHECK(st.min_j == bj);
  CHECK(st.min_value == v(bi, bj));
}

TEST_CASE("constant grid is one plateau") {
  const LandscapeStats st = landscape_stats(Matrix(5, 7, 3.0));
  CHECK(st.plateau_fraction == 1.0);
  CHECK(st.local_minima == 0);
  CHECK(st.min_value == 3.0);
  CHECK(st.max_value == 3.0);
  CHECK_THROWS_AS(landscape_stats(Matrix(2, 5, 0.0)), ShapeError);
}

TEST_CASE("random grids agree with the brute-force scan") {
  gen::Rng rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix v(3 + gen::index(rng, 8), 3 + gen::index(rng, 8));
    for (double& e : v.data()) e = static_cast<double>(gen::index(rng, 4));
    CHECK(landscape_stats(v).local_minima == count_strict_minima(v));
  }
}

TEST_CASE("relu projection has flat regions") {
  const SurfaceGrid g = project(anchor_network(A::Relu, A::Relu), builtin("boolean_xor"), w11, w12);
  CHECK(landscape_stats(g).plateau_fraction > 0.0);
}

TEST_CASE("grid output formats") {
  const SurfaceGrid g = project(anchor_network(A::Id, A::Id), builtin("boolean_xor"), w11, w12, {}, {}, 3);
  std::ostringstream out;
  write_grid_csv(g, out);
  const std::string text = out.str();
  CHECK(text.rfind("wa,wb,err\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);
  const std::string meta = grid_metadata_json(g, "boolean_xor", "anchor");
  CHECK(meta.find("w1_11") != std::string::npos);
  CHECK(meta.find("boolean_xor") != std::string::npos);
}
