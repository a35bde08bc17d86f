#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "xorcop/datasets.hpp"
#include "xorcop/error.hpp"
#include "xorcop/problogic.hpp"

using namespace xorcop;

namespace {

// Closed forms of the three limiting xor functions.
double f0(double x, double y) { return x + y - 2.0 * std::min(x, y); }
double f1(double x, double y) { return x + y - 2.0 * x * y; }
double finf(double x, double y) { return x + y - 2.0 * std::max(x + y - 1.0, 0.0); }

bool is_boolean(const Dataset& d) {
  for (const auto& s : d.samples()) {
    for (double v : s.inputs) if (v != 0.0 && v != 1.0) return false;
    for (double v : s.targets) if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("every builtin satisfies the dataset invariants") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const Dataset d = builtin(name);
    CHECK(d.name() == name);
    CHECK(d.size() >= 1);
    for (const auto& s : d.samples()) {
      CHECK(s.inputs.size() == d.input_arity());
      CHECK(s.targets.size() == d.target_count());
      for (double v : s.inputs) CHECK((v >= 0.0 && v <= 1.0));
      for (double v : s.targets) CHECK((v >= 0.0 && v <= 1.0));
    }
    if (is_boolean(d) && d.input_arity() == 2) {
      const auto freq = empirical_frequencies(d);
      const SampleSpace space = SampleSpace::from_dataset(d);
      const double px = freq.at(d.input_names()[0]), py = freq.at(d.input_names()[1]);
      const auto x = BoolExpr::var(d.input_names()[0]), y = BoolExpr::var(d.input_names()[1]);
      const double pand = truth_table_prob(BoolExpr::conj(x, y), space);
      const double por = truth_table_prob(BoolExpr::disj(x, y), space);
      CHECK(check_consistency(UnitValue(px), UnitValue(py), UnitValue(pand), UnitValue(por)).consistent());
    }
  }
  CHECK_THROWS_AS(builtin("nope"), LookupError);
  try {
    builtin("nope");
  } catch (const LookupError& e) {
    CHECK(std::string(e.what()).find("boolean_xor") != std::string::npos);
  }
}

TEST_CASE("builtin tables") {
  const Dataset x = builtin("boolean_xor");
  REQUIRE(x.size() == 4);
  CHECK(x.samples()[0] == Sample{{0, 0}, {0}});
  CHECK(x.samples()[1] == Sample{{0, 1}, {1}});
  CHECK(x.samples()[2] == Sample{{1, 0}, {1}});
  CHECK(x.samples()[3] == Sample{{1, 1}, {0}});

  CHECK(builtin("copula_s1").samples()[0] == Sample{{0.25, 0.25}, {0.375}});
  CHECK(builtin("analog").size() == 5);
  CHECK(builtin("copula_s1").size() == 5);
  CHECK(builtin("all").size() == 9);

  const Dataset o = builtin("outsample_fig7_2");
  CHECK(o.target_count() == 3);
  CHECK(o.samples()[1] == Sample{{0.5, 0.5}, {0, 0.5, 1}});
}

TEST_CASE("tables that follow a copula agree with the closed forms") {
  for (const char* name : {"analog", "copula_s1", "all", "boolean_xor"}) {
    const Dataset d = builtin(name);
    for (const auto& s : d.samples()) {
      CHECK(std::abs(s.targets[0] - f1(s.inputs[0], s.inputs[1])) < 1e-15);
    }
  }
  const Dataset out = builtin("outsample_fig7_2");
  for (const auto& s : out.samples()) {
    const double a = s.inputs[0], b = s.inputs[1];
    CHECK(std::abs(s.targets[0] - f0(a, b)) < 1e-15);
    CHECK(std::abs(s.targets[1] - f1(a, b)) < 1e-15);
    CHECK(std::abs(s.targets[2] - finf(a, b)) < 1e-15);
  }
}

TEST_CASE("all contains every boolean, analog and copula row it can") {
  const Dataset all = builtin("all");
  auto contains = [&](const Sample& s) {
    return std::find(all.samples().begin(), all.samples().end(), s) != all.samples().end();
  };
  const Dataset x = builtin("boolean_xor");
  for (const auto& s : x.samples()) CHECK(contains(s));
  CHECK(contains(Sample{{0.5, 0.5}, {0.5}}));
}

TEST_CASE("synth_copula") {
  std::vector<std::pair<double, double>> pts;
  const Dataset c1 = builtin("copula_s1");
  for (const auto& s : c1.samples()) pts.emplace_back(s.inputs[0], s.inputs[1]);
  const Dataset d = synth_copula(CopulaParam::one(), pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(d.samples()[i].targets == builtin("copula_s1").samples()[i].targets);
  }
  CHECK(d.name().find("copula_s") == 0);

  const Dataset corners = synth_copula(CopulaParam::zero(), {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(corners.samples()[i].targets == builtin("boolean_xor").samples()[i].targets);
  }

  const Dataset grid = synth_copula(CopulaParam::from_value(2.0), 5);
  CHECK(grid.size() == 25);
  CHECK(grid.samples()[1].inputs == std::vector<double>{0.0, 0.25});
  for (const auto& s : grid.samples()) {
    CHECK(s.targets[0] >= f0(s.inputs[0], s.inputs[1]) - 1e-12);
    CHECK(s.targets[0] <= finf(s.inputs[0], s.inputs[1]) + 1e-12);
  }
}

TEST_CASE("baselines") {
  CHECK(baseline("Fd", 1, 1) == 3.0);
  CHECK(baseline("Fd", 0, 0) == -1.0);
  CHECK(baseline("outOr", 0.2, 0.4) == 1.0);
  CHECK(baseline("outAnd", 0.2, 0.4) == 0.0);
  for (double x : {0.0, 1.0}) CHECK(baseline("Fe", x, x) == 0.0);
  CHECK(baseline("Fa", 0.3, 0.1) == 1.0);
  CHECK(baseline("Fb", 0.3, 0.1) == 0.0);
  CHECK(baseline("Fc", 0.3, 0.1) == 0.5);
  CHECK(baseline("Rand", 0.2, 0.4) == doctest::Approx(0.05));
  CHECK(baseline("Ror", 0.2, 0.4) == doctest::Approx(0.55));
  CHECK_THROWS_AS(baseline("Fz", 0, 0), LookupError);

  gen::Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const double x = gen::uniform(rng), y = gen::uniform(rng);
    CHECK(std::abs(baseline("Fe", x, y) - f1(x, y)) < 1e-15);
    CHECK(std::abs(baseline("Fe", x, y) - baseline("Fg", x, y)) < 1e-15);
    CHECK(std::abs(baseline("Rand", x, y) + baseline("Ror", x, y) - (x + y)) < 1e-12);
  }
}

TEST_CASE("CSV emit and load") {
  std::ostringstream out;
  emit_csv(builtin("boolean_xor"), out);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  CHECK(text.rfind("x1,x2,target\n", 0) == 0);

  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const Dataset d = builtin(name);
    std::ostringstream o;
    emit_csv(d, o);
    std::istringstream in(o.str());
    CHECK(load_csv(in, name) == d);
  }

  gen::Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = synth_copula(CopulaParam::from_value(gen::copula_s(rng)), 2 + gen::index(rng, 6));
    std::ostringstream o;
    emit_csv(d, o);
    std::istringstream in(o.str());
    CHECK(load_csv(in, d.name()) == d);
  }
}

TEST_CASE("CSV errors report the line") {
  {
    std::istringstream in("x1,x2,target\n0,0,0\n0,1,1.5\n");
    try {
      load_csv(in, "bad");
      FAIL("expected DomainError");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
  }
  {
    std::istringstream in("x1,x2,target\n0,0,0\n0,1\n");
    try {
      load_csv(in, "bad");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.position() == 3);
    }
  }
  {
    std::istringstream in("x1,x2,target\n0,abc,0\n");
    CHECK_THROWS_AS(load_csv(in, "bad"), ParseError);
  }
  {
    std::istringstream in("x1,x2,target\n");
    CHECK_THROWS(load_csv(in, "empty"));
  }
}

TEST_CASE("file round trip and resolve_dataset") {
  const auto path = std::filesystem::temp_directory_path() / "xorcop_fixture.csv";
  emit_csv(builtin("copula_s1"), path);
  const Dataset back = load_csv(path);
  CHECK(back.name() == "xorcop_fixture");
  CHECK(back.samples() == builtin("copula_s1").samples());
  CHECK(resolve_dataset(path.string()).samples() == back.samples());
  CHECK(resolve_dataset("boolean_and") == builtin("boolean_and"));
  CHECK_THROWS(resolve_dataset("/no/such/file.csv"));
  std::filesystem::remove(path);
}

TEST_CASE("regression arrays") {
  const auto [x, t] = regression_arrays(builtin("boolean_xor"));
  CHECK(x.rows() == 3);
  CHECK(x.cols() == 4);
  CHECK(t == Matrix{{0, 1, 1, 0}});
  for (std::size_t j = 0; j < 4; ++j) CHECK(x(2, j) == 1.0);
  const auto [xp, tp] = regression_arrays(builtin("boolean_xor"), 0, true);
  CHECK(xp.rows() == 4);
  CHECK(xp(2, 3) == 1.0);
  CHECK(xp(2, 1) == 0.0);
  const Dataset o = builtin("outsample_fig7_2");
  CHECK(regression_arrays(o, 2).second(0, 1) == 1.0);
  CHECK_THROWS(regression_arrays(o, 3));
}
