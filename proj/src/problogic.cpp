#include "xorcop/problogic.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <sstream>

#include "xorcop/datasets.hpp"
#include "xorcop/error.hpp"

namespace xorcop {

struct BoolExpr::Node {
  Kind kind;
  std::string name;
  bool value = false;
  std::vector<BoolExpr> children;
};

BoolExpr BoolExpr::var(std::string name) {
  if (name.empty()) throw DomainError("variable name must be nonempty");
  return BoolExpr(std::make_shared<const Node>(Node{Kind::Var, std::move(name), false, {}}));
}

BoolExpr BoolExpr::constant(bool value) {
  return BoolExpr(std::make_shared<const Node>(Node{Kind::Const, {}, value, {}}));
}

BoolExpr BoolExpr::negate(BoolExpr child) {
  return BoolExpr(std::make_shared<const Node>(Node{Kind::Not, {}, false, {std::move(child)}}));
}

BoolExpr BoolExpr::conj(BoolExpr lhs, BoolExpr rhs) {
  return BoolExpr(
      std::make_shared<const Node>(Node{Kind::And, {}, false, {std::move(lhs), std::move(rhs)}}));
}

BoolExpr BoolExpr::disj(BoolExpr lhs, BoolExpr rhs) {
  return BoolExpr(
      std::make_shared<const Node>(Node{Kind::Or, {}, false, {std::move(lhs), std::move(rhs)}}));
}

BoolExpr BoolExpr::exclusive(BoolExpr lhs, BoolExpr rhs) {
  return BoolExpr(
      std::make_shared<const Node>(Node{Kind::Xor, {}, false, {std::move(lhs), std::move(rhs)}}));
}

BoolExpr::Kind BoolExpr::kind() const noexcept { return node_->kind; }
const std::string& BoolExpr::name() const noexcept { return node_->name; }
bool BoolExpr::constant_value() const noexcept { return node_->value; }

const BoolExpr& BoolExpr::lhs() const {
  if (node_->children.empty()) throw ShapeError("expression node has no operand");
  return node_->children[0];
}

const BoolExpr& BoolExpr::rhs() const {
  if (node_->children.size() < 2) throw ShapeError("expression node has no right operand");
  return node_->children[1];
}

bool BoolExpr::is_binary() const noexcept {
  return node_->kind == Kind::And || node_->kind == Kind::Or || node_->kind == Kind::Xor;
}

bool BoolExpr::evaluate(const std::map<std::string, bool>& assignment) const {
  switch (kind()) {
    case Kind::Var: {
      auto it = assignment.find(name());
      if (it == assignment.end()) throw UnboundVariableError(name());
      return it->second;
    }
    case Kind::Const:
      return constant_value();
    case Kind::Not:
      return !lhs().evaluate(assignment);
    case Kind::And:
      return lhs().evaluate(assignment) && rhs().evaluate(assignment);
    case Kind::Or:
      return lhs().evaluate(assignment) || rhs().evaluate(assignment);
    case Kind::Xor:
      return lhs().evaluate(assignment) != rhs().evaluate(assignment);
  }
  return false;
}

namespace {

void collect_variables(const BoolExpr& e, std::map<std::string, int>& counts) {
  switch (e.kind()) {
    case BoolExpr::Kind::Var:
      ++counts[e.name()];
      return;
    case BoolExpr::Kind::Const:
      return;
    case BoolExpr::Kind::Not:
      collect_variables(e.lhs(), counts);
      return;
    default:
      collect_variables(e.lhs(), counts);
      collect_variables(e.rhs(), counts);
  }
}

// Binding strength used by both the parser and the renderer.
int precedence(BoolExpr::Kind k) {
  switch (k) {
    case BoolExpr::Kind::Or:
      return 1;
    case BoolExpr::Kind::Xor:
      return 2;
    case BoolExpr::Kind::And:
      return 3;
    case BoolExpr::Kind::Not:
      return 4;
    default:
      return 5;
  }
}

const char* keyword(BoolExpr::Kind k) {
  switch (k) {
    case BoolExpr::Kind::And:
      return "and";
    case BoolExpr::Kind::Or:
      return "or";
    case BoolExpr::Kind::Xor:
      return "xor";
    default:
      return "not";
  }
}

void render(const BoolExpr& e, std::ostream& out) {
  switch (e.kind()) {
    case BoolExpr::Kind::Var:
      out << e.name();
      return;
    case BoolExpr::Kind::Const:
      out << (e.constant_value() ? "1" : "0");
      return;
    case BoolExpr::Kind::Not: {
      out << "not ";
      const bool wrap = precedence(e.lhs().kind()) < precedence(BoolExpr::Kind::Not);
      if (wrap) out << '(';
      render(e.lhs(), out);
      if (wrap) out << ')';
      return;
    }
    default: {
      const int p = precedence(e.kind());
      // Left-associative: the left child needs parentheses only if it binds
      // more loosely, the right child also when it binds equally.
      const bool wrap_l = precedence(e.lhs().kind()) < p;
      const bool wrap_r = precedence(e.rhs().kind()) <= p;
      if (wrap_l) out << '(';
      render(e.lhs(), out);
      if (wrap_l) out << ')';
      out << ' ' << keyword(e.kind()) << ' ';
      if (wrap_r) out << '(';
      render(e.rhs(), out);
      if (wrap_r) out << ')';
    }
  }
}

bool nodes_equal(const BoolExpr& a, const BoolExpr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case BoolExpr::Kind::Var:
      return a.name() == b.name();
    case BoolExpr::Kind::Const:
      return a.constant_value() == b.constant_value();
    case BoolExpr::Kind::Not:
      return nodes_equal(a.lhs(), b.lhs());
    default:
      return nodes_equal(a.lhs(), b.lhs()) && nodes_equal(a.rhs(), b.rhs());
  }
}

}  // namespace

std::set<std::string> BoolExpr::variables() const {
  std::map<std::string, int> counts;
  collect_variables(*this, counts);
  std::set<std::string> names;
  for (const auto& [n, c] : counts) names.insert(n);
  return names;
}

bool BoolExpr::has_repeated_variables() const {
  std::map<std::string, int> counts;
  collect_variables(*this, counts);
  for (const auto& [n, c] : counts) {
    if (c > 1) return true;
  }
  return false;
}

std::string BoolExpr::to_string() const {
  std::ostringstream os;
  render(*this, os);
  return os.str();
}

bool operator==(const BoolExpr& a, const BoolExpr& b) {
  return a.node_ == b.node_ || nodes_equal(a, b);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class ExprParser {
public:
  explicit ExprParser(const std::string& text) : text_(text) {}

  BoolExpr parse() {
    BoolExpr e = parse_or();
    skip_space();
    if (pos_ != text_.size()) fail({"and", "or", "xor", "end of input"});
    return e;
  }

private:
  BoolExpr parse_or() {
    BoolExpr e = parse_xor();
    while (accept_keyword("or")) e = BoolExpr::disj(e, parse_xor());
    return e;
  }

  BoolExpr parse_xor() {
    BoolExpr e = parse_and();
    while (accept_keyword("xor")) e = BoolExpr::exclusive(e, parse_and());
    return e;
  }

  BoolExpr parse_and() {
    BoolExpr e = parse_unary();
    while (accept_keyword("and")) e = BoolExpr::conj(e, parse_unary());
    return e;
  }

  BoolExpr parse_unary() {
    if (accept_keyword("not")) return BoolExpr::negate(parse_unary());
    return parse_primary();
  }

  BoolExpr parse_primary() {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      BoolExpr e = parse_or();
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail({")", "and", "or", "xor"});
      ++pos_;
      return e;
    }
    const std::size_t start = pos_;
    const std::string word = read_word();
    if (word.empty()) fail({"identifier", "0", "1", "not", "("});
    if (word == "0" || word == "false") return BoolExpr::constant(false);
    if (word == "1" || word == "true") return BoolExpr::constant(true);
    if (is_keyword(word) || std::isdigit(static_cast<unsigned char>(word.front()))) {
      pos_ = start;
      fail({"identifier", "0", "1", "not", "("});
    }
    return BoolExpr::var(word);
  }

  static bool is_keyword(const std::string& w) {
    return w == "and" || w == "or" || w == "xor" || w == "not";
  }

  static bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string read_word() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_word_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  bool accept_keyword(const char* kw) {
    skip_space();
    const std::size_t save = pos_;
    if (read_word() == kw) return true;
    pos_ = save;
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    skip_space();
    std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'" : "end of input";
    std::string msg = "syntax error at offset " + std::to_string(pos_) + ": found " + found +
                      ", expected one of {";
    for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
    msg += "}";
    throw ParseError(msg, pos_, std::move(expected));
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

BoolExpr parse_expr(const std::string& text) { return ExprParser(text).parse(); }

BoolExpr desugar_xor(const BoolExpr& e) {
  switch (e.kind()) {
    case BoolExpr::Kind::Var:
    case BoolExpr::Kind::Const:
      return e;
    case BoolExpr::Kind::Not:
      return BoolExpr::negate(desugar_xor(e.lhs()));
    case BoolExpr::Kind::And:
      return BoolExpr::conj(desugar_xor(e.lhs()), desugar_xor(e.rhs()));
    case BoolExpr::Kind::Or:
      return BoolExpr::disj(desugar_xor(e.lhs()), desugar_xor(e.rhs()));
    case BoolExpr::Kind::Xor: {
      BoolExpr l = desugar_xor(e.lhs());
      BoolExpr r = desugar_xor(e.rhs());
      return BoolExpr::conj(BoolExpr::disj(l, r), BoolExpr::negate(BoolExpr::conj(l, r)));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Sample spaces

SampleSpace::SampleSpace(std::vector<std::string> variables, std::vector<Row> rows)
    : variables_(std::move(variables)), rows_(std::move(rows)) {
  if (rows_.empty()) throw ShapeError("sample space needs at least one row");
  double total = 0.0;
  for (const auto& r : rows_) {
    if (r.bits.size() != variables_.size()) {
      throw ShapeError("sample space row has " + std::to_string(r.bits.size()) + " bits for " +
                       std::to_string(variables_.size()) + " variables");
    }
    if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
      throw DomainError("sample space weights must be positive and finite");
    }
    total += r.weight;
  }
  for (auto& r : rows_) r.weight /= total;
}

SampleSpace SampleSpace::uniform(std::vector<std::string> variables) {
  const std::size_t n = variables.size();
  if (n > 20) throw DomainError("truth tables are limited to 20 variables");
  std::vector<Row> rows;
  const std::size_t count = std::size_t{1} << n;
  rows.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Row r{std::vector<bool>(n), 1.0};
    // First variable is the most significant bit, matching the usual
    // truth-table layout (00, 01, 10, 11).
    for (std::size_t i = 0; i < n; ++i) r.bits[i] = (mask >> (n - 1 - i)) & 1U;
    rows.push_back(std::move(r));
  }
  return SampleSpace(std::move(variables), std::move(rows));
}

SampleSpace SampleSpace::from_samples(std::vector<std::string> variables,
                                      const std::vector<std::vector<bool>>& samples) {
  std::vector<Row> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back(Row{s, 1.0});
  return SampleSpace(std::move(variables), std::move(rows));
}

namespace {

bool as_bit(double v, const std::string& column, std::size_t row) {
  if (v == 0.0) return false;
  if (v == 1.0) return true;
  throw DomainError("non-Boolean value " + std::to_string(v) + " in column '" + column +
                    "' at row " + std::to_string(row));
}

}  // namespace

SampleSpace SampleSpace::from_dataset(const Dataset& data) {
  std::vector<std::string> names = data.input_names();
  names.insert(names.end(), data.target_names().begin(), data.target_names().end());
  std::vector<std::vector<bool>> samples;
  samples.reserve(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    const Sample& s = data.samples()[r];
    std::vector<bool> bits;
    for (std::size_t i = 0; i < s.inputs.size(); ++i) bits.push_back(as_bit(s.inputs[i], names[i], r));
    for (std::size_t j = 0; j < s.targets.size(); ++j)
      bits.push_back(as_bit(s.targets[j], names[s.inputs.size() + j], r));
    samples.push_back(std::move(bits));
  }
  return from_samples(std::move(names), samples);
}

UnitValue truth_table_prob(const BoolExpr& expr, const SampleSpace& space) {
  for (const auto& v : expr.variables()) {
    bool bound = false;
    for (const auto& name : space.variables()) bound = bound || name == v;
    if (!bound) throw UnboundVariableError(v);
  }
  double total = 0.0;
  std::map<std::string, bool> assignment;
  for (const auto& row : space.rows()) {
    for (std::size_t i = 0; i < space.variables().size(); ++i) {
      assignment[space.variables()[i]] = row.bits[i];
    }
    if (expr.evaluate(assignment)) total += row.weight;
  }
  return UnitValue(std::min(total, 1.0));
}

std::map<std::string, UnitValue> empirical_frequencies(const Dataset& data) {
  std::vector<std::string> names = data.input_names();
  names.insert(names.end(), data.target_names().begin(), data.target_names().end());
  std::vector<std::size_t> ones(names.size(), 0);
  for (std::size_t r = 0; r < data.size(); ++r) {
    const Sample& s = data.samples()[r];
    std::size_t c = 0;
    for (double v : s.inputs) ones[c] += as_bit(v, names[c], r), ++c;
    for (double v : s.targets) ones[c] += as_bit(v, names[c], r), ++c;
  }
  std::map<std::string, UnitValue> freq;
  for (std::size_t c = 0; c < names.size(); ++c) {
    freq.emplace(names[c], UnitValue(static_cast<double>(ones[c]) / static_cast<double>(data.size())));
  }
  return freq;
}

bool ConsistencyVerdict::consistent() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

ConsistencyVerdict check_consistency(UnitValue px, UnitValue py, UnitValue pand, UnitValue por) {
  constexpr double tol = kConsistencyTolerance;
  const double lo_or = std::max(px.value(), py.value());
  const double hi_and = std::min(px.value(), py.value());
  ConsistencyVerdict v;
  v.checks.push_back({"and_lower", pand >= -tol, "0 <= Pr[and] = " + fmt(pand)});
  v.checks.push_back({"and_upper", pand <= hi_and + tol,
                      "Pr[and] = " + fmt(pand) + " <= min(px, py) = " + fmt(hi_and)});
  v.checks.push_back({"or_lower", por >= lo_or - tol,
                      "max(px, py) = " + fmt(lo_or) + " <= Pr[or] = " + fmt(por)});
  v.checks.push_back({"or_upper", por <= 1.0 + tol, "Pr[or] = " + fmt(por) + " <= 1"});
  const double gap = pand + por - px - py;
  v.checks.push_back({"additivity", std::abs(gap) <= tol,
                      "Pr[and] + Pr[or] - px - py = " + fmt(gap)});
  return v;
}

namespace {

double copula_eval(const BoolExpr& e, const std::map<std::string, UnitValue>& assignment,
                   CopulaParam s) {
  switch (e.kind()) {
    case BoolExpr::Kind::Var: {
      auto it = assignment.find(e.name());
      if (it == assignment.end()) throw UnboundVariableError(e.name());
      return it->second;
    }
    case BoolExpr::Kind::Const:
      return e.constant_value() ? 1.0 : 0.0;
    case BoolExpr::Kind::Not:
      return 1.0 - copula_eval(e.lhs(), assignment, s);
    default:
      break;
  }
  const UnitValue x(copula_eval(e.lhs(), assignment, s));
  const UnitValue y(copula_eval(e.rhs(), assignment, s));
  switch (e.kind()) {
    case BoolExpr::Kind::And:
      return frank_and(s, x, y);
    case BoolExpr::Kind::Or:
      return frank_or(s, x, y);
    default:
      return std::clamp(x + y - 2.0 * frank_and(s, x, y), 0.0, 1.0);
  }
}

}  // namespace

CopulaProbResult copula_prob(const BoolExpr& expr, const std::map<std::string, UnitValue>& assignment,
                             CopulaParam s) {
  return {UnitValue(copula_eval(expr, assignment, s)), expr.has_repeated_variables()};
}

}  // namespace xorcop
