#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "xorcop/copula.hpp"

namespace xorcop {

class Dataset;

/// Immutable Boolean expression tree over named statements. Copies share
/// structure.
class BoolExpr {
public:
  enum class Kind { Var, Const, Not, And, Or, Xor };

  static BoolExpr var(std::string name);
  static BoolExpr constant(bool value);
  static BoolExpr negate(BoolExpr child);
  static BoolExpr conj(BoolExpr lhs, BoolExpr rhs);
  static BoolExpr disj(BoolExpr lhs, BoolExpr rhs);
  static BoolExpr exclusive(BoolExpr lhs, BoolExpr rhs);

  Kind kind() const noexcept;
  /// Variable name; empty unless kind() == Var.
  const std::string& name() const noexcept;
  /// Constant value; meaningful only for Const.
  bool constant_value() const noexcept;
  /// Operand of Not, left operand of binary nodes.
  const BoolExpr& lhs() const;
  /// Right operand of binary nodes.
  const BoolExpr& rhs() const;

  bool is_binary() const noexcept;

  /// Evaluate against a truth assignment; throws UnboundVariableError.
  bool evaluate(const std::map<std::string, bool>& assignment) const;

  /// Distinct variable names, sorted.
  std::set<std::string> variables() const;

  /// True when some variable occurs more than once in the tree.
  bool has_repeated_variables() const;

  /// Infix rendering using the parser's precedence; re-parses to an equal tree.
  std::string to_string() const;

  friend bool operator==(const BoolExpr& a, const BoolExpr& b);

private:
  struct Node;
  explicit BoolExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses identifiers, `0`/`1`/`true`/`false`, `not e`, `e and e`,
/// `e xor e`, `e or e` and parentheses. Precedence, tightest first:
/// not, and, xor, or. Binary operators are left-associative.
/// Throws ParseError with the byte offset and the expected-token set.
BoolExpr parse_expr(const std::string& text);

/// Rewrites every `a xor b` as `(a or b) and not (a and b)`.
BoolExpr desugar_xor(const BoolExpr& expr);

/// Discrete sample space over named statements: weighted truth assignments.
/// Weights are normalised to sum to 1 on construction.
class SampleSpace {
public:
  struct Row {
    std::vector<bool> bits;
    double weight;
  };

  SampleSpace(std::vector<std::string> variables, std::vector<Row> rows);

  /// All 2^n assignments with equal weight.
  static SampleSpace uniform(std::vector<std::string> variables);

  /// One row per observed sample, weight 1/n each; duplicates are kept.
  static SampleSpace from_samples(std::vector<std::string> variables,
                                  const std::vector<std::vector<bool>>& samples);

  /// Builds the space from a Boolean dataset (inputs and every target column).
  /// Throws DomainError on a non-Boolean entry.
  static SampleSpace from_dataset(const Dataset& data);

  const std::vector<std::string>& variables() const noexcept { return variables_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }

private:
  std::vector<std::string> variables_;
  std::vector<Row> rows_;
};

/// Sum of the weights of the rows on which `expr` is true.
UnitValue truth_table_prob(const BoolExpr& expr, const SampleSpace& space);

/// Fraction of ones per column (inputs then targets), keyed by column name.
/// Throws DomainError if any entry is not exactly 0 or 1.
std::map<std::string, UnitValue> empirical_frequencies(const Dataset& data);

inline constexpr double kConsistencyTolerance = 1e-9;

struct ConsistencyCheck {
  std::string name;
  bool passed;
  std::string detail;
};

struct ConsistencyVerdict {
  std::vector<ConsistencyCheck> checks;
  bool consistent() const;
};

/// Checks the and/or bounds and axiom 3 (pand + por = px + py) for one pair
/// of statements.
ConsistencyVerdict check_consistency(UnitValue px, UnitValue py, UnitValue pand, UnitValue por);

struct CopulaProbResult {
  UnitValue value;
  /// Set when a variable occurs more than once: compositional evaluation may
  /// then disagree with the truth table.
  bool repeated_variables = false;
};

/// Compositional probability: Not -> 1 - v, And -> A_s, Or -> R_s,
/// Xor -> x + y - 2 A_s. Throws UnboundVariableError.
CopulaProbResult copula_prob(const BoolExpr& expr, const std::map<std::string, UnitValue>& assignment,
                             CopulaParam s);

}  // namespace xorcop
