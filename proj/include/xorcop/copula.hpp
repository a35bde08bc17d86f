#pragma once

#include <string>

namespace xorcop {

/// A probability in [0, 1]. Values within kUnitSlack outside the interval
/// are clamped; anything further out is rejected with DomainError.
class UnitValue {
public:
  static constexpr double kUnitSlack = 1e-12;

  constexpr UnitValue() = default;
  explicit UnitValue(double v);

  constexpr double value() const noexcept { return v_; }
  constexpr operator double() const noexcept { return v_; }

private:
  double v_ = 0.0;
};

/// Frank's parameter s, extended with the three limit members of the family.
///
/// Finite values are normalised on construction: |s - 1| < kOneBand becomes
/// One, s <= kZeroCutoff becomes Zero and s >= kInfinityCutoff becomes
/// Infinity. Past those cutoffs the closed form is numerically dominated by
/// the limit, and near 1 it divides by log(s) ~ 0.
class CopulaParam {
public:
  enum class Kind { Zero, One, Infinity, Finite };

  static constexpr double kOneBand = 1e-6;
  static constexpr double kZeroCutoff = 1e-8;
  static constexpr double kInfinityCutoff = 1e8;

  static constexpr CopulaParam zero() { return CopulaParam(Kind::Zero, 0.0); }
  static constexpr CopulaParam one() { return CopulaParam(Kind::One, 1.0); }
  static CopulaParam infinity();

  /// Any s in [0, inf]; throws DomainError for negative or NaN input.
  static CopulaParam from_value(double s);

  /// Accepts "0", "1", "inf"/"infinity" or a decimal; throws DomainError.
  static CopulaParam parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  /// Numeric s; 0, 1 or +inf for the limit members.
  double value() const noexcept { return s_; }

  /// "0", "1", "inf" or the shortest round-trip decimal of s.
  std::string to_string() const;

  friend bool operator==(const CopulaParam&, const CopulaParam&) = default;

private:
  constexpr CopulaParam(Kind k, double s) : kind_(k), s_(s) {}

  Kind kind_ = Kind::One;
  double s_ = 1.0;
};

/// A_s(x, y): Frank's associative copula, the probability of "x and y".
/// min(x, y) for Zero, x*y for One, max(x + y - 1, 0) for Infinity.
UnitValue frank_and(CopulaParam s, UnitValue x, UnitValue y);

/// R_s(x, y) = x + y - A_s(x, y), the probability of "x or y".
UnitValue frank_or(CopulaParam s, UnitValue x, UnitValue y);

/// F_s(x, y) = R_s - A_s = x + y - 2 A_s(x, y), the probability of "x xor y".
/// F_0 = |x - y|, F_1 = x + y - 2xy, F_inf = min(x + y, 1) - max(x + y - 1, 0).
UnitValue xor_f(CopulaParam s, UnitValue x, UnitValue y);

/// Lower and upper Frechet bounds on A(x, y).
struct FrechetBounds {
  double lower;  // max(x + y - 1, 0)
  double upper;  // min(x, y)
};
FrechetBounds frechet_bounds(UnitValue x, UnitValue y);

/// Tolerance used by solve_s to snap onto the limit members.
inline constexpr double kSolveTolerance = 1e-9;

/// Finds s with A_s(x, y) = p.
///
/// A_s(x, y) is decreasing in s, so the search bisects on t = s / (1 + s)
/// over the finite range [kZeroCutoff, kInfinityCutoff]. p equal (within
/// kSolveTolerance) to the upper bound gives Zero, to the lower bound gives
/// Infinity, to x*y gives One. When the bounds coincide (x or y is 0 or 1)
/// every s fits and One is returned. Throws InfeasibleError if p lies
/// outside the Frechet bounds.
///
/// For p strictly between a Frechet bound and the value the closed form
/// reaches at the corresponding cutoff, the nearest limit member is returned
/// and the residual is that gap (up to ~0.04 at the centre of the square).
CopulaParam solve_s(UnitValue x, UnitValue y, UnitValue p);

/// Heaviside step: 1 for t > 0, 0 for t <= 0.
double heaviside(double t) noexcept;

}  // namespace xorcop
