#include "xorcop/copula.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "xorcop/error.hpp"

namespace xorcop {

UnitValue::UnitValue(double v) {
  if (!(v >= -kUnitSlack && v <= 1.0 + kUnitSlack)) {
    throw DomainError("value " + std::to_string(v) + " is outside [0, 1]");
  }
  v_ = std::clamp(v, 0.0, 1.0);
}

CopulaParam CopulaParam::infinity() {
  return CopulaParam(Kind::Infinity, std::numeric_limits<double>::infinity());
}

CopulaParam CopulaParam::from_value(double s) {
  if (std::isnan(s) || s < 0.0) {
    throw DomainError("copula parameter must be in [0, inf], got " + std::to_string(s));
  }
  if (s <= kZeroCutoff) return zero();
  if (s >= kInfinityCutoff) return infinity();
  if (std::abs(s - 1.0) < kOneBand) return one();
  return CopulaParam(Kind::Finite, s);
}

CopulaParam CopulaParam::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf" || text == "INF") return infinity();
  double s = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, s);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw DomainError("cannot parse copula parameter '" + text + "' (expected 0, 1, inf or a number)");
  }
  return from_value(s);
}

std::string CopulaParam::to_string() const {
  switch (kind_) {
    case Kind::Zero:
      return "0";
    case Kind::One:
      return "1";
    case Kind::Infinity:
      return "inf";
    case Kind::Finite:
      break;
  }
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s_);
  return std::string(buf, ptr);
}

namespace {

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

// log_s(1 + (s^x - 1)(s^y - 1) / (s - 1)) written with expm1/log1p so that
// it stays accurate for s on either side of 1. For s < 1 both the log of the
// argument and log(s) are negative.
double frank_closed_form(double s, double x, double y) {
  const double ls = std::log(s);
  const double ratio = std::expm1(x * ls) * std::expm1(y * ls) / std::expm1(ls);
  return std::log1p(ratio) / ls;
}

}  // namespace

UnitValue frank_and(CopulaParam s, UnitValue x, UnitValue y) {
  switch (s.kind()) {
    case CopulaParam::Kind::Zero:
      return UnitValue(std::min(x.value(), y.value()));
    case CopulaParam::Kind::One:
      return UnitValue(x * y);
    case CopulaParam::Kind::Infinity:
      return UnitValue(std::max(x + y - 1.0, 0.0));
    case CopulaParam::Kind::Finite:
      break;
  }
  const auto [lo, hi] = frechet_bounds(x, y);
  return UnitValue(std::clamp(frank_closed_form(s.value(), x, y), lo, hi));
}

UnitValue frank_or(CopulaParam s, UnitValue x, UnitValue y) {
  return UnitValue(clamp_unit(x + y - frank_and(s, x, y)));
}

UnitValue xor_f(CopulaParam s, UnitValue x, UnitValue y) {
  switch (s.kind()) {
    case CopulaParam::Kind::Zero:
      return UnitValue(std::abs(x - y));
    case CopulaParam::Kind::One:
      return UnitValue(clamp_unit(x + y - 2.0 * x * y));
    case CopulaParam::Kind::Infinity:
      return UnitValue(std::min(x + y, 1.0) - std::max(x + y - 1.0, 0.0));
    case CopulaParam::Kind::Finite:
      break;
  }
  return UnitValue(clamp_unit(x + y - 2.0 * frank_and(s, x, y)));
}

FrechetBounds frechet_bounds(UnitValue x, UnitValue y) {
  return {std::max(x + y - 1.0, 0.0), std::min(x.value(), y.value())};
}

CopulaParam solve_s(UnitValue x, UnitValue y, UnitValue p) {
  const auto [lo, hi] = frechet_bounds(x, y);
  if (p < lo - kSolveTolerance || p > hi + kSolveTolerance) {
    throw InfeasibleError("A_s(" + std::to_string(x.value()) + ", " + std::to_string(y.value()) +
                              ") = " + std::to_string(p.value()) + " is infeasible: must lie in [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]",
                          lo, hi);
  }
  if (hi - lo <= kSolveTolerance) return CopulaParam::one();
  if (std::abs(p - hi) <= kSolveTolerance) return CopulaParam::zero();
  if (std::abs(p - lo) <= kSolveTolerance) return CopulaParam::infinity();
  if (std::abs(p - x * y) <= kSolveTolerance) return CopulaParam::one();

  // and(t) with s = t / (1 - t) is decreasing in t.
  const auto and_at = [&](double t) {
    return frank_and(CopulaParam::from_value(t / (1.0 - t)), x, y).value();
  };
  constexpr double t_min = CopulaParam::kZeroCutoff / (1.0 + CopulaParam::kZeroCutoff);
  constexpr double t_max = CopulaParam::kInfinityCutoff / (1.0 + CopulaParam::kInfinityCutoff);
  // Stay strictly inside the cutoffs so the endpoints use the closed form.
  double t_lo = std::nextafter(t_min, 1.0);
  double t_hi = std::nextafter(t_max, 0.0);
  if (p >= and_at(t_lo)) return CopulaParam::zero();
  if (p <= and_at(t_hi)) return CopulaParam::infinity();

  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (t_lo + t_hi);
    const double value = and_at(mid);
    if (std::abs(value - p) < 1e-13 || mid == t_lo || mid == t_hi) {
      t_lo = t_hi = mid;
      break;
    }
    if (value > p) {
      t_lo = mid;
    } else {
      t_hi = mid;
    }
  }
  const double t = 0.5 * (t_lo + t_hi);
  return CopulaParam::from_value(t / (1.0 - t));
}

double heaviside(double t) noexcept { return t > 0.0 ? 1.0 : 0.0; }

}  // namespace xorcop
