#include "collapsar/errors.hpp"

#include <fmt/format.h>

namespace collapsar {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::string out = "invalid parameters:";
  for (const auto& s : v) {
    out += " [";
    out += s;
    out += "]";
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

DegenerateDenominator::DegenerateDenominator(double z, double f)
    : Error(fmt::format("degenerate denominator D(f) at z={:.17g}, f={:.17g}", z, f)),
      z_(z),
      f_(f) {}

StiffnessFailure::StiffnessFailure(double x, std::vector<double> state)
    : Error(fmt::format("step size underflow at x={:.17g}", x)), x_(x), state_(std::move(state)) {}

BlowupReached::BlowupReached(double t, double blowup_time)
    : Error(fmt::format("t={:.17g} is at or beyond the blowup time T={:.17g}", t, blowup_time)),
      t_(t),
      blowup_time_(blowup_time) {}

}  // namespace collapsar
