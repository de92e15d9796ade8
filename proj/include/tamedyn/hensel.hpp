#pragma once

#include <optional>
#include <vector>

#include "tamedyn/polynomial.hpp"

namespace tamedyn {

// Exponents in valuation form; r and rho are negative (disks slightly larger than the unit disk).
struct LiftParams {
  Val s;
  Val mu;
  Rational r;
  Rational rho;
  int max_iter = 16;
};

struct LiftStep {
  Scalar z;
  Val w_val;         // valuation of the Newton correction w_n
  Val residual_val;  // valuation of f(z_n) - g(x)
};

struct LiftResult {
  Scalar value;
  std::vector<LiftStep> trace;  // z_0 .. z_N with their corrections
  Val certified_valuation;      // valuation(f(value) - g(x)) is at least this
  Val displacement;             // valuation(value - x)
  LiftParams params;
};

// s = Gauss valuation of f - g, mu = s/2, r = -s/(4d), rho = -s/(3d)
LiftParams default_lift_params(const Poly& f, const Poly& g, int max_iter = 16);
// checks mu + d*r > 0, s + d*r > mu, r > rho, 0 < mu < s
void validate_lift_params(const LiftParams& params, int degree);

LiftResult lift(const Poly& f, const Poly& g, const Scalar& x, const Val& target,
                const std::optional<LiftParams>& params = std::nullopt);
LiftResult lift(const MarkedPolynomial& f, const MarkedPolynomial& g, const Scalar& x, const Val& target,
                const std::optional<LiftParams>& params = std::nullopt);

}  // namespace tamedyn
