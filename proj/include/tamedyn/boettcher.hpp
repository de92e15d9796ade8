#pragma once

#include <vector>

#include "tamedyn/escape.hpp"

namespace tamedyn {

struct PhiResult {
  Scalar value;
  int factors = 0;  // number of rooted factors used
};

// phi_f(z) to absolute precision: valuation(result - phi_f(z)) >= precision
PhiResult phi_eval_detail(const MarkedPolynomial& f, const Scalar& z, const Rational& precision);
Scalar phi_eval(const MarkedPolynomial& f, const Scalar& z, const Rational& precision);

// valuation(phi(f(z)) - phi(z)^d), each phi computed precisely enough for the target
Val functional_equation_residual(const MarkedPolynomial& f, const Scalar& z, const Rational& target);

struct RhoBound {
  Val rho = Val::infinity();
  std::vector<Val> per_mark;  // infinity for non-escaping marks
  std::vector<int> first_exit;
};

RhoBound rho_closeness(const MarkedPolynomial& f, const MarkedPolynomial& g, const Rational& precision,
                       int budget = kDefaultBudget);

}  // namespace tamedyn
