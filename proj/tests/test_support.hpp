#pragma once

#include "tamedyn/boettcher.hpp"
#include "tamedyn/escape.hpp"
#include "tamedyn/polynomial.hpp"

namespace tt {

using namespace tamedyn;

inline FieldRef Q(long p) { return Field::padic(p); }
inline FieldRef T(const char* prec = "40", long ram = 1) { return Field::series(parse_rational(prec), ram); }
inline Scalar S(const FieldRef& F, const char* q) { return Scalar(F, parse_rational(q)); }
inline Rational R(const char* q) { return parse_rational(q); }
inline Val V(const char* q) { return Val::parse(q); }
// t^e in a series backend
inline Scalar tpow(const FieldRef& F, const char* e, const char* c = "1") { return Scalar::monomial(F, R(e), R(c)); }
inline BerkPoint P(const Scalar& c, const char* q) { return BerkPoint(c, V(q)); }

// z^2 + b with the single critical mark 0
inline MarkedPolynomial quad(const FieldRef& F, const Scalar& b) {
  return MarkedPolynomial::from_critical_data(F, {{Scalar::zero(F), 2}}, b);
}

}  // namespace tt
