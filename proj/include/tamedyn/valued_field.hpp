#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tamedyn/error.hpp"

namespace tamedyn {

using Rational = mpq_class;
using Integer = mpz_class;

Rational parse_rational(const std::string& text);
std::string rat_str(const Rational& q);
Integer floor_rat(const Rational& q);
Integer ceil_rat(const Rational& q);
// exponent of p in a nonzero integer
long int_valuation(const Integer& n, long p);

// Additive log-scale magnitude: a finite rational or +infinity.
class Val {
 public:
  Val() = default;
  Val(const Rational& q) : q_(q) {}  // NOLINT(google-explicit-constructor)
  Val(long q) : q_(q) {}             // NOLINT(google-explicit-constructor)
  static Val infinity() {
    Val v;
    v.inf_ = true;
    return v;
  }
  bool is_inf() const { return inf_; }
  bool is_finite() const { return !inf_; }
  const Rational& value() const;

  friend bool operator==(const Val& a, const Val& b) { return a.inf_ == b.inf_ && (a.inf_ || a.q_ == b.q_); }
  friend bool operator!=(const Val& a, const Val& b) { return !(a == b); }
  friend bool operator<(const Val& a, const Val& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.q_ < b.q_;
  }
  friend bool operator>(const Val& a, const Val& b) { return b < a; }
  friend bool operator<=(const Val& a, const Val& b) { return !(b < a); }
  friend bool operator>=(const Val& a, const Val& b) { return !(a < b); }
  friend Val operator+(const Val& a, const Val& b) {
    if (a.inf_ || b.inf_) return infinity();
    return Val(Rational(a.q_ + b.q_));
  }
  // infinity minus a finite value stays infinity
  friend Val operator-(const Val& a, const Rational& b) {
    if (a.inf_) return infinity();
    return Val(Rational(a.q_ - b));
  }
  // scaling by a positive rational
  Val scaled(const Rational& factor) const;

  std::string str() const;  // "a/b" or "inf"
  static Val parse(const std::string& text);

 private:
  bool inf_ = false;
  Rational q_ = 0;
};

Val vmin(const Val& a, const Val& b);
Val vmax(const Val& a, const Val& b);

class Field;
using FieldRef = std::shared_ptr<const Field>;

// Backend: rationals with a p-adic valuation, or truncated Puiseux series in t.
class Field {
 public:
  enum class Kind { PAdic, Series };

  static FieldRef padic(long p);
  static FieldRef series(const Rational& precision, long ramification);

  Kind kind() const { return kind_; }
  bool is_padic() const { return kind_ == Kind::PAdic; }
  long prime() const { return p_; }
  const Rational& precision() const { return precision_; }
  long ramification() const { return ram_; }
  // scaled exponent bound: series terms t^(k/ram) are kept iff k < cut
  long cut() const { return cut_; }
  // residue characteristic (0 for series)
  long residue_char() const { return kind_ == Kind::PAdic ? p_ : 0; }
  bool in_value_group(const Rational& q) const;

  bool same(const Field& other) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::PAdic;
  long p_ = 0;
  Rational precision_ = 0;
  long ram_ = 1;
  long cut_ = 0;
};

bool same_field(const FieldRef& a, const FieldRef& b);

class Scalar {
 public:
  using Term = std::pair<long, Rational>;  // (scaled exponent, coefficient)

  Scalar() = default;
  Scalar(FieldRef field, const Rational& value);
  static Scalar zero(const FieldRef& field) { return Scalar(field, Rational(0)); }
  static Scalar one(const FieldRef& field) { return Scalar(field, Rational(1)); }
  // c * t^e in the series backend, c * p^e in the p-adic backend
  static Scalar monomial(const FieldRef& field, const Rational& e, const Rational& c);
  static Scalar from_terms(const FieldRef& field, std::vector<std::pair<Rational, Rational>> terms);

  const FieldRef& field() const { return field_; }
  bool is_zero() const;
  Val valuation() const;
  // PAdic only
  const Rational& rational() const { return q_; }
  // Series only: sorted by exponent, nonzero coefficients
  const std::vector<Term>& terms() const { return terms_; }
  // leading coefficient: series lowest term coefficient; p-adic unit part reduced to 1..p-1
  Rational leading_coefficient() const;

  Scalar operator-() const;
  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);
  Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
  Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
  Scalar& operator*=(const Scalar& b) { return *this = *this * b; }
  Scalar pow(long n) const;
  Scalar scaled(const Rational& c) const;
  Scalar inverse() const;

  friend bool operator==(const Scalar& a, const Scalar& b);
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  // representative r with valuation(x - r) >= q; canonical for the class of x modulo that bound
  Scalar reduced_below(const Rational& q) const;
  // copy into another backend of the same kind (series: re-truncate)
  Scalar to_field(const FieldRef& target) const;

  std::string str() const;  // human-readable, deterministic

 private:
  FieldRef field_;
  Rational q_ = 0;
  std::vector<Term> terms_;

  void normalize_series();
  static void check(const Scalar& a, const Scalar& b);
};

// field operations that report PrecisionExhausted instead of truncating to zero
Scalar checked_mul(const Scalar& a, const Scalar& b);
Scalar checked_div(const Scalar& a, const Scalar& b);

// unique w with w^n = u and valuation(w - 1) > 0
Scalar nth_root_unit(const Scalar& u, const Integer& n, const Val& precision = Val(40));

// p-adic residue of a rational in Z_(p) modulo p^k, as an integer in [0, p^k)
Integer padic_residue(const Rational& x, long p, long k);

}  // namespace tamedyn
