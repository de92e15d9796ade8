#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tamedyn/berkovich.hpp"

namespace tamedyn {

// Dense univariate polynomial, coefficient i multiplies z^i.
class Poly {
 public:
  Poly() = default;
  Poly(FieldRef field, std::vector<Scalar> coeffs);
  static Poly constant(const Scalar& c);
  static Poly monomial_z(const FieldRef& field, int power);

  const FieldRef& field() const { return field_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Scalar>& coeffs() const { return c_; }
  Scalar coeff(int i) const;

  Scalar eval(const Scalar& x) const;
  Poly derivative() const;
  // f_k(a) for k = 0..deg, i.e. f(a + u) = sum f_k(a) u^k
  std::vector<Scalar> taylor(const Scalar& a) const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b);
  Poly scaled(const Scalar& s) const;

  std::string str() const;

 private:
  FieldRef field_;
  std::vector<Scalar> c_;
  void trim();
};

struct CriticalMark {
  Scalar point;
  int mult = 2;
};

struct PointImage {
  BerkPoint point;
  int degree = 1;
};

// q -> q' on the ray ]c, inf[: the image of x_{c,q} is x_{f(c), q'}.
class SegmentMap {
 public:
  struct Piece {
    std::optional<Rational> lo;  // nullopt: unbounded below
    Val hi;                      // piece covers lo < q <= hi
    int slope = 1;
    Rational offset;             // q' = offset + slope * q
  };

  SegmentMap() = default;
  SegmentMap(Scalar center, const std::vector<Scalar>& taylor);

  const Scalar& center() const { return center_; }
  const Scalar& image_center() const { return image_center_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  Val eval(const Val& q) const;
  int slope_at(const Val& q) const;
  Val inverse(const Val& image_q) const;

 private:
  Scalar center_;
  Scalar image_center_;
  std::vector<Piece> pieces_;
  const Piece& piece_for(const Val& q) const;
};

struct TamenessResult {
  bool tame = true;
  int degree = 0;  // offending local degree when wild
  std::optional<BerkPoint> witness;
};

class MarkedPolynomial {
 public:
  static MarkedPolynomial from_critical_data(const FieldRef& field, std::vector<CriticalMark> marks, const Scalar& b,
                                             std::optional<int> degree = std::nullopt);
  // coeffs a_0..a_d; the supplied marks are verified against f'
  static MarkedPolynomial from_coefficients(const FieldRef& field, std::vector<Scalar> coeffs,
                                            std::vector<CriticalMark> marks);

  const FieldRef& field() const { return poly_.field(); }
  int degree() const { return poly_.degree(); }
  const Poly& poly() const { return poly_; }
  const std::vector<CriticalMark>& marks() const { return marks_; }
  const Rational& base_exp() const { return base_exp_; }
  BerkPoint base_point() const;
  Scalar b() const { return poly_.coeff(0); }

  // same polynomial and marks over another backend of the same kind (no re-verification)
  MarkedPolynomial with_field(const FieldRef& target) const;

  Scalar eval(const Scalar& x) const { return poly_.eval(x); }
  std::vector<Scalar> taylor(const Scalar& a) const;
  const TamenessResult& tameness() const { return *tame_; }
  void require_tame() const;
  bool is_simple() const;

  std::string str() const { return poly_.str(); }

 private:
  Poly poly_;
  std::vector<CriticalMark> marks_;
  Rational base_exp_;
  std::shared_ptr<TamenessResult> tame_;
  struct TaylorCache {
    std::mutex lock;
    std::map<std::string, std::vector<Scalar>> entries;
  };
  std::shared_ptr<TaylorCache> cache_;

  void finish();
};

PointImage image_point(const MarkedPolynomial& f, const BerkPoint& x);
PointImage image_point(const Poly& f, const BerkPoint& x);
PointImage image_from_taylor(const std::vector<Scalar>& taylor, const BerkPoint& x);
int local_degree_rh(const MarkedPolynomial& f, const BerkPoint& x);
BerkPoint base_point(const MarkedPolynomial& f);
TamenessResult tameness_check(const MarkedPolynomial& f);
SegmentMap segment_dynamics(const MarkedPolynomial& f, const Scalar& c);

}  // namespace tamedyn
