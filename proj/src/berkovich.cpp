#include "tamedyn/berkovich.hpp"

namespace tamedyn {

const char* point_type_name(PointType t) {
  switch (t) {
    case PointType::I: return "I";
    case PointType::II: return "II";
    case PointType::III: return "III";
  }
  return "?";
}

const char* order_name(Order o) {
  switch (o) {
    case Order::Less: return "Less";
    case Order::Greater: return "Greater";
    case Order::Equal: return "Equal";
    case Order::Incomparable: return "Incomparable";
  }
  return "?";
}

PointType BerkPoint::type() const {
  if (radius_exp.is_inf()) return PointType::I;
  return field()->in_value_group(radius_exp.value()) ? PointType::II : PointType::III;
}

Val BerkPoint::abs_exp() const { return vmin(center.valuation(), radius_exp); }

BerkPoint BerkPoint::canonical() const {
  if (radius_exp.is_inf()) return *this;
  return BerkPoint(center.reduced_below(radius_exp.value()), radius_exp);
}

std::string BerkPoint::str() const { return "x(" + canonical().center.str() + ", " + radius_exp.str() + ")"; }

bool operator==(const BerkPoint& x, const BerkPoint& y) {
  if (x.radius_exp != y.radius_exp) return false;
  return (x.center - y.center).valuation() >= x.radius_exp;
}

bool precedes_eq(const BerkPoint& x, const BerkPoint& y) {
  if (x.radius_exp < y.radius_exp) return false;
  return (x.center - y.center).valuation() >= y.radius_exp;
}

Order compare(const BerkPoint& x, const BerkPoint& y) {
  bool xy = precedes_eq(x, y);
  bool yx = precedes_eq(y, x);
  if (xy && yx) return Order::Equal;
  if (xy) return Order::Less;
  if (yx) return Order::Greater;
  return Order::Incomparable;
}

BerkPoint join(const BerkPoint& x, const BerkPoint& y) {
  Val q = vmin(vmin(x.radius_exp, y.radius_exp), (x.center - y.center).valuation());
  return BerkPoint(x.center, q);
}

Rational hyp_dist(const BerkPoint& x, const BerkPoint& y) {
  if (x.radius_exp.is_inf() || y.radius_exp.is_inf())
    throw Error(ErrorCode::TypeIPoint, "hyperbolic distance needs non-classical points");
  BerkPoint j = join(x, y);
  const Rational& qj = j.radius_exp.value();
  return Rational((x.radius_exp.value() - qj) + (y.radius_exp.value() - qj));
}

bool point_less(const BerkPoint& x, const BerkPoint& y) {
  if (x.radius_exp != y.radius_exp) return x.radius_exp < y.radius_exp;
  return x.canonical().center.str() < y.canonical().center.str();
}

BerkPoint gauss_point(const FieldRef& field) { return BerkPoint(Scalar::zero(field), Val(0)); }

Direction direction_of(const BerkPoint& x, const std::optional<Scalar>& target) {
  Direction d;
  d.at = x;
  if (!target) return d;
  if ((*target - x.center).valuation() < x.radius_exp) return d;
  d.toward_infinity = false;
  d.witness = *target;
  return d;
}

bool same_direction(const Direction& a, const Direction& b) {
  if (a.at != b.at) return false;
  if (a.toward_infinity || b.toward_infinity) return a.toward_infinity == b.toward_infinity;
  return (*a.witness - *b.witness).valuation() > a.at.radius_exp;
}

}  // namespace tamedyn
