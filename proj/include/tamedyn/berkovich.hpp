#pragma once

#include <optional>
#include <string>

#include "tamedyn/valued_field.hpp"

namespace tamedyn {

enum class PointType { I, II, III };
enum class Order { Less, Greater, Equal, Incomparable };

const char* point_type_name(PointType t);
const char* order_name(Order o);

// x_{center, r} with r = base^(-radius_exp); radius_exp = inf is the classical point.
struct BerkPoint {
  Scalar center;
  Val radius_exp;

  BerkPoint() = default;
  BerkPoint(Scalar c, Val q) : center(std::move(c)), radius_exp(std::move(q)) {}

  const FieldRef& field() const { return center.field(); }
  PointType type() const;
  bool is_classical() const { return radius_exp.is_inf(); }
  // log-size exponent of |x| = max(|center|, radius)
  Val abs_exp() const;
  // representative with canonical center (center reduced below the radius exponent)
  BerkPoint canonical() const;
  std::string str() const;
};

bool operator==(const BerkPoint& x, const BerkPoint& y);
inline bool operator!=(const BerkPoint& x, const BerkPoint& y) { return !(x == y); }
// x ⪯ y
bool precedes_eq(const BerkPoint& x, const BerkPoint& y);
Order compare(const BerkPoint& x, const BerkPoint& y);
BerkPoint join(const BerkPoint& x, const BerkPoint& y);
// distance in backend log units; throws TypeIPoint for classical arguments
Rational hyp_dist(const BerkPoint& x, const BerkPoint& y);
// deterministic total order on points (radius exponent, then canonical center text)
bool point_less(const BerkPoint& x, const BerkPoint& y);

BerkPoint gauss_point(const FieldRef& field);

struct Direction {
  BerkPoint at;
  bool toward_infinity = true;
  std::optional<Scalar> witness;
};

// direction at x containing target (nullopt = infinity)
Direction direction_of(const BerkPoint& x, const std::optional<Scalar>& target);
bool same_direction(const Direction& a, const Direction& b);

}  // namespace tamedyn
