#pragma once

#include <string>
#include <vector>

#include "tamedyn/polynomial.hpp"

namespace tamedyn {

// Orbit value known up to an absolute radius: the true iterate lies in D(value, accuracy).
struct OrbitPoint {
  Scalar value;
  Val accuracy = Val::infinity();
};

struct OrbitOptions {
  // p-adic iterates stay exact until numerator + denominator exceed this many bits
  long exact_bits = 1L << 15;
  bool allow_approximation = true;
  // relative p-adic digits kept once approximate
  long relative_digits = 256;
};

// One forward step of an orbit point with tracked accuracy.
OrbitPoint orbit_step(const MarkedPolynomial& f, const OrbitPoint& z, const OrbitOptions& opt = {});
// z_0 = c, ..., z_steps
std::vector<OrbitPoint> iterate_orbit(const MarkedPolynomial& f, const Scalar& c, int steps, const OrbitOptions& opt = {});

enum class EscapeKind { Escaping, Bounded, Unknown };
enum class BoundedKind { DiskComponent, PointComponent, Undetermined };
enum class Classification { Simple, TameShiftLocus, JuliaInAffine, HasBoundedFatou, Unknown };

const char* escape_kind_name(EscapeKind k);
const char* bounded_kind_name(BoundedKind k);
const char* classification_name(Classification c);

struct EscapeRecord {
  EscapeKind kind = EscapeKind::Unknown;
  int first_exit = -1;
  BoundedKind bounded = BoundedKind::Undetermined;
  Val diam_exp = Val::infinity();
  int budget_spent = 0;
  std::string reason;

  bool certified_escaping() const { return kind == EscapeKind::Escaping; }
  bool certified_bounded() const { return kind == EscapeKind::Bounded && bounded != BoundedKind::Undetermined; }
};

constexpr int kDefaultBudget = 64;
constexpr int kDefaultDescentDepth = 32;

EscapeRecord classify_critical(const MarkedPolynomial& f, const CriticalMark& c, int budget = kDefaultBudget,
                               int descent_depth = kDefaultDescentDepth);

struct JuliaReport {
  Classification classification = Classification::Unknown;
  std::vector<EscapeRecord> marks;
};

JuliaReport julia_in_affine(const MarkedPolynomial& f, int budget = kDefaultBudget);

// exponent of |phi_f|(z)
Val boettcher_modulus(const MarkedPolynomial& f, const BerkPoint& z, int budget = kDefaultBudget);

// Continuous increasing piecewise-affine self-map of the radius-exponent line.
class PLMap {
 public:
  struct Piece {
    std::optional<Rational> lo;
    Val hi;
    Rational slope;
    Rational offset;
  };
  static PLMap identity();
  static PLMap from_segment(const SegmentMap& s);
  // this after inner
  PLMap after(const PLMap& inner) const;
  Val eval(const Val& q) const;
  Val inverse(const Val& q) const;
  // smallest q >= from with eval(q) = q
  std::optional<Rational> smallest_fixed_point(const Rational& from) const;
  const std::vector<Piece>& pieces() const { return pieces_; }

 private:
  std::vector<Piece> pieces_;
};

}  // namespace tamedyn
