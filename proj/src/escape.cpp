#include "tamedyn/escape.hpp"

#include <algorithm>
#include <map>

namespace tamedyn {

const char* escape_kind_name(EscapeKind k) {
  switch (k) {
    case EscapeKind::Escaping: return "Escaping";
    case EscapeKind::Bounded: return "Bounded";
    case EscapeKind::Unknown: return "Unknown";
  }
  return "?";
}

const char* bounded_kind_name(BoundedKind k) {
  switch (k) {
    case BoundedKind::DiskComponent: return "DiskComponent";
    case BoundedKind::PointComponent: return "PointComponent";
    case BoundedKind::Undetermined: return "Undetermined";
  }
  return "?";
}

const char* classification_name(Classification c) {
  switch (c) {
    case Classification::Simple: return "Simple";
    case Classification::TameShiftLocus: return "TameShiftLocus";
    case Classification::JuliaInAffine: return "JuliaInAffine";
    case Classification::HasBoundedFatou: return "HasBoundedFatou";
    case Classification::Unknown: return "Unknown";
  }
  return "?";
}

// ---------------------------------------------------------------- orbits

namespace {

long bit_size(const Scalar& z) {
  const Rational& q = z.rational();
  return static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2) + mpz_sizeinbase(q.get_den_mpz_t(), 2));
}

}  // namespace

OrbitPoint orbit_step(const MarkedPolynomial& f, const OrbitPoint& z, const OrbitOptions& opt) {
  const FieldRef& F = f.field();
  OrbitPoint out;
  if (F->is_padic()) {
    if (z.accuracy.is_inf()) {
      out.value = f.eval(z.value);
      out.accuracy = Val::infinity();
      if (opt.allow_approximation && bit_size(out.value) > opt.exact_bits && !out.value.is_zero()) {
        Val cap = out.value.valuation() + Val(opt.relative_digits);
        out.accuracy = cap;
        out.value = out.value.reduced_below(cap.value());
      }
      return out;
    }
    PointImage img = image_point(f, BerkPoint(z.value, z.accuracy));
    Val acc = img.point.radius_exp;
    Val v = img.point.center.valuation();
    if (v < acc) acc = vmin(acc, v + Val(opt.relative_digits));
    out.accuracy = acc;
    out.value = acc.is_inf() ? img.point.center : img.point.center.reduced_below(acc.value());
    return out;
  }
  // truncated series: the disk image plus the error of truncated Horner evaluation
  PointImage img = image_point(f, BerkPoint(z.value, z.accuracy));
  Val vz = z.value.valuation();
  Rational loss = vz.is_inf() ? Rational(0) : Rational(std::min<Rational>(Rational(0), vz.value()) * (f.degree() - 1));
  Val trunc = Val(Rational(F->precision() + loss));
  out.value = img.point.center;
  out.accuracy = vmin(img.point.radius_exp, trunc);
  return out;
}

std::vector<OrbitPoint> iterate_orbit(const MarkedPolynomial& f, const Scalar& c, int steps, const OrbitOptions& opt) {
  std::vector<OrbitPoint> orbit;
  OrbitPoint z{c, Val::infinity()};
  if (!f.field()->is_padic()) z.accuracy = Val(f.field()->precision());
  orbit.push_back(z);
  for (int n = 0; n < steps; ++n) orbit.push_back(orbit_step(f, orbit.back(), opt));
  return orbit;
}

// ---------------------------------------------------------------- PL maps

PLMap PLMap::identity() {
  PLMap m;
  m.pieces_.push_back({std::nullopt, Val::infinity(), Rational(1), Rational(0)});
  return m;
}

PLMap PLMap::from_segment(const SegmentMap& s) {
  PLMap m;
  for (const auto& p : s.pieces()) m.pieces_.push_back({p.lo, p.hi, Rational(p.slope), p.offset});
  return m;
}

namespace {

template <class P>
const P& piece_at(const std::vector<P>& pieces, const Rational& q) {
  for (const auto& p : pieces)
    if (Val(q) <= p.hi) return p;
  return pieces.back();
}

}  // namespace

Val PLMap::eval(const Val& q) const {
  if (q.is_inf()) return Val::infinity();
  const Piece& p = piece_at(pieces_, q.value());
  return Val(Rational(p.slope * q.value() + p.offset));
}

Val PLMap::inverse(const Val& target) const {
  if (target.is_inf()) return Val::infinity();
  for (const auto& p : pieces_) {
    Val top = p.hi.is_inf() ? Val::infinity() : Val(Rational(p.slope * p.hi.value() + p.offset));
    if (target <= top) {
      Rational q = (target.value() - p.offset) / p.slope;
      q.canonicalize();
      return Val(q);
    }
  }
  throw Error(ErrorCode::PreconditionViolated, "PL inverse out of range");
}

PLMap PLMap::after(const PLMap& inner) const {
  std::vector<Rational> cuts;
  for (const auto& p : inner.pieces_)
    if (p.hi.is_finite()) cuts.push_back(p.hi.value());
  for (const auto& p : pieces_)
    if (p.hi.is_finite()) cuts.push_back(inner.inverse(p.hi).value());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  PLMap out;
  auto compose_at = [&](const Piece& a, const Piece& b, std::optional<Rational> lo, Val hi) {
    Piece r{lo, hi, b.slope * a.slope, b.slope * a.offset + b.offset};
    if (!out.pieces_.empty() && out.pieces_.back().slope == r.slope && out.pieces_.back().offset == r.offset) {
      out.pieces_.back().hi = hi;
    } else {
      out.pieces_.push_back(r);
    }
  };
  std::optional<Rational> lo;
  for (const auto& c : cuts) {
    const Piece& a = piece_at(inner.pieces_, c);
    Rational image = a.slope * c + a.offset;
    const Piece& b = piece_at(pieces_, image);
    compose_at(a, b, lo, Val(c));
    lo = c;
  }
  compose_at(inner.pieces_.back(), pieces_.back(), lo, Val::infinity());
  return out;
}

std::optional<Rational> PLMap::smallest_fixed_point(const Rational& from) const {
  std::optional<Rational> best;
  auto consider = [&](const Rational& q) {
    if (!best || q < *best) best = q;
  };
  for (const auto& p : pieces_) {
    if (p.hi.is_finite() && p.hi.value() < from) continue;
    if (p.slope == 1) {
      if (p.offset != 0) continue;
      if (!p.lo || *p.lo < from) {
        consider(from);
      } else {
        consider(*p.lo);
      }
      continue;
    }
    Rational q = p.offset / (1 - p.slope);
    q.canonicalize();
    if (q < from) continue;
    if (p.lo && q <= *p.lo) continue;
    if (Val(q) > p.hi) continue;
    consider(q);
  }
  return best;
}

// ---------------------------------------------------------------- classification

namespace {

PLMap composed_ray_map(const MarkedPolynomial& f, const std::vector<OrbitPoint>& orbit, std::size_t from, std::size_t to) {
  PLMap m = PLMap::identity();
  for (std::size_t j = from; j < to; ++j) m = PLMap::from_segment(segment_dynamics(f, orbit[j].value)).after(m);
  return m;
}

}  // namespace

EscapeRecord classify_critical(const MarkedPolynomial& f, const CriticalMark& c, int budget, int descent_depth) {
  f.require_tame();
  EscapeRecord rec;
  const Rational& qf = f.base_exp();
  if (f.is_simple()) {
    rec.kind = EscapeKind::Bounded;
    rec.bounded = BoundedKind::DiskComponent;
    rec.diam_exp = Val(qf);
    rec.reason = "base point is fixed; the filled set is the base disk";
    return rec;
  }
  const bool padic = f.field()->is_padic();
  std::vector<OrbitPoint> orbit{{c.point, padic ? Val::infinity() : Val(f.field()->precision())}};
  std::map<std::string, std::size_t> seen;
  if (padic) seen.emplace(c.point.str(), 0);
  for (int n = 0;; ++n) {
    const OrbitPoint& z = orbit.back();
    Val v = z.value.valuation();
    if (v < Val(qf) && v < z.accuracy) {
      rec.kind = EscapeKind::Escaping;
      rec.first_exit = n;
      rec.budget_spent = n;
      rec.reason = "orbit leaves the base disk";
      return rec;
    }
    if (!(Val(qf) < z.accuracy)) {
      rec.budget_spent = n;
      rec.reason = "orbit accuracy fell below the base radius";
      return rec;
    }
    if (n >= budget) break;
    orbit.push_back(orbit_step(f, z));
    const OrbitPoint& next = orbit.back();
    if (padic && next.accuracy.is_inf()) {
      auto [it, fresh] = seen.emplace(next.value.str(), orbit.size() - 1);
      if (!fresh) {
        std::size_t pre = it->second;
        std::size_t period = orbit.size() - 1 - pre;
        rec.kind = EscapeKind::Bounded;
        rec.budget_spent = n + 1;
        if (static_cast<int>(pre + period) > descent_depth * 8) {
          rec.bounded = BoundedKind::Undetermined;
          rec.reason = "cycle detected beyond descent depth";
          return rec;
        }
        PLMap cycle = composed_ray_map(f, orbit, pre, pre + period);
        PLMap approach = composed_ray_map(f, orbit, 0, pre);
        std::optional<Rational> fixed = cycle.smallest_fixed_point(qf);
        if (fixed) {
          rec.bounded = BoundedKind::DiskComponent;
          rec.diam_exp = approach.inverse(Val(*fixed));
          rec.reason = "preperiodic orbit; preimage radii of the base point converge";
        } else {
          rec.bounded = BoundedKind::PointComponent;
          rec.reason = "preperiodic orbit; preimage radii of the base point diverge";
        }
        return rec;
      }
    }
  }
  rec.kind = EscapeKind::Unknown;
  rec.budget_spent = budget;
  rec.reason = "budget exhausted without escape or exact cycle";
  return rec;
}

JuliaReport julia_in_affine(const MarkedPolynomial& f, int budget) {
  f.require_tame();
  JuliaReport rep;
  for (const auto& m : f.marks()) rep.marks.push_back(classify_critical(f, m, budget));
  bool all_escaping = true, none_escaping = true, any_disk = false, any_unknown = false;
  for (const auto& r : rep.marks) {
    bool esc = r.kind == EscapeKind::Escaping;
    all_escaping = all_escaping && esc;
    none_escaping = none_escaping && !esc;
    if (r.kind == EscapeKind::Bounded && r.bounded == BoundedKind::DiskComponent) any_disk = true;
    if (r.kind == EscapeKind::Unknown || (r.kind == EscapeKind::Bounded && r.bounded == BoundedKind::Undetermined))
      any_unknown = true;
  }
  if (all_escaping) {
    rep.classification = Classification::TameShiftLocus;
  } else if (none_escaping && !any_unknown) {
    rep.classification = Classification::Simple;
    if (!f.is_simple()) rep.classification = any_disk ? Classification::HasBoundedFatou : Classification::JuliaInAffine;
  } else if (any_disk) {
    rep.classification = Classification::HasBoundedFatou;
  } else if (!any_unknown) {
    rep.classification = Classification::JuliaInAffine;
  } else {
    rep.classification = Classification::Unknown;
  }
  return rep;
}

Val boettcher_modulus(const MarkedPolynomial& f, const BerkPoint& z, int budget) {
  f.require_tame();
  const Val qf(f.base_exp());
  BerkPoint x = z;
  Integer scale = 1;
  std::map<std::string, int> seen;
  for (int n = 0; n <= budget; ++n) {
    Val a = x.abs_exp();
    if (a < qf) {
      Rational e = a.value() / Rational(scale);
      e.canonicalize();
      return Val(e);
    }
    if (f.is_simple()) throw Error(ErrorCode::NotInBasin, "simple polynomial: the base disk is invariant");
    if (!seen.emplace(x.canonical().str(), n).second) throw Error(ErrorCode::NotInBasin, "orbit of the point is periodic");
    if (n == budget) break;
    x = image_point(f, x).point;
    scale *= f.degree();
  }
  throw Error(ErrorCode::BudgetExhausted, "no escape within " + std::to_string(budget) + " iterations");
}

}  // namespace tamedyn
