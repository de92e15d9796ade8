#include "tamedyn/boettcher.hpp"

#include <algorithm>

namespace tamedyn {

namespace {

Rational rmin(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

FieldRef widened(const FieldRef& F, const Rational& cut) {
  if (F->is_padic() || cut <= F->precision()) return F;
  return Field::series(cut, F->ramification());
}

}  // namespace

PhiResult phi_eval_detail(const MarkedPolynomial& f, const Scalar& z, const Rational& precision) {
  const FieldRef& F = f.field();
  const int d = f.degree();
  if (F->is_padic() && d % F->prime() == 0) throw Error(ErrorCode::RootUnavailable, "residue characteristic divides the degree");
  f.require_tame();
  Val vz = z.valuation();
  if (!(vz < Val(f.base_exp())))
    throw Error(ErrorCode::NotOutsideBaseDisk, "|z| must exceed the base radius; v(z) = " + vz.str());
  const Rational& v = vz.value();
  Rational krel = precision - v;

  // first n whose tail bound min_i (v(a_i) - (d-i) d^n v(z)) reaches the relative target
  Rational worst_coeff = 0;
  bool any = false;
  for (int i = 0; i <= d - 2; ++i)
    if (!f.poly().coeff(i).is_zero()) {
      any = true;
      worst_coeff = rmin(worst_coeff, f.poly().coeff(i).valuation().value());
    }
  int factors = 0;
  if (any) {
    Integer dn = 1;
    while (true) {
      Rational tail;
      bool first = true;
      for (int i = 0; i <= d - 2; ++i) {
        const Scalar& a = f.poly().coeff(i);
        if (a.is_zero()) continue;
        Rational e = a.valuation().value() - Rational(d - i) * Rational(dn) * v;
        if (first || e < tail) tail = e;
        first = false;
      }
      if (tail >= krel) break;
      ++factors;
      dn *= d;
      if (factors > 4096) throw Error(ErrorCode::PrecisionExhausted, "Boettcher product does not converge");
    }
  }

  FieldRef W = F;
  if (!F->is_padic()) {
    Rational cut = krel + Rational(factors + 2) * (-worst_coeff) + 1;
    W = Field::series(rmax(cut, Rational(1)), F->ramification());
  }
  MarkedPolynomial fw = f.with_field(W);
  Scalar zw = z.to_field(W);
  Scalar one = Scalar::one(W);
  Scalar u = one / zw;
  Scalar prod = one;
  Integer root = d;
  Val root_prec(Rational(krel + 1));
  for (int n = 0; n < factors; ++n) {
    Scalar Fn = one;
    std::vector<Scalar> powers{one};
    for (int k = 1; k <= d; ++k) powers.push_back(powers.back() * u);
    for (int i = 0; i <= d - 2; ++i) {
      const Scalar a = fw.poly().coeff(i);
      if (!a.is_zero()) Fn += a * powers[static_cast<std::size_t>(d - i)];
    }
    prod = prod * nth_root_unit(Fn, root, root_prec);
    if (F->is_padic()) prod = prod.reduced_below(Rational(krel + 1));
    u = powers[static_cast<std::size_t>(d)] / Fn;
    root *= d;
  }
  PhiResult out;
  out.value = (zw * prod).to_field(F).reduced_below(precision);
  out.factors = factors;
  return out;
}

Scalar phi_eval(const MarkedPolynomial& f, const Scalar& z, const Rational& precision) {
  return phi_eval_detail(f, z, precision).value;
}

Val functional_equation_residual(const MarkedPolynomial& f, const Scalar& z, const Rational& target) {
  const FieldRef& F = f.field();
  Val vz = z.valuation();
  if (!(vz < Val(f.base_exp()))) throw Error(ErrorCode::NotOutsideBaseDisk, "|z| must exceed the base radius");
  const int d = f.degree();
  Rational loss = -vz.value() * (d - 1);
  FieldRef W = widened(F, target + loss + 1);
  MarkedPolynomial fw = f.with_field(W);
  Scalar zw = z.to_field(W);
  Scalar fz = fw.eval(zw);
  Scalar lhs = phi_eval(fw, fz, target);
  Scalar rhs = phi_eval(fw, zw, target + loss).pow(d);
  return (lhs - rhs).valuation();
}

RhoBound rho_closeness(const MarkedPolynomial& f, const MarkedPolynomial& g, const Rational& precision, int budget) {
  if (!same_field(f.field(), g.field())) throw Error(ErrorCode::NotComparable, "different backends");
  if (f.degree() != g.degree()) throw Error(ErrorCode::NotComparable, "different degrees");
  if (f.marks().size() != g.marks().size()) throw Error(ErrorCode::NotComparable, "different numbers of marks");
  for (std::size_t i = 0; i < f.marks().size(); ++i)
    if (f.marks()[i].mult != g.marks()[i].mult) throw Error(ErrorCode::NotComparable, "mark multiplicities differ");
  if (f.base_exp() != g.base_exp()) throw Error(ErrorCode::NotComparable, "base points differ");
  f.require_tame();
  g.require_tame();

  RhoBound out;
  for (std::size_t i = 0; i < f.marks().size(); ++i) {
    EscapeRecord rf = classify_critical(f, f.marks()[i], budget);
    EscapeRecord rg = classify_critical(g, g.marks()[i], budget);
    bool ef = rf.kind == EscapeKind::Escaping, eg = rg.kind == EscapeKind::Escaping;
    if (rf.kind == EscapeKind::Unknown || rg.kind == EscapeKind::Unknown)
      throw Error(ErrorCode::NotComparable, "escape status of mark " + std::to_string(i) + " is unresolved");
    if (ef != eg || (ef && rf.first_exit != rg.first_exit))
      throw Error(ErrorCode::NotComparable, "escape patterns differ at mark " + std::to_string(i));
    out.first_exit.push_back(ef ? rf.first_exit : -1);
    if (!ef) {
      out.per_mark.push_back(Val::infinity());
      continue;
    }
    OrbitOptions opt;
    opt.relative_digits = std::max<long>(256, ceil_rat(precision).get_si() + 64);
    OrbitPoint wf = iterate_orbit(f, f.marks()[i].point, rf.first_exit, opt).back();
    OrbitPoint wg = iterate_orbit(g, g.marks()[i].point, rg.first_exit, opt).back();
    const Rational vw = wf.value.valuation().value();
    Rational absolute = precision + vw;
    if (wf.accuracy < Val(absolute) || wg.accuracy < Val(absolute))
      throw Error(ErrorCode::PrecisionExhausted, "orbit accuracy below the requested precision at mark " + std::to_string(i));
    FieldRef W = widened(f.field(), precision + 1);
    Scalar pf = phi_eval(f.with_field(W), wf.value.to_field(W), absolute);
    Scalar pg = phi_eval(g.with_field(W), wg.value.to_field(W), absolute);
    Val diff = (pf - pg).valuation();
    Val rho = diff >= Val(absolute) ? Val::infinity() : diff - vw;
    out.per_mark.push_back(rho);
    out.rho = vmin(out.rho, rho);
  }
  return out;
}

}  // namespace tamedyn
