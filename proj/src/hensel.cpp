#include "tamedyn/hensel.hpp"

namespace tamedyn {

namespace {

Val gauss_valuation(const Poly& p) {
  Val out = Val::infinity();
  for (const auto& c : p.coeffs()) out = vmin(out, c.valuation());
  return out;
}

[[noreturn]] void violated(const std::string& clause) { throw Error(ErrorCode::HypothesisViolated, clause); }

void require_integral_exponents(const Poly& p, const char* name) {
  const FieldRef& F = p.field();
  if (F->is_padic()) return;
  for (const auto& c : p.coeffs())
    for (const auto& [k, coeff] : c.terms())
      if (k % F->ramification() != 0)
        violated(std::string("reduction check needs integral t-exponents in ") + name + " (coefficient " + c.str() + ")");
}

void check_reduction(const Poly& p, const char* name) {
  Val gv = gauss_valuation(p);
  if (gv < Val(0)) violated(std::string(name) + " has a non-integral coefficient (Gauss valuation " + gv.str() + ")");
  for (int i = 1; i <= p.degree(); ++i)
    if (p.coeff(i).valuation() == Val(0)) return;
  violated(std::string("reduction of ") + name + " is constant");
}

}  // namespace

LiftParams default_lift_params(const Poly& f, const Poly& g, int max_iter) {
  LiftParams out;
  out.max_iter = max_iter;
  out.s = gauss_valuation(f - g);
  if (out.s.is_inf()) {
    out.mu = Val::infinity();
    out.r = 0;
    out.rho = 0;
    return out;
  }
  int d = std::max(f.degree(), g.degree());
  out.mu = out.s.scaled(Rational(1, 2));
  out.r = -out.s.value() / (4 * d);
  out.rho = -out.s.value() / (3 * d);
  out.r.canonicalize();
  out.rho.canonicalize();
  return out;
}

void validate_lift_params(const LiftParams& P, int degree) {
  if (P.max_iter < 0) violated("max_iter must be non-negative");
  if (P.s.is_inf()) return;
  if (!(P.s > Val(0))) violated("s must be positive");
  if (!(P.mu > Val(0)) || !(P.mu < P.s)) violated("need 0 < mu < s");
  if (P.mu.is_inf()) violated("mu must be finite");
  const Rational dr = degree * P.r;
  if (!(P.mu.value() + dr > 0)) violated("need mu*r^d < 1, i.e. mu + d*r > 0");
  if (!(P.s.value() + dr > P.mu.value())) violated("need s*r^d < mu, i.e. s + d*r > mu");
  if (!(P.r < 0) || !(P.rho < P.r)) violated("need 1 < r < rho, i.e. rho < r < 0");
}

LiftResult lift(const Poly& f, const Poly& g, const Scalar& x, const Val& target, const std::optional<LiftParams>& params) {
  const FieldRef& F = f.field();
  if (!same_field(F, g.field()) || !same_field(F, x.field())) throw Error(ErrorCode::InputError, "backends differ");
  require_integral_exponents(f, "f");
  require_integral_exponents(g, "g");
  check_reduction(f, "f");
  check_reduction(g, "g");

  const int d = std::max(f.degree(), g.degree());
  LiftParams P = params ? *params : default_lift_params(f, g);
  validate_lift_params(P, d);
  Val gauss_s = gauss_valuation(f - g);
  if (!(gauss_s >= P.s)) violated("f - g has Gauss valuation " + gauss_s.str() + " below s = " + P.s.str());

  if (x.valuation() < Val(0)) violated("x must lie in the closed unit disk");
  const Poly df = f.derivative();
  if (df.eval(x).valuation() != Val(0)) violated("f'(x) must be a unit, got valuation " + df.eval(x).valuation().str());
  const Scalar gx = g.eval(x);
  Scalar e = f.eval(x) - gx;
  if (!(e.valuation() >= P.s)) violated("valuation(f(x) - g(x)) below s");

  Val cap = Val::infinity();
  if (!F->is_padic()) {
    cap = Val(F->precision());
    if (target > cap) throw Error(ErrorCode::PrecisionExhausted, "target " + target.str() + " beyond series precision " + cap.str());
  }

  LiftResult out;
  out.params = P;
  Scalar z = x;
  for (int n = 0;; ++n) {
    Val ev = e.valuation();
    if (!out.trace.empty()) {
      const Val bound = out.trace.back().residual_val + P.mu.value();
      if (!(ev > bound))
        throw Error(ErrorCode::ContractionFailed, "step " + std::to_string(n) + ": residual valuation " + ev.str() +
                                                      " not above " + bound.str());
    }
    Val certified = vmin(ev, cap);
    if (certified >= target) {
      out.trace.push_back({z, Val::infinity(), ev});
      out.value = z;
      out.certified_valuation = certified;
      out.displacement = (z - x).valuation();
      return out;
    }
    if (n >= P.max_iter)
      throw Error(ErrorCode::MaxIterExceeded, "reached valuation " + certified.str() + " after " + std::to_string(n) +
                                                  " steps, target " + target.str());
    Scalar deriv = df.eval(z);
    if (deriv.valuation() != Val(0))
      throw Error(ErrorCode::ContractionFailed, "f'(z_" + std::to_string(n) + ") is no longer a unit");
    Scalar w = -(e / deriv);
    Val wv = w.valuation();
    if (!out.trace.empty()) {
      const Val bound = out.trace.back().w_val + P.mu.value();
      if (!(wv > bound))
        throw Error(ErrorCode::ContractionFailed, "step " + std::to_string(n) + ": valuation(w) " + wv.str() +
                                                      " not above " + bound.str());
    }
    out.trace.push_back({z, wv, ev});
    z = z + w;
    e = f.eval(z) - gx;
  }
}

LiftResult lift(const MarkedPolynomial& f, const MarkedPolynomial& g, const Scalar& x, const Val& target,
                const std::optional<LiftParams>& params) {
  return lift(f.poly(), g.poly(), x, target, params);
}

}  // namespace tamedyn
