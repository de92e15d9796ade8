#include "tamedyn/families.hpp"

#include <algorithm>

#include "tamedyn/io.hpp"

namespace tamedyn {

const char* passivity_name(PassivityKind k) {
  switch (k) {
    case PassivityKind::PassiveInBasin: return "PassiveInBasin";
    case PassivityKind::PassiveBounded: return "PassiveBounded";
    case PassivityKind::Active: return "Active";
    case PassivityKind::Unknown: return "Unknown";
  }
  return "?";
}

Family::Family(FieldRef field, ParamDisk disk, std::vector<Poly> coeff_polys, std::vector<Poly> mark_polys,
               std::vector<int> mults)
    : field_(std::move(field)),
      disk_(std::move(disk)),
      coeff_polys_(std::move(coeff_polys)),
      mark_polys_(std::move(mark_polys)),
      mults_(std::move(mults)) {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::InputError, "family: " + why); };
  const int d = degree();
  if (d < 2) bad("need coefficient maps a_0..a_d with d >= 2");
  if (!(coeff_polys_[static_cast<std::size_t>(d)] == Poly::constant(Scalar::one(field_))))
    bad("leading coefficient map must be the constant 1");
  if (!(coeff_polys_[static_cast<std::size_t>(d - 1)] == Poly::constant(Scalar::zero(field_))))
    bad("coefficient map a_(d-1) must vanish");
  if (mark_polys_.empty() || mark_polys_.size() != mults_.size()) bad("mark maps and multiplicities must match");
  for (const auto& p : coeff_polys_)
    if (!same_field(p.field(), field_)) bad("coefficient maps use another backend");
  for (const auto& p : mark_polys_)
    if (!same_field(p.field(), field_)) bad("mark maps use another backend");
  if (!same_field(disk_.center.field(), field_)) bad("disk center uses another backend");
}

MarkedPolynomial Family::at(const Scalar& lambda) const {
  std::vector<Scalar> coeffs;
  for (const auto& p : coeff_polys_) coeffs.push_back(p.eval(lambda));
  std::vector<CriticalMark> marks;
  for (std::size_t i = 0; i < mark_polys_.size(); ++i) marks.push_back({mark_polys_[i].eval(lambda), mults_[i]});
  return MarkedPolynomial::from_coefficients(field_, std::move(coeffs), std::move(marks));
}

namespace {

Poly poly_from_json(const FieldRef& F, const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::InputError, "polynomial in lambda must be a non-empty list");
  std::vector<Scalar> c;
  for (const auto& x : j) c.push_back(scalar_from_json(F, x));
  return Poly(F, std::move(c));
}

Json poly_to_json(const Poly& p) {
  Json out = Json::array();
  for (const auto& c : p.coeffs()) out.push_back(scalar_to_json(c));
  if (out.empty()) out.push_back("0");
  return out;
}

}  // namespace

Family family_from_json(const Json& j) {
  try {
    FieldRef F = field_from_json(j.at("backend"));
    const Json& dj = j.at("disk");
    ParamDisk disk{scalar_from_json(F, dj.at("center")), val_from_json(dj.at("radius_exp"))};
    std::vector<Poly> coeffs, marks;
    for (const auto& c : j.at("coeff_polys")) coeffs.push_back(poly_from_json(F, c));
    for (const auto& c : j.at("mark_polys")) marks.push_back(poly_from_json(F, c));
    std::vector<int> mults(marks.size(), 2);
    if (j.contains("mults")) mults = j.at("mults").get<std::vector<int>>();
    return Family(F, disk, coeffs, marks, mults);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InputError, std::string("malformed family: ") + e.what());
  }
}

Json family_to_json(const Family& F) {
  Json out;
  out["backend"] = field_to_json(F.field());
  out["disk"] = Json{{"center", scalar_to_json(F.disk().center)}, {"radius_exp", val_to_json(F.disk().radius_exp)}};
  Json cs = Json::array(), ms = Json::array();
  for (const auto& p : F.coeff_polys()) cs.push_back(poly_to_json(p));
  for (const auto& p : F.mark_polys()) ms.push_back(poly_to_json(p));
  out["coeff_polys"] = cs;
  out["mark_polys"] = ms;
  out["mults"] = F.mults();
  return out;
}

std::vector<Scalar> default_samples(const Family& F, const ParamDisk& disk, int count) {
  std::vector<Scalar> out{disk.center};
  if (disk.radius_exp.is_inf() || count <= 1) return out;
  const FieldRef& K = F.field();
  const long ram = K->is_padic() ? 1 : K->ramification();
  Rational s(ceil_rat(disk.radius_exp.value() * ram), ram);
  s.canonicalize();
  for (int k = 1; k < count; ++k) {
    long u = k;
    if (!K->is_padic()) u = (k % 2 == 1) ? (k + 1) / 2 : -(k / 2);
    out.push_back(disk.center + Scalar::monomial(K, s, Rational(u)));
  }
  return out;
}

PassivityReport passivity_report(const Family& F, const std::vector<Scalar>& samples, int budget) {
  PassivityReport rep;
  rep.marks.resize(F.mark_polys().size());
  for (const auto& lam : samples) {
    if (!F.disk().contains(lam)) {
      rep.defects.push_back({lam, "outside the parameter disk"});
      continue;
    }
    std::optional<MarkedPolynomial> f;
    try {
      f = F.at(lam);
      f->require_tame();
    } catch (const Error& e) {
      rep.defects.push_back({lam, e.what()});
      continue;
    }
    rep.samples.push_back(lam);
    for (std::size_t i = 0; i < rep.marks.size(); ++i)
      rep.marks[i].per_sample.push_back(classify_critical(*f, f->marks()[i], budget).kind);
  }
  for (auto& m : rep.marks) {
    std::optional<std::size_t> esc, bdd;
    bool unknown = false;
    for (std::size_t s = 0; s < m.per_sample.size(); ++s) {
      if (m.per_sample[s] == EscapeKind::Escaping && !esc) esc = s;
      if (m.per_sample[s] == EscapeKind::Bounded && !bdd) bdd = s;
      if (m.per_sample[s] == EscapeKind::Unknown) unknown = true;
    }
    if (esc && bdd) {
      m.kind = PassivityKind::Active;
      m.witness_a = rep.samples[std::min(*esc, *bdd)];
      m.witness_b = rep.samples[std::max(*esc, *bdd)];
    } else if (unknown || m.per_sample.empty()) {
      m.kind = PassivityKind::Unknown;
    } else {
      m.kind = esc ? PassivityKind::PassiveInBasin : PassivityKind::PassiveBounded;
    }
  }
  rep.note = "passive verdicts only state that no activity was witnessed at these samples";
  return rep;
}

Constancy base_point_constancy(const Family& F, const std::vector<Scalar>& samples) {
  Constancy out;
  for (const auto& lam : samples) {
    if (!F.disk().contains(lam)) {
      out.defects.push_back({lam, "outside the parameter disk"});
      continue;
    }
    Rational e;
    try {
      e = F.at(lam).base_exp();
    } catch (const Error& err) {
      out.defects.push_back({lam, err.what()});
      continue;
    }
    if (!out.first) {
      out.first = {lam, e};
      out.exp = e;
    } else if (out.constant && e != out.first->second) {
      out.constant = false;
      out.second = {lam, e};
      out.exp.reset();
    }
  }
  return out;
}

namespace {

// Truncated power series in mu = lambda - center, valid on v(mu) >= r, plus a sup-norm remainder bound.
struct Ser {
  std::vector<Scalar> c;
  Val tail = Val::infinity();
};

class SeriesKit {
 public:
  SeriesKit(FieldRef F, Rational r, int order, Rational rel)
      : F_(std::move(F)), r_(std::move(r)), N_(order), rel_(std::move(rel)) {
    if (!F_->is_padic()) {
      Rational worst = N_ * r_;
      noise_ = Val(Rational(F_->precision() + (worst < 0 ? worst : Rational(0))));
    }
  }

  Ser constant(const Scalar& s) const {
    Ser out;
    out.c.assign(static_cast<std::size_t>(N_) + 1, Scalar::zero(F_));
    out.c[0] = s;
    return out;
  }

  Ser shifted(const Poly& p, const Scalar& center) const {
    Ser out = constant(Scalar::zero(F_));
    std::vector<Scalar> t = p.taylor(center);
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k <= static_cast<std::size_t>(N_))
        out.c[k] = t[k];
      else
        out.tail = vmin(out.tail, term_norm(t[k], static_cast<long>(k)));
    }
    return out;
  }

  Val term_norm(const Scalar& a, long k) const { return a.valuation() + Val(Rational(k * r_)); }

  Val gauss(const Ser& s, std::size_t from = 0) const {
    Val out = Val::infinity();
    for (std::size_t k = from; k < s.c.size(); ++k) out = vmin(out, term_norm(s.c[k], static_cast<long>(k)));
    return out;
  }
  Val lower(const Ser& s) const { return vmin(gauss(s), s.tail); }

  void reduce(Ser& s) const {
    if (!F_->is_padic()) {
      s.tail = vmin(s.tail, noise_);
      return;
    }
    Val L = lower(s);
    if (L.is_inf()) return;
    Rational abs = L.value() + rel_;
    for (std::size_t k = 0; k < s.c.size(); ++k) s.c[k] = s.c[k].reduced_below(abs - Rational(static_cast<long>(k)) * r_);
    s.tail = vmin(s.tail, Val(abs));
  }

  Ser add(const Ser& a, const Ser& b) const {
    Ser out = a;
    for (std::size_t k = 0; k < out.c.size(); ++k) out.c[k] += b.c[k];
    out.tail = vmin(a.tail, b.tail);
    return out;
  }
  Ser sub(const Ser& a, const Ser& b) const { return add(a, scale(b, -Scalar::one(F_))); }

  Ser scale(const Ser& a, const Scalar& s) const {
    Ser out = a;
    for (auto& x : out.c) x *= s;
    out.tail = a.tail + s.valuation();
    return out;
  }

  Ser mul(const Ser& a, const Ser& b) const {
    std::vector<Scalar> full(2 * static_cast<std::size_t>(N_) + 1, Scalar::zero(F_));
    for (std::size_t i = 0; i < a.c.size(); ++i) {
      if (a.c[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.c.size(); ++j)
        if (!b.c[j].is_zero()) full[i + j] += a.c[i] * b.c[j];
    }
    Ser out;
    out.c.assign(full.begin(), full.begin() + N_ + 1);
    Val dropped = Val::infinity();
    for (std::size_t k = static_cast<std::size_t>(N_) + 1; k < full.size(); ++k)
      dropped = vmin(dropped, term_norm(full[k], static_cast<long>(k)));
    Val ga = gauss(a), gb = gauss(b);
    out.tail = vmin(vmin(dropped, ga + b.tail), vmin(a.tail + gb, a.tail + b.tail));
    reduce(out);
    return out;
  }

  Ser power(const Ser& a, int e) const {
    Ser out = constant(Scalar::one(F_));
    for (int k = 0; k < e; ++k) out = mul(out, a);
    return out;
  }

  // sum_{k<K} coeff(k) X^k for a series X of positive sup-valuation, remainder >= K * lower(X)
  template <class Coeff>
  Ser unit_series(const Ser& X, Coeff coeff) const {
    Val lx = lower(X);
    if (!(lx > Val(0))) throw Error(ErrorCode::PreconditionViolated, "series is not a unit perturbation on the subdisk");
    Ser main = X;
    main.tail = Val::infinity();
    Ser out = constant(Scalar::one(F_));
    if (lx.is_inf()) return out;
    long K = std::max<long>(1, ceil_rat(rel_ / lx.value()).get_si());
    Ser pw = constant(Scalar::one(F_));
    for (long k = 1; k < K; ++k) {
      pw = mul(pw, main);
      out = add(out, scale(pw, Scalar(F_, coeff(k))));
    }
    out.tail = vmin(vmin(out.tail, Val(Rational(K * lx.value()))), X.tail);
    reduce(out);
    return out;
  }

  Ser inverse(const Ser& a) const {
    const Scalar a0 = a.c[0];
    if (a0.is_zero()) throw Error(ErrorCode::PreconditionViolated, "series vanishes at the subdisk center");
    Ser x = a;
    x.c[0] = Scalar::zero(F_);
    x = scale(x, a0.inverse());
    Ser geo = unit_series(x, [](long k) { return Rational(k % 2 == 0 ? 1 : -1); });
    return scale(geo, a0.inverse());
  }

  // (1 + X)^(1/m) for a = 1 + X
  Ser root(const Ser& a, const Integer& m) const {
    Ser x = a;
    x.c[0] -= Scalar::one(F_);
    Rational alpha(Integer(1), m);
    alpha.canonicalize();
    std::vector<Rational> binom{Rational(1)};
    return unit_series(x, [&](long k) {
      while (static_cast<long>(binom.size()) <= k) {
        long j = static_cast<long>(binom.size());
        Rational next = binom.back() * (alpha - (j - 1)) / j;
        next.canonicalize();
        binom.push_back(next);
      }
      return binom[static_cast<std::size_t>(k)];
    });
  }

  const FieldRef& field() const { return F_; }

 private:
  FieldRef F_;
  Rational r_;
  int N_;
  Rational rel_;
  Val noise_ = Val::infinity();
};

}  // namespace

FamilyRho family_rho_bound(const Family& F, const ParamDisk& sub, int order, const Rational& precision,
                           const FamilyRhoOptions& opt) {
  if (order < 0) throw Error(ErrorCode::InputError, "order must be non-negative");
  if (!F.disk().contains(sub.center) || sub.radius_exp < F.disk().radius_exp)
    throw Error(ErrorCode::PreconditionViolated, "subdisk is not contained in the parameter disk");

  FamilyRho out;
  const MarkedPolynomial f0 = F.at(sub.center);
  f0.require_tame();
  const int d = f0.degree();
  const FieldRef& K = F.field();
  if (K->is_padic() && d % K->prime() == 0) throw Error(ErrorCode::RootUnavailable, "residue characteristic divides the degree");

  std::vector<Scalar> checks = default_samples(F, sub, opt.check_points + 1);
  PassivityReport pr = passivity_report(F, checks, opt.budget);
  if (!pr.defects.empty()) throw Error(ErrorCode::PreconditionViolated, "family defect at a check point: " + pr.defects.front().reason);
  for (std::size_t i = 0; i < pr.marks.size(); ++i)
    if (pr.marks[i].kind != PassivityKind::PassiveInBasin && pr.marks[i].kind != PassivityKind::PassiveBounded)
      throw Error(ErrorCode::PreconditionViolated,
                  "mark " + std::to_string(i) + " is " + passivity_name(pr.marks[i].kind) + " on the check set");
  Constancy cs = base_point_constancy(F, checks);
  if (!cs.constant) throw Error(ErrorCode::PreconditionViolated, "base point varies on the check set");

  if (sub.radius_exp.is_inf()) {
    out.bound.per_mark.assign(pr.marks.size(), Val::infinity());
    out.main_term = out.tail = out.bound.per_mark;
    for (std::size_t i = 0; i < pr.marks.size(); ++i)
      out.bound.first_exit.push_back(pr.marks[i].kind == PassivityKind::PassiveInBasin
                                         ? classify_critical(f0, f0.marks()[i], opt.budget).first_exit
                                         : -1);
    out.note = "subdisk is a single parameter";
    return out;
  }

  SeriesKit kit(K, sub.radius_exp.value(), order, precision + opt.slack);
  std::vector<Ser> a;
  for (const auto& p : F.coeff_polys()) a.push_back(kit.shifted(p, sub.center));

  Val base_lower(0);
  for (int i = 0; i < d; ++i) {
    Val li = kit.lower(a[static_cast<std::size_t>(i)]);
    if (li.is_finite()) base_lower = vmin(base_lower, Val(Rational(li.value() / (d - i))));
  }

  for (std::size_t mi = 0; mi < pr.marks.size(); ++mi) {
    if (pr.marks[mi].kind == PassivityKind::PassiveBounded) {
      out.bound.per_mark.push_back(Val::infinity());
      out.bound.first_exit.push_back(-1);
      out.main_term.push_back(Val::infinity());
      out.tail.push_back(Val::infinity());
      continue;
    }
    EscapeRecord er = classify_critical(f0, f0.marks()[mi], opt.budget);
    const int m = er.first_exit;
    Ser z = kit.shifted(F.mark_polys()[mi], sub.center);
    for (int n = 0; n < m; ++n) {
      Ser acc = a[static_cast<std::size_t>(d)];
      for (int i = d - 1; i >= 0; --i) acc = kit.add(kit.mul(acc, z), a[static_cast<std::size_t>(i)]);
      z = acc;
    }
    const Scalar w0 = z.c[0];
    const Val vw = w0.valuation();
    if (!(kit.gauss(z, 1) > vw) || !(z.tail > vw))
      throw Error(ErrorCode::PreconditionViolated, "|f^m(c)| is not constant on the subdisk for mark " + std::to_string(mi));
    if (!(vw < base_lower))
      throw Error(ErrorCode::PreconditionViolated, "first exit point does not clear the base disk uniformly");
    const Rational grow = -vw.value();

    Ser u = kit.inverse(z);
    Ser prod = kit.constant(Scalar::one(K));
    Integer root = d;
    Val tail_bound = Val::infinity();
    for (int n = 0;; ++n) {
      Integer dn = 1;
      for (int k = 0; k < n; ++k) dn *= d;
      tail_bound = Val::infinity();
      for (int i = 0; i <= d - 2; ++i) {
        Val li = kit.lower(a[static_cast<std::size_t>(i)]);
        if (li.is_finite()) tail_bound = vmin(tail_bound, Val(Rational(li.value() + Rational(d - i) * Rational(dn) * grow)));
      }
      if (tail_bound >= Val(Rational(precision + opt.slack))) break;
      if (n > 256) throw Error(ErrorCode::PrecisionExhausted, "Boettcher product does not converge on the subdisk");
      std::vector<Ser> pw{kit.constant(Scalar::one(K))};
      for (int k = 1; k <= d; ++k) pw.push_back(kit.mul(pw.back(), u));
      Ser Fn = kit.constant(Scalar::one(K));
      for (int i = 0; i <= d - 2; ++i) Fn = kit.add(Fn, kit.mul(a[static_cast<std::size_t>(i)], pw[static_cast<std::size_t>(d - i)]));
      prod = kit.mul(prod, kit.root(Fn, root));
      u = kit.mul(pw[static_cast<std::size_t>(d)], kit.inverse(Fn));
      root *= d;
    }
    prod.tail = vmin(prod.tail, tail_bound);
    Ser phi = kit.mul(z, prod);
    Val main = kit.gauss(phi, 1);
    Val tail = phi.tail;
    out.main_term.push_back(main);
    out.tail.push_back(tail);
    Val est = vmin(main, tail);
    if (tail <= main && tail - vw.value() < Val(precision))
      throw Error(ErrorCode::OrderInsufficient, "mark " + std::to_string(mi) + ": remainder bound " + tail.str() +
                                                    " does not clear the main term " + main.str() + "; raise the order");
    Val rho = est - vw.value();
    if (rho >= Val(precision)) rho = Val::infinity();
    out.bound.per_mark.push_back(rho);
    out.bound.first_exit.push_back(m);
    out.bound.rho = vmin(out.bound.rho, rho);
  }
  out.note = out.bound.rho.is_inf() ? "constant Boettcher coordinates at working precision " + rat_str(precision)
                                    : "sup-norm bound on the subdisk";
  return out;
}

PerturbResult perturb_to_escape(const Family& F, const Scalar& lambda0, int budget, int trials) {
  PerturbResult out;
  const FieldRef& K = F.field();
  auto all_escape = [&](const Scalar& lam) -> std::optional<JuliaReport> {
    ++out.tried;
    out.visited.push_back(lam);
    try {
      MarkedPolynomial f = F.at(lam);
      f.require_tame();
      JuliaReport rep = julia_in_affine(f, budget);
      for (const auto& r : rep.marks)
        if (r.kind != EscapeKind::Escaping) return std::nullopt;
      return rep;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  if (!F.disk().contains(lambda0)) {
    out.note = "lambda0 lies outside the parameter disk";
    return out;
  }
  auto finish = [&](const Scalar& lam, JuliaReport rep) {
    out.found = true;
    out.lambda = lam;
    out.report = std::move(rep);
    out.note = "every mark certifies escape";
    return out;
  };
  if (auto rep = all_escape(lambda0)) return finish(lambda0, *rep);

  const long ram = K->is_padic() ? 1 : K->ramification();
  const Rational step(1, ram);
  Rational s = F.disk().radius_exp.is_inf() ? Rational(0) : Rational(ceil_rat(F.disk().radius_exp.value() * ram), ram);
  s.canonicalize();
  if (F.disk().radius_exp.is_inf()) trials = 0;
  std::vector<long> units;
  if (K->is_padic()) {
    for (long u = 1; u <= std::min<long>(K->prime() - 1, 8); ++u) units.push_back(u);
  } else {
    units = {1, -1, 2};
  }
  for (int t = 0; t < trials; ++t, s += step) {
    for (long u : units) {
      Scalar lam = lambda0 + Scalar::monomial(K, s, Rational(u));
      if (auto rep = all_escape(lam)) return finish(lam, *rep);
    }
  }
  out.note = "no escaping parameter among " + std::to_string(out.tried) +
             " direction representatives; the search samples finitely many directions per sphere, so this is inconclusive";
  return out;
}

}  // namespace tamedyn
