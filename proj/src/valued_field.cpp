#include "tamedyn/valued_field.hpp"

#include <algorithm>
#include <sstream>

namespace tamedyn {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::RootUnavailable: return "RootUnavailable";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::TypeIPoint: return "TypeIPoint";
    case ErrorCode::InvalidMarks: return "InvalidMarks";
    case ErrorCode::NotTame: return "NotTame";
    case ErrorCode::NotInBasin: return "NotInBasin";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::NotOutsideBaseDisk: return "NotOutsideBaseDisk";
    case ErrorCode::NotComparable: return "NotComparable";
    case ErrorCode::NotOnTree: return "NotOnTree";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::ContractionFailed: return "ContractionFailed";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::OrderInsufficient: return "OrderInsufficient";
    case ErrorCode::WellDefinednessFailure: return "WellDefinednessFailure";
    case ErrorCode::InputError: return "InputError";
  }
  return "Unknown";
}

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ') s.push_back(ch);
  if (s.empty()) throw Error(ErrorCode::InputError, "empty rational literal");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  bool slash = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    if (s[i] == '/') {
      if (slash || i == start || i + 1 == s.size()) throw Error(ErrorCode::InputError, "bad rational literal '" + text + "'");
      slash = true;
    } else if (s[i] < '0' || s[i] > '9') {
      throw Error(ErrorCode::InputError, "bad rational literal '" + text + "'");
    }
  }
  if (start == s.size()) throw Error(ErrorCode::InputError, "bad rational literal '" + text + "'");
  if (s[0] == '+') s.erase(0, 1);
  Rational q;
  if (q.set_str(s, 10) != 0) throw Error(ErrorCode::InputError, "bad rational literal '" + text + "'");
  if (q.get_den() == 0) throw Error(ErrorCode::InputError, "zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

std::string rat_str(const Rational& q) { return q.get_str(); }

Integer floor_rat(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil_rat(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

long int_valuation(const Integer& n, long p) {
  if (n == 0) throw Error(ErrorCode::PreconditionViolated, "valuation of zero integer");
  Integer rest;
  Integer pp(p);
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), pp.get_mpz_t()));
}

const Rational& Val::value() const {
  if (inf_) throw Error(ErrorCode::PreconditionViolated, "finite value requested from infinite valuation");
  return q_;
}

Val Val::scaled(const Rational& factor) const {
  if (factor <= 0) throw Error(ErrorCode::PreconditionViolated, "Val scaling requires a positive factor");
  if (inf_) return infinity();
  return Val(Rational(q_ * factor));
}

std::string Val::str() const { return inf_ ? "inf" : rat_str(q_); }

Val Val::parse(const std::string& text) {
  if (text == "inf" || text == "Infinity" || text == "infinity") return infinity();
  return Val(parse_rational(text));
}

Val vmin(const Val& a, const Val& b) { return b < a ? b : a; }
Val vmax(const Val& a, const Val& b) { return a < b ? b : a; }

namespace {
bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}
}  // namespace

FieldRef Field::padic(long p) {
  if (!is_prime(p)) throw Error(ErrorCode::PreconditionViolated, "p-adic backend needs a prime, got " + std::to_string(p));
  auto f = std::make_shared<Field>();
  f->kind_ = Kind::PAdic;
  f->p_ = p;
  return f;
}

FieldRef Field::series(const Rational& precision, long ramification) {
  if (precision <= 0) throw Error(ErrorCode::PreconditionViolated, "series precision must be positive");
  if (ramification < 1) throw Error(ErrorCode::PreconditionViolated, "ramification denominator must be >= 1");
  auto f = std::make_shared<Field>();
  f->kind_ = Kind::Series;
  f->precision_ = precision;
  f->ram_ = ramification;
  f->cut_ = ceil_rat(Rational(precision * ramification)).get_si();
  return f;
}

bool Field::in_value_group(const Rational& q) const {
  if (kind_ == Kind::PAdic) return true;
  Rational scaled = q * ram_;
  scaled.canonicalize();
  return scaled.get_den() == 1;
}

bool Field::same(const Field& o) const {
  if (kind_ != o.kind_) return false;
  if (kind_ == Kind::PAdic) return p_ == o.p_;
  return precision_ == o.precision_ && ram_ == o.ram_;
}

std::string Field::describe() const {
  if (kind_ == Kind::PAdic) return "PAdic(" + std::to_string(p_) + ")";
  return "SeriesT(" + rat_str(precision_) + ", " + std::to_string(ram_) + ")";
}

bool same_field(const FieldRef& a, const FieldRef& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->same(*b);
}

// ---------------------------------------------------------------- Scalar

Scalar::Scalar(FieldRef field, const Rational& value) : field_(std::move(field)) {
  if (!field_) throw Error(ErrorCode::PreconditionViolated, "scalar without backend");
  Rational v = value;
  v.canonicalize();
  if (field_->is_padic()) {
    q_ = v;
  } else if (v != 0) {
    terms_.emplace_back(0, v);
  }
}

Scalar Scalar::monomial(const FieldRef& field, const Rational& e, const Rational& c) {
  if (c == 0) return zero(field);
  if (field->is_padic()) {
    if (e.get_den() != 1) throw Error(ErrorCode::PreconditionViolated, "p-adic monomial exponent must be an integer");
    long k = e.get_num().get_si();
    Integer pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(field->prime()), static_cast<unsigned long>(k < 0 ? -k : k));
    Rational scale = k >= 0 ? Rational(pk) : Rational(Integer(1), pk);
    scale.canonicalize();
    return Scalar(field, Rational(c * scale));
  }
  Rational scaled = e * field->ramification();
  scaled.canonicalize();
  if (scaled.get_den() != 1)
    throw Error(ErrorCode::PreconditionViolated, "series exponent " + rat_str(e) + " outside ramification group");
  Scalar s;
  s.field_ = field;
  long k = scaled.get_num().get_si();
  Rational cc = c;
  cc.canonicalize();
  if (k < field->cut()) s.terms_.emplace_back(k, cc);
  return s;
}

Scalar Scalar::from_terms(const FieldRef& field, std::vector<std::pair<Rational, Rational>> terms) {
  Scalar acc = zero(field);
  for (auto& [e, c] : terms) acc = acc + monomial(field, e, c);
  return acc;
}

void Scalar::check(const Scalar& a, const Scalar& b) {
  if (!same_field(a.field_, b.field_)) throw Error(ErrorCode::PreconditionViolated, "backend mismatch");
}

bool Scalar::is_zero() const { return field_->is_padic() ? q_ == 0 : terms_.empty(); }

Val Scalar::valuation() const {
  if (is_zero()) return Val::infinity();
  if (field_->is_padic()) {
    long p = field_->prime();
    return Val(Rational(int_valuation(q_.get_num(), p) - int_valuation(q_.get_den(), p)));
  }
  Rational e(terms_.front().first, field_->ramification());
  e.canonicalize();
  return Val(e);
}

Rational Scalar::leading_coefficient() const {
  if (is_zero()) return 0;
  if (!field_->is_padic()) return terms_.front().second;
  long p = field_->prime();
  long v = valuation().value().get_num().get_si();
  Rational unit = q_;
  Integer pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(v < 0 ? -v : v));
  if (v > 0) unit /= Rational(pk);
  if (v < 0) unit *= Rational(pk);
  return Rational(padic_residue(unit, p, 1));
}

void Scalar::normalize_series() {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_)
    if (t.second != 0 && t.first < field_->cut()) out.push_back(std::move(t));
  terms_ = std::move(out);
}

Scalar Scalar::operator-() const {
  Scalar r = *this;
  if (field_->is_padic()) {
    r.q_ = -q_;
  } else {
    for (auto& t : r.terms_) t.second = -t.second;
  }
  return r;
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  Scalar::check(a, b);
  Scalar r;
  r.field_ = a.field_;
  if (a.field_->is_padic()) {
    r.q_ = a.q_ + b.q_;
    return r;
  }
  std::size_t i = 0, j = 0;
  while (i < a.terms_.size() || j < b.terms_.size()) {
    if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].first < b.terms_[j].first)) {
      r.terms_.push_back(a.terms_[i++]);
    } else if (i == a.terms_.size() || b.terms_[j].first < a.terms_[i].first) {
      r.terms_.push_back(b.terms_[j++]);
    } else {
      Rational c = a.terms_[i].second + b.terms_[j].second;
      if (c != 0) r.terms_.emplace_back(a.terms_[i].first, c);
      ++i;
      ++j;
    }
  }
  return r;
}

Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

Scalar operator*(const Scalar& a, const Scalar& b) {
  Scalar::check(a, b);
  Scalar r;
  r.field_ = a.field_;
  if (a.field_->is_padic()) {
    r.q_ = a.q_ * b.q_;
    return r;
  }
  if (a.terms_.empty() || b.terms_.empty()) return r;
  long cut = a.field_->cut();
  long lo = a.terms_.front().first + b.terms_.front().first;
  if (lo >= cut) return r;
  std::vector<Rational> acc(static_cast<std::size_t>(cut - lo));
  std::vector<char> used(acc.size(), 0);
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      long k = ka + kb;
      if (k >= cut) break;
      std::size_t idx = static_cast<std::size_t>(k - lo);
      acc[idx] += ca * cb;
      used[idx] = 1;
    }
  }
  for (std::size_t idx = 0; idx < acc.size(); ++idx)
    if (used[idx] && acc[idx] != 0) r.terms_.emplace_back(lo + static_cast<long>(idx), acc[idx]);
  return r;
}

Scalar operator/(const Scalar& a, const Scalar& b) {
  Scalar::check(a, b);
  if (b.is_zero()) throw Error(ErrorCode::DivisionByZero, "division by zero");
  Scalar r;
  r.field_ = a.field_;
  if (a.field_->is_padic()) {
    r.q_ = a.q_ / b.q_;
    return r;
  }
  if (a.terms_.empty()) return r;
  long cut = a.field_->cut();
  long kb = b.terms_.front().first;
  const Rational& cb = b.terms_.front().second;
  long qlo = a.terms_.front().first - kb;
  if (qlo >= cut) return r;
  // remainder indexed by exponent, window [qlo + kb, cut + kb)
  long rlo = qlo + kb;
  std::vector<Rational> rem(static_cast<std::size_t>(cut - qlo));
  for (const auto& [k, c] : a.terms_) {
    long idx = k - rlo;
    if (idx >= 0 && idx < static_cast<long>(rem.size())) rem[static_cast<std::size_t>(idx)] = c;
  }
  for (long k = qlo; k < cut; ++k) {
    Rational& lead = rem[static_cast<std::size_t>(k - qlo)];
    if (lead == 0) continue;
    Rational coef = lead / cb;
    r.terms_.emplace_back(k, coef);
    for (const auto& [kj, cj] : b.terms_) {
      long idx = k + kj - rlo;
      if (idx >= static_cast<long>(rem.size())) break;
      rem[static_cast<std::size_t>(idx)] -= coef * cj;
    }
  }
  return r;
}

Scalar checked_mul(const Scalar& a, const Scalar& b) {
  Scalar r = a * b;
  if (r.is_zero() && !a.is_zero() && !b.is_zero())
    throw Error(ErrorCode::PrecisionExhausted, "product has no term below the series cutoff");
  return r;
}

Scalar checked_div(const Scalar& a, const Scalar& b) {
  Scalar r = a / b;
  if (r.is_zero() && !a.is_zero()) throw Error(ErrorCode::PrecisionExhausted, "quotient has no term below the series cutoff");
  return r;
}

Scalar Scalar::inverse() const { return one(field_) / *this; }

Scalar Scalar::pow(long n) const {
  if (n < 0) return inverse().pow(-n);
  Scalar result = one(field_);
  Scalar base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

Scalar Scalar::scaled(const Rational& c) const { return *this * Scalar(field_, c); }

bool operator==(const Scalar& a, const Scalar& b) {
  if (!same_field(a.field_, b.field_)) return false;
  if (a.field_->is_padic()) return a.q_ == b.q_;
  return a.terms_ == b.terms_;
}

Integer padic_residue(const Rational& x, long p, long k) {
  Integer mod;
  mpz_ui_pow_ui(mod.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
  Integer inv;
  if (mpz_invert(inv.get_mpz_t(), x.get_den_mpz_t(), mod.get_mpz_t()) == 0) {
    if (k == 0) return 0;
    throw Error(ErrorCode::PreconditionViolated, "residue of a non-integral rational");
  }
  Integer r = x.get_num() * inv;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), mod.get_mpz_t());
  return r;
}

Scalar Scalar::reduced_below(const Rational& q) const {
  if (is_zero()) return *this;
  if (valuation() >= Val(q)) return zero(field_);
  if (!field_->is_padic()) {
    Scalar r;
    r.field_ = field_;
    for (const auto& t : terms_) {
      Rational e(t.first, field_->ramification());
      if (e < q) r.terms_.push_back(t);
    }
    return r;
  }
  long p = field_->prime();
  long k0 = valuation().value().get_num().get_si();
  long n = ceil_rat(q).get_si();
  Integer pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k0 < 0 ? -k0 : k0));
  Rational unit = q_;
  if (k0 > 0) unit /= Rational(pk);
  if (k0 < 0) unit *= Rational(pk);
  Integer res = padic_residue(unit, p, n - k0);
  Rational out(res);
  if (k0 > 0) out *= Rational(pk);
  if (k0 < 0) out /= Rational(pk);
  out.canonicalize();
  return Scalar(field_, out);
}

Scalar Scalar::to_field(const FieldRef& target) const {
  if (target->kind() != field_->kind()) throw Error(ErrorCode::PreconditionViolated, "backend kind mismatch");
  if (field_->is_padic()) {
    if (target->prime() != field_->prime()) throw Error(ErrorCode::PreconditionViolated, "prime mismatch");
    return Scalar(target, q_);
  }
  Scalar r;
  r.field_ = target;
  for (const auto& [k, c] : terms_) {
    Rational e(k * target->ramification(), field_->ramification());
    e.canonicalize();
    if (e.get_den() != 1) throw Error(ErrorCode::PreconditionViolated, "ramification mismatch");
    long kt = e.get_num().get_si();
    if (kt < target->cut()) r.terms_.emplace_back(kt, c);
  }
  return r;
}

std::string Scalar::str() const {
  if (field_->is_padic()) return rat_str(q_);
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    Rational e(k, field_->ramification());
    e.canonicalize();
    os << rat_str(c);
    if (e != 0) os << "*t^" << rat_str(e);
  }
  return os.str();
}

// ---------------------------------------------------------------- roots

Scalar nth_root_unit(const Scalar& u, const Integer& n, const Val& precision) {
  if (n < 1) throw Error(ErrorCode::PreconditionViolated, "root index must be >= 1");
  const FieldRef& F = u.field();
  Scalar one = Scalar::one(F);
  if (!((u - one).valuation() > Val(0)))
    throw Error(ErrorCode::PreconditionViolated, "nth_root_unit needs valuation(u - 1) > 0");
  if (n == 1) return u;
  if (F->is_padic()) {
    long p = F->prime();
    if (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p)))
      throw Error(ErrorCode::RootUnavailable, "root index divisible by the residue characteristic");
    long k = precision.is_inf() ? 40 : std::max<long>(1, ceil_rat(precision.value()).get_si());
    Integer mod;
    mpz_ui_pow_ui(mod.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
    Integer target = padic_residue(u.rational(), p, k);
    Integer w = 1, nm1 = n - 1;
    for (int iter = 0; iter < 256; ++iter) {
      Integer wn;
      mpz_powm(wn.get_mpz_t(), w.get_mpz_t(), n.get_mpz_t(), mod.get_mpz_t());
      Integer resid = wn - target;
      mpz_mod(resid.get_mpz_t(), resid.get_mpz_t(), mod.get_mpz_t());
      if (resid == 0) return Scalar(F, Rational(w));
      Integer deriv;
      mpz_powm(deriv.get_mpz_t(), w.get_mpz_t(), nm1.get_mpz_t(), mod.get_mpz_t());
      deriv = deriv * n;
      mpz_mod(deriv.get_mpz_t(), deriv.get_mpz_t(), mod.get_mpz_t());
      Integer inv;
      if (mpz_invert(inv.get_mpz_t(), deriv.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw Error(ErrorCode::RootUnavailable, "non-invertible derivative in Newton step");
      w = w - resid * inv;
      mpz_mod(w.get_mpz_t(), w.get_mpz_t(), mod.get_mpz_t());
    }
    throw Error(ErrorCode::PrecisionExhausted, "Newton root iteration did not converge");
  }
  // binomial series (1+s)^(1/n)
  Scalar s = u - one;
  Rational expo(Integer(1), n);
  Scalar result = one;
  Scalar power = one;
  Rational binom = 1;
  for (long k = 1;; ++k) {
    binom = binom * (expo - (k - 1)) / k;
    power = power * s;
    if (power.is_zero()) break;
    result = result + power.scaled(binom);
  }
  return result;
}

}  // namespace tamedyn
