#include "tamedyn/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace tamedyn {

// ---------------------------------------------------------------- Poly

Poly::Poly(FieldRef field, std::vector<Scalar> coeffs) : field_(std::move(field)), c_(std::move(coeffs)) { trim(); }

Poly Poly::constant(const Scalar& c) { return Poly(c.field(), {c}); }

Poly Poly::monomial_z(const FieldRef& field, int power) {
  std::vector<Scalar> c(static_cast<std::size_t>(power + 1), Scalar::zero(field));
  c.back() = Scalar::one(field);
  return Poly(field, std::move(c));
}

void Poly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Scalar Poly::coeff(int i) const {
  if (i < 0 || i > degree()) return Scalar::zero(field_);
  return c_[static_cast<std::size_t>(i)];
}

Scalar Poly::eval(const Scalar& x) const {
  Scalar acc = Scalar::zero(field_);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Poly Poly::derivative() const {
  std::vector<Scalar> d;
  for (int i = 1; i <= degree(); ++i) d.push_back(c_[static_cast<std::size_t>(i)].scaled(Rational(i)));
  return Poly(field_, std::move(d));
}

std::vector<Scalar> Poly::taylor(const Scalar& a) const {
  std::vector<Scalar> b = c_;
  int n = degree();
  for (int i = 0; i < n; ++i)
    for (int j = n - 1; j >= i; --j) b[static_cast<std::size_t>(j)] += a * b[static_cast<std::size_t>(j + 1)];
  return b;
}

Poly operator+(const Poly& a, const Poly& b) {
  std::size_t n = std::max(a.c_.size(), b.c_.size());
  std::vector<Scalar> c;
  for (std::size_t i = 0; i < n; ++i) c.push_back(a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i)));
  return Poly(a.field_ ? a.field_ : b.field_, std::move(c));
}

Poly operator-(const Poly& a, const Poly& b) { return a + b.scaled(-Scalar::one(b.field_ ? b.field_ : a.field_)); }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.c_.empty() || b.c_.empty()) return Poly(a.field_, {});
  std::vector<Scalar> c(a.c_.size() + b.c_.size() - 1, Scalar::zero(a.field_));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Poly(a.field_, std::move(c));
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.c_.size() != b.c_.size()) return false;
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    if (a.c_[i] != b.c_[i]) return false;
  return true;
}

Poly Poly::scaled(const Scalar& s) const {
  std::vector<Scalar> c;
  for (const auto& x : c_) c.push_back(x * s);
  return Poly(field_, std::move(c));
}

std::string Poly::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const Scalar& a = c_[static_cast<std::size_t>(i)];
    if (a.is_zero()) continue;
    std::string coef = a.str();
    bool compound = !a.field()->is_padic() && a.terms().size() > 1;
    bool negative = !compound && coef[0] == '-';
    if (negative) coef.erase(0, 1);
    if (compound) coef = "(" + coef + ")";
    if (first) {
      if (negative) os << "-";
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    bool unit = coef == "1";
    if (i == 0) {
      os << coef;
    } else {
      if (!unit) os << coef << "*";
      os << "z";
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- images

PointImage image_from_taylor(const std::vector<Scalar>& taylor, const BerkPoint& x) {
  PointImage out;
  const Scalar& value = taylor.at(0);
  if (x.is_classical()) {
    out.point = BerkPoint(value, Val::infinity());
    out.degree = 0;
    for (std::size_t k = 1; k < taylor.size(); ++k)
      if (!taylor[k].is_zero()) {
        out.degree = static_cast<int>(k);
        break;
      }
    return out;
  }
  const Rational& q = x.radius_exp.value();
  Val best = Val::infinity();
  int deg = 0;
  for (std::size_t k = 1; k < taylor.size(); ++k) {
    if (taylor[k].is_zero()) continue;
    Val term = taylor[k].valuation() + Val(Rational(q * static_cast<long>(k)));
    if (term <= best) {
      best = term;
      deg = static_cast<int>(k);
    }
  }
  out.point = BerkPoint(value, best);
  out.degree = deg;
  return out;
}

PointImage image_point(const Poly& f, const BerkPoint& x) { return image_from_taylor(f.taylor(x.center), x); }

PointImage image_point(const MarkedPolynomial& f, const BerkPoint& x) { return image_from_taylor(f.taylor(x.center), x); }

int local_degree_rh(const MarkedPolynomial& f, const BerkPoint& x) {
  f.require_tame();
  int deg = 1;
  for (const auto& m : f.marks())
    if ((m.point - x.center).valuation() >= x.radius_exp) deg += m.mult - 1;
  return deg;
}

BerkPoint base_point(const MarkedPolynomial& f) { return f.base_point(); }

TamenessResult tameness_check(const MarkedPolynomial& f) { return f.tameness(); }

SegmentMap segment_dynamics(const MarkedPolynomial& f, const Scalar& c) {
  f.require_tame();
  return SegmentMap(c, f.taylor(c));
}

// ---------------------------------------------------------------- SegmentMap

SegmentMap::SegmentMap(Scalar center, const std::vector<Scalar>& taylor)
    : center_(std::move(center)), image_center_(taylor.at(0)) {
  struct Line {
    int k;
    Rational b;
  };
  std::vector<Line> lines;
  for (std::size_t k = 1; k < taylor.size(); ++k)
    if (!taylor[k].is_zero()) lines.push_back({static_cast<int>(k), taylor[k].valuation().value()});
  if (lines.empty()) throw Error(ErrorCode::PreconditionViolated, "constant map has no segment dynamics");
  // lower envelope, walking from q = -inf where the steepest line is lowest
  std::size_t cur = lines.size() - 1;
  std::optional<Rational> lo;
  while (true) {
    std::optional<Rational> next_q;
    std::size_t next = cur;
    for (std::size_t j = 0; j < cur; ++j) {
      Rational q = (lines[j].b - lines[cur].b) / Rational(lines[cur].k - lines[j].k);
      q.canonicalize();
      if (lo && q <= *lo) continue;
      if (!next_q || q < *next_q || (q == *next_q && lines[j].k < lines[next].k)) {
        next_q = q;
        next = j;
      }
    }
    Piece piece;
    piece.lo = lo;
    piece.slope = lines[cur].k;
    piece.offset = lines[cur].b;
    if (!next_q) {
      piece.hi = Val::infinity();
      pieces_.push_back(piece);
      break;
    }
    piece.hi = Val(*next_q);
    pieces_.push_back(piece);
    lo = next_q;
    cur = next;
  }
}

const SegmentMap::Piece& SegmentMap::piece_for(const Val& q) const {
  for (const auto& p : pieces_)
    if (q <= p.hi) return p;
  return pieces_.back();
}

Val SegmentMap::eval(const Val& q) const {
  if (q.is_inf()) return Val::infinity();
  const Piece& p = piece_for(q);
  return Val(Rational(p.offset + p.slope * q.value()));
}

int SegmentMap::slope_at(const Val& q) const { return piece_for(q).slope; }

Val SegmentMap::inverse(const Val& image_q) const {
  if (image_q.is_inf()) return Val::infinity();
  const Rational& target = image_q.value();
  for (const auto& p : pieces_) {
    Val top = p.hi.is_inf() ? Val::infinity() : Val(Rational(p.offset + p.slope * p.hi.value()));
    if (Val(target) <= top) {
      Rational q = (target - p.offset) / Rational(p.slope);
      q.canonicalize();
      return Val(q);
    }
  }
  throw Error(ErrorCode::PreconditionViolated, "segment inverse out of range");
}

// ---------------------------------------------------------------- MarkedPolynomial

namespace {

void validate_marks(const FieldRef& field, const std::vector<CriticalMark>& marks) {
  if (marks.empty()) throw Error(ErrorCode::InvalidMarks, "no critical marks");
  for (std::size_t i = 0; i < marks.size(); ++i) {
    if (!same_field(marks[i].point.field(), field)) throw Error(ErrorCode::InvalidMarks, "mark backend mismatch");
    if (marks[i].mult < 2) throw Error(ErrorCode::InvalidMarks, "mark multiplicity must be >= 2");
    for (std::size_t j = 0; j < i; ++j)
      if (marks[i].point == marks[j].point) throw Error(ErrorCode::InvalidMarks, "coincident critical marks");
  }
}

Poly derivative_from_marks(const FieldRef& field, const std::vector<CriticalMark>& marks, int d) {
  Poly acc = Poly::constant(Scalar(field, Rational(d)));
  for (const auto& m : marks) {
    Poly lin(field, {-m.point, Scalar::one(field)});
    for (int e = 0; e < m.mult - 1; ++e) acc = acc * lin;
  }
  return acc;
}

}  // namespace

MarkedPolynomial MarkedPolynomial::from_critical_data(const FieldRef& field, std::vector<CriticalMark> marks,
                                                      const Scalar& b, std::optional<int> degree) {
  validate_marks(field, marks);
  int d = 1;
  for (const auto& m : marks) d += m.mult - 1;
  if (degree && *degree != d)
    throw Error(ErrorCode::InvalidMarks,
                "multiplicities give degree " + std::to_string(d) + ", expected " + std::to_string(*degree));
  Scalar weighted = Scalar::zero(field);
  for (const auto& m : marks) weighted += m.point.scaled(Rational(m.mult - 1));
  if (!weighted.is_zero())
    throw Error(ErrorCode::InvalidMarks, "centering violated: sum (d_i - 1) c_i = " + weighted.str());
  Poly deriv = derivative_from_marks(field, marks, d);
  std::vector<Scalar> coeffs{b};
  for (int k = 0; k <= deriv.degree(); ++k) coeffs.push_back(deriv.coeff(k).scaled(Rational(Integer(1), Integer(k + 1))));
  MarkedPolynomial f;
  f.poly_ = Poly(field, std::move(coeffs));
  f.marks_ = std::move(marks);
  if (f.poly_.degree() != d || f.poly_.coeff(d) != Scalar::one(field) || !f.poly_.coeff(d - 1).is_zero())
    throw Error(ErrorCode::InvalidMarks, "antiderivative is not monic and centered");
  f.finish();
  return f;
}

MarkedPolynomial MarkedPolynomial::from_coefficients(const FieldRef& field, std::vector<Scalar> coeffs,
                                                     std::vector<CriticalMark> marks) {
  Poly p(field, std::move(coeffs));
  int d = p.degree();
  if (d < 2) throw Error(ErrorCode::InvalidMarks, "degree must be >= 2");
  if (p.coeff(d) != Scalar::one(field) || !p.coeff(d - 1).is_zero())
    throw Error(ErrorCode::InvalidMarks, "polynomial must be monic and centered");
  validate_marks(field, marks);
  int sum = 0;
  for (const auto& m : marks) sum += m.mult - 1;
  if (sum != d - 1) throw Error(ErrorCode::InvalidMarks, "multiplicities do not sum to d - 1");
  if (!(p.derivative() == derivative_from_marks(field, marks, d)))
    throw Error(ErrorCode::InvalidMarks, "marks are not the critical points of f");
  MarkedPolynomial f;
  f.poly_ = std::move(p);
  f.marks_ = std::move(marks);
  f.finish();
  return f;
}

MarkedPolynomial MarkedPolynomial::with_field(const FieldRef& target) const {
  if (same_field(target, field())) return *this;
  std::vector<Scalar> c;
  for (const auto& a : poly_.coeffs()) c.push_back(a.to_field(target));
  MarkedPolynomial f;
  f.poly_ = Poly(target, std::move(c));
  for (const auto& m : marks_) f.marks_.push_back({m.point.to_field(target), m.mult});
  f.finish();
  return f;
}

void MarkedPolynomial::finish() {
  int d = degree();
  base_exp_ = 0;
  for (int i = 0; i <= d - 2; ++i) {
    Scalar a = poly_.coeff(i);
    if (a.is_zero()) continue;
    Rational e = a.valuation().value() / Rational(d - i);
    e.canonicalize();
    if (e < base_exp_) base_exp_ = e;
  }
  cache_ = std::make_shared<TaylorCache>();

  auto res = std::make_shared<TamenessResult>();
  res->tame = true;
  long p = field()->residue_char();
  if (p != 0) {
    auto flag = [&](int deg, BerkPoint at) {
      if (res->tame && deg % p == 0) {
        res->tame = false;
        res->degree = deg;
        res->witness = std::move(at);
      }
    };
    for (const auto& m : marks_) flag(m.mult, BerkPoint(m.point, Val::infinity()));
    for (std::size_t i = 0; i < marks_.size(); ++i)
      for (std::size_t j = i + 1; j < marks_.size(); ++j) {
        Val q = (marks_[i].point - marks_[j].point).valuation();
        int deg = 1;
        for (const auto& m : marks_)
          if ((m.point - marks_[i].point).valuation() >= q) deg += m.mult - 1;
        flag(deg, BerkPoint(marks_[i].point, q));
      }
    flag(d, base_point());
    // actual local degrees along every critical ray, which also expose degrees no cluster sum predicts
    for (const auto& m : marks_) {
      SegmentMap ray(m.point, poly_.taylor(m.point));
      for (const auto& piece : ray.pieces()) {
        Rational q = piece.hi.is_finite() ? piece.hi.value() : (piece.lo ? Rational(*piece.lo + 1) : Rational(0));
        flag(piece.slope, BerkPoint(m.point, Val(q)));
      }
    }
  }
  tame_ = res;
}

BerkPoint MarkedPolynomial::base_point() const { return BerkPoint(Scalar::zero(field()), Val(base_exp_)); }

std::vector<Scalar> MarkedPolynomial::taylor(const Scalar& a) const {
  std::string key = a.str();
  {
    std::lock_guard<std::mutex> g(cache_->lock);
    auto it = cache_->entries.find(key);
    if (it != cache_->entries.end()) return it->second;
  }
  std::vector<Scalar> t = poly_.taylor(a);
  std::lock_guard<std::mutex> g(cache_->lock);
  if (cache_->entries.size() > 4096) cache_->entries.clear();
  cache_->entries.emplace(key, t);
  return t;
}

void MarkedPolynomial::require_tame() const {
  if (!tame_->tame)
    throw Error(ErrorCode::NotTame, "local degree " + std::to_string(tame_->degree) + " divisible by the residue characteristic at " +
                                        tame_->witness->str());
}

bool MarkedPolynomial::is_simple() const { return base_exp_ == 0; }

}  // namespace tamedyn
