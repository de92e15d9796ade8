#include "doctest.h"
#include "test_support.hpp"

using namespace tt;

namespace {

// z^3 - 3c^2 z + b with marks c and -c over Q_5
MarkedPolynomial symmetric_cubic(const char* c, const char* b) {
  auto F = Q(5);
  return MarkedPolynomial::from_critical_data(F, {{S(F, c), 2}, {-S(F, c), 2}}, S(F, b));
}

}  // namespace

TEST_CASE("escaping critical point") {
  auto F = Q(3);
  auto f = quad(F, S(F, "-1/3"));
  EscapeRecord r = classify_critical(f, f.marks()[0]);
  CHECK(r.kind == EscapeKind::Escaping);
  CHECK(r.first_exit == 1);
}

TEST_CASE("simple polynomials keep their critical points") {
  auto F = Q(3);
  for (const char* b : {"0", "-1"}) {
    auto f = quad(F, S(F, b));
    EscapeRecord r = classify_critical(f, f.marks()[0]);
    CHECK(r.kind == EscapeKind::Bounded);
    CHECK(r.bounded == BoundedKind::DiskComponent);
    CHECK(r.diam_exp == Val(0));
    CHECK(julia_in_affine(f).classification == Classification::Simple);
  }
  CHECK(julia_in_affine(quad(F, S(F, "-1/3"))).classification == Classification::TameShiftLocus);
}

TEST_CASE("superattracting fixed critical point in a nonsimple cubic") {
  // c = 1/5 fixed: b = c + 2c^3 = 27/125; the other mark escapes at once
  auto f = symmetric_cubic("1/5", "27/125");
  CHECK(f.base_exp() == -1);
  CHECK(f.eval(f.marks()[0].point) == f.marks()[0].point);
  EscapeRecord r0 = classify_critical(f, f.marks()[0]);
  CHECK(r0.kind == EscapeKind::Bounded);
  CHECK(r0.bounded == BoundedKind::DiskComponent);
  // f(c + u) - c = (3/5)u^2 + u^3 preserves |u| <= 1/5
  CHECK(r0.diam_exp == Val(1));
  EscapeRecord r1 = classify_critical(f, f.marks()[1]);
  CHECK(r1.kind == EscapeKind::Escaping);
  CHECK(r1.first_exit == 1);
  CHECK(julia_in_affine(f).classification == Classification::HasBoundedFatou);
}

TEST_CASE("critical point landing on a repelling fixed point") {
  // c = 1/5 maps to -2c, fixed with multiplier 9c^2; b = -2c + 2c^3
  auto f = symmetric_cubic("1/5", "-48/125");
  Scalar beta = S(f.field(), "-2/5");
  CHECK(f.eval(f.marks()[0].point) == beta);
  CHECK(f.eval(beta) == beta);
  EscapeRecord r0 = classify_critical(f, f.marks()[0]);
  CHECK(r0.kind == EscapeKind::Bounded);
  CHECK(r0.bounded == BoundedKind::PointComponent);
  CHECK(julia_in_affine(f).classification == Classification::JuliaInAffine);
}

TEST_CASE("Boettcher modulus") {
  auto F = Q(3);
  auto f = quad(F, S(F, "-1/3"));
  CHECK(boettcher_modulus(f, P(S(F, "0"), "inf")) == V("-1/2"));
  auto g = quad(F, S(F, "0"));
  CHECK(boettcher_modulus(g, P(S(F, "0"), "-2")) == Val(-2));
  CHECK(boettcher_modulus(f, P(S(F, "1/9"), "inf")) == Val(-2));
  CHECK_THROWS_WITH_AS(boettcher_modulus(g, gauss_point(F)), doctest::Contains("NotInBasin"), Error);
}

TEST_CASE("base exponent equals the least escaping Boettcher modulus") {
  auto f = symmetric_cubic("1/5", "27/125");
  Val m = boettcher_modulus(f, BerkPoint(f.marks()[1].point, Val::infinity()));
  CHECK(m == Val(f.base_exp()));
}

TEST_CASE("series backend escape") {
  auto Ts = T("30");
  auto f = quad(Ts, tpow(Ts, "-1"));
  EscapeRecord r = classify_critical(f, f.marks()[0]);
  CHECK(r.kind == EscapeKind::Escaping);
  CHECK(r.first_exit == 1);
  CHECK(f.base_exp() == R("-1/2"));
}

TEST_CASE("PL composition and fixed points") {
  auto F = Q(5);
  auto f = symmetric_cubic("1/5", "27/125");
  PLMap m = PLMap::from_segment(segment_dynamics(f, f.marks()[0].point));
  CHECK(m.eval(Val(-2)) == Val(-6));
  CHECK(m.eval(Val(2)) == Val(3));
  CHECK(*m.smallest_fixed_point(R("-1")) == 1);
  PLMap twice = m.after(m);
  CHECK(twice.eval(Val(2)) == m.eval(m.eval(Val(2))));
  CHECK(twice.eval(Val(-3)) == m.eval(m.eval(Val(-3))));
  CHECK(twice.inverse(twice.eval(V("7/3"))) == V("7/3"));
}
