#include <random>

#include "doctest.h"
#include "test_support.hpp"

using namespace tt;

TEST_CASE("antiderivative from critical data") {
  auto F = Q(3);
  auto f = quad(F, S(F, "-1/3"));
  CHECK(f.degree() == 2);
  CHECK(f.poly().coeff(0) == S(F, "-1/3"));
  CHECK(f.poly().coeff(1).is_zero());
  CHECK(f.poly().coeff(2) == S(F, "1"));
  CHECK(f.str() == "z^2 - 1/3");
  CHECK(quad(F, S(F, "0")).str() == "z^2");

  auto G = Q(5);
  auto g = MarkedPolynomial::from_critical_data(G, {{S(G, "1"), 2}, {S(G, "-1"), 2}}, S(G, "0"));
  CHECK(g.str() == "z^3 - 3*z");
}

TEST_CASE("centering constraint uses (d_i - 1) weights") {
  auto F = Q(5);
  // 4(z - 2)(z + 1)^2 = 4z^3 - 12z - 8, so f = z^4 - 6z^2 - 8z + b
  auto f = MarkedPolynomial::from_critical_data(F, {{S(F, "2"), 2}, {S(F, "-1"), 3}}, S(F, "7"));
  CHECK(f.str() == "z^4 - 6*z^2 - 8*z + 7");
  // marks with sum d_i c_i = 0 but sum (d_i - 1) c_i != 0 give a non-centered antiderivative
  CHECK_THROWS_WITH_AS(MarkedPolynomial::from_critical_data(F, {{S(F, "3"), 2}, {S(F, "-2"), 3}}, S(F, "0")),
                       doctest::Contains("InvalidMarks"), Error);
}

TEST_CASE("invalid marks") {
  auto F = Q(3);
  CHECK_THROWS_AS(MarkedPolynomial::from_critical_data(F, {{S(F, "1"), 2}, {S(F, "1"), 2}}, S(F, "0")), Error);
  CHECK_THROWS_AS(MarkedPolynomial::from_critical_data(F, {{S(F, "0"), 2}}, S(F, "0"), 3), Error);
  CHECK_THROWS_AS(MarkedPolynomial::from_critical_data(F, {{S(F, "0"), 1}}, S(F, "0")), Error);
}

TEST_CASE("raw coefficients are verified against the marks") {
  auto F = Q(5);
  auto f = MarkedPolynomial::from_coefficients(F, {S(F, "0"), S(F, "-3"), S(F, "0"), S(F, "1")},
                                               {{S(F, "1"), 2}, {S(F, "-1"), 2}});
  CHECK(f.base_exp() == 0);
  CHECK_THROWS_AS(MarkedPolynomial::from_coefficients(F, {S(F, "0"), S(F, "-3"), S(F, "0"), S(F, "1")},
                                                      {{S(F, "2"), 2}, {S(F, "-2"), 2}}),
                  Error);
  CHECK_THROWS_AS(MarkedPolynomial::from_coefficients(F, {S(F, "0"), S(F, "0"), S(F, "1"), S(F, "1")},
                                                      {{S(F, "0"), 3}}),
                  Error);
}

TEST_CASE("image_point examples") {
  auto F = Q(3);
  auto f = quad(F, S(F, "-1/3"));
  PointImage im = image_point(f, P(S(F, "0"), "-1/2"));
  CHECK(im.point == P(S(F, "0"), "-1"));
  CHECK(im.degree == 2);
  auto g = quad(F, S(F, "0"));
  CHECK(image_point(g, gauss_point(F)).point == gauss_point(F));
  CHECK(image_point(g, gauss_point(F)).degree == 2);
  PointImage c = image_point(f, P(S(F, "0"), "inf"));
  CHECK(c.point.center == S(F, "-1/3"));
  CHECK(c.point.is_classical());
  CHECK(c.degree == 2);
}

TEST_CASE("Riemann-Hurwitz degrees") {
  auto F = Q(3);
  auto f = quad(F, S(F, "-1/3"));
  CHECK(local_degree_rh(f, gauss_point(F)) == 2);
  auto G = Q(5);
  auto g = MarkedPolynomial::from_critical_data(G, {{S(G, "1"), 2}, {S(G, "-1"), 2}}, S(G, "0"));
  CHECK(local_degree_rh(g, P(S(G, "1"), "1")) == 2);
  CHECK(local_degree_rh(g, base_point(g)) == 3);
  CHECK(local_degree_rh(f, P(S(F, "0"), "-3")) == 2);
}

TEST_CASE("base points") {
  auto F = Q(3);
  CHECK(base_point(quad(F, S(F, "-1/3"))) == P(S(F, "0"), "-1/2"));
  CHECK(base_point(quad(F, S(F, "0"))) == gauss_point(F));
  auto G = Q(5);
  auto g = MarkedPolynomial::from_critical_data(G, {{S(G, "1"), 2}, {S(G, "-1"), 2}}, S(G, "0"));
  CHECK(base_point(g) == gauss_point(G));
}

TEST_CASE("tameness") {
  auto F = Q(3);
  CHECK(tameness_check(quad(F, S(F, "-1/3"))).tame);
  auto F2 = Q(2);
  auto w = quad(F2, S(F2, "0"));
  TamenessResult r = tameness_check(w);
  CHECK(!r.tame);
  CHECK(r.degree == 2);
  CHECK(*r.witness == P(S(F2, "0"), "inf"));
  CHECK_THROWS_WITH_AS(local_degree_rh(w, gauss_point(F2)), doctest::Contains("NotTame"), Error);
  auto Ts = T("20");
  CHECK(tameness_check(quad(Ts, tpow(Ts, "-1"))).tame);
  // two marks of multiplicity 2 merging into a degree-3 cluster over Q_3
  auto F3 = Q(3);
  auto cub = MarkedPolynomial::from_critical_data(F3, {{S(F3, "1"), 2}, {S(F3, "-1"), 2}}, S(F3, "0"));
  CHECK(!tameness_check(cub).tame);
  CHECK(tameness_check(cub).degree == 3);
}

TEST_CASE("segment dynamics") {
  auto F = Q(3);
  auto f = quad(F, S(F, "-1/3"));
  SegmentMap s = segment_dynamics(f, S(F, "0"));
  REQUIRE(s.pieces().size() == 1);
  CHECK(s.pieces()[0].slope == 2);
  CHECK(s.eval(V("-1/2")) == V("-1"));
  CHECK(s.inverse(V("-1")) == V("-1/2"));

  auto G = Q(5);
  auto g = MarkedPolynomial::from_critical_data(G, {{S(G, "1"), 2}, {S(G, "-1"), 2}}, S(G, "0"));
  SegmentMap t = segment_dynamics(g, S(G, "1"));
  REQUIRE(t.pieces().size() == 2);
  CHECK(t.pieces()[0].slope == 3);
  CHECK(t.pieces()[0].hi == Val(0));
  CHECK(t.pieces()[1].slope == 2);
  CHECK(t.eval(Val(2)) == Val(4));
  CHECK(t.eval(Val(-1)) == Val(-3));
  CHECK(t.slope_at(Val(0)) == 3);
}

namespace {

MarkedPolynomial random_marked(std::mt19937& rng, const FieldRef& F) {
  for (;;) {
    int k = 1 + static_cast<int>(rng() % 3);
    std::vector<CriticalMark> marks;
    Scalar weighted = Scalar::zero(F);
    for (int i = 0; i + 1 < k; ++i) {
      long num = static_cast<long>(rng() % 41) - 20;
      long den = (rng() % 2) ? 1 : 9;
      int m = 2 + static_cast<int>(rng() % 2);
      Scalar c(F, Rational(num, den));
      marks.push_back({c, m});
      weighted += c.scaled(Rational(m - 1));
    }
    int m_last = 2 + static_cast<int>(rng() % 2);
    marks.push_back({(-weighted).scaled(Rational(Integer(1), Integer(m_last - 1))), m_last});
    try {
      auto f = MarkedPolynomial::from_critical_data(F, marks, Scalar(F, Rational(static_cast<long>(rng() % 19) - 9, 3)));
      if (f.tameness().tame) return f;
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST_CASE("degree cross-check and expansion on random disks") {
  std::mt19937 rng(11);
  auto F = Q(5);
  for (int trial = 0; trial < 40; ++trial) {
    MarkedPolynomial f = random_marked(rng, F);
    for (int j = 0; j < 10; ++j) {
      Scalar a(F, Rational(static_cast<long>(rng() % 61) - 30, (rng() % 2) ? 1 : 25));
      if (j < static_cast<int>(f.marks().size())) a = f.marks()[static_cast<std::size_t>(j)].point;
      Rational q(static_cast<long>(rng() % 13) - 6, 1 + static_cast<long>(rng() % 3));
      q.canonicalize();
      BerkPoint x(a, Val(q));
      CHECK(image_point(f, x).degree == local_degree_rh(f, x));
      SegmentMap s = segment_dynamics(f, a);
      Rational q2 = q + Rational(1, 7);
      bool one_piece = true;
      for (const auto& p : s.pieces())
        if (p.hi.is_finite() && p.hi.value() >= q && p.hi.value() < q2) one_piece = false;
      if (one_piece) {
        BerkPoint y(a, Val(q2));
        CHECK(hyp_dist(image_point(f, x).point, image_point(f, y).point) ==
              Rational(s.slope_at(Val(q2))) * hyp_dist(x, y));
      }
    }
    // above the base point the radius exponent scales by d
    BerkPoint above(Scalar::zero(F), Val(Rational(f.base_exp() - 1)));
    CHECK(image_point(f, above).point.radius_exp == Val(Rational((f.base_exp() - 1) * f.degree())));
    // round trip: f' = d prod (z - c_i)^(d_i - 1)
    auto g = MarkedPolynomial::from_coefficients(F, f.poly().coeffs(), f.marks());
    CHECK(g.poly() == f.poly());
  }
}
