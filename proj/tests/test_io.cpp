#include "doctest.h"
#include "tamedyn/families.hpp"
#include "tamedyn/io.hpp"
#include "test_support.hpp"

using namespace tt;

TEST_CASE("scalar and value encodings") {
  auto F = Q(5);
  CHECK(scalar_to_json(S(F, "-3/25")) == Json("-3/25"));
  CHECK(scalar_from_json(F, Json("7/2")) == S(F, "7/2"));
  CHECK(scalar_from_json(F, Json(4)) == S(F, "4"));
  auto Ts = T("10", 2);
  Scalar x = tpow(Ts, "1/2", "2") + tpow(Ts, "1");
  Json j = scalar_to_json(x);
  CHECK(j == Json::parse(R"([["1/2","2"],["1","1"]])"));
  CHECK(scalar_from_json(Ts, j) == x);
  CHECK(val_to_json(Val::infinity()) == Json("inf"));
  CHECK(val_from_json(Json("-1/2")) == V("-1/2"));
  CHECK_THROWS_WITH_AS(scalar_from_json(F, Json::parse("[[1, 2]]")), doctest::Contains("InputError"), Error);
}

TEST_CASE("polynomial input forms") {
  Json a = Json::parse(R"({"backend": {"kind": "padic", "p": 3}, "marks": [{"point": "0", "mult": 2}], "b": "-1/3"})");
  MarkedPolynomial f = polynomial_from_json(a);
  CHECK(f.b() == Scalar(f.field(), Rational(-1, 3)));
  Json back = polynomial_to_json(f);
  MarkedPolynomial g = polynomial_from_json(back);
  CHECK(g.poly() == f.poly());
  CHECK(raw_polynomial_from_json(back) == f.poly());
  Json bad_p = Json::parse(R"({"backend": {"kind": "padic", "p": 4}, "marks": [{"point": "0"}]})");
  CHECK_THROWS_WITH_AS(polynomial_from_json(bad_p), doctest::Contains("prime"), Error);
  Json no_marks = Json::parse(R"({"backend": {"kind": "padic", "p": 3}, "b": "1"})");
  CHECK_THROWS_WITH_AS(polynomial_from_json(no_marks), doctest::Contains("marks"), Error);
  Json wrong = Json::parse(R"({"backend": {"kind": "padic", "p": 3}, "coefficients": ["0", "1", "0", "1"], "marks": [{"point": "0", "mult": 3}]})");
  CHECK_THROWS_WITH_AS(polynomial_from_json(wrong), doctest::Contains("InvalidMarks"), Error);
}

TEST_CASE("family file round trip") {
  Json j = Json::parse(R"({"backend": {"kind": "padic", "p": 3}, "disk": {"center": "0", "radius_exp": "5"},
    "coeff_polys": [["-1/3", "1"], ["0"], ["1"]], "mark_polys": [["0"]], "mults": [2]})");
  Family fam = family_from_json(j);
  CHECK(fam.degree() == 2);
  CHECK(family_to_json(fam) == j);
  Json broken = j;
  broken.erase("disk");
  CHECK_THROWS_WITH_AS(family_from_json(broken), doctest::Contains("InputError"), Error);
}
