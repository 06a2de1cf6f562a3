#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"

using namespace acml;

TEST_CASE("parse shapes and diagnostics") {
  CHECK(Expr::parse("-2*x2", 3).sexpr() == "(* (- 2) x2)");

  CHECK_THROWS_WITH_AS(Expr::parse("x1 +", 3), doctest::Contains("expected an operand"),
                       ParseError);
  try {
    Expr::parse("x1 +", 3);
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
    CHECK(!e.expected().empty());
  }

  try {
    Expr::parse("x4", 3);
    FAIL("expected range error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
    CHECK(std::string(e.what()).find("out of range") != std::string::npos);
  }

  CHECK_THROWS_AS(Expr::parse("", 3), ParseError);
  CHECK_THROWS_AS(Expr::parse("tan(x1)", 3), ParseError);
  CHECK_THROWS_AS(Expr::parse("x1^2.5", 3), ParseError);
  CHECK_THROWS_AS(Expr::parse("x1*", 3), ParseError);
  CHECK_THROWS_AS(Expr::parse("(x1+x2", 3), ParseError);
}

TEST_CASE("jet evaluation matches hand values") {
  const Expr sq = Expr::parse("x1^2", 3);
  Jet j = sq.jet({3.0, 0.0, 0.0}, 1);
  CHECK(j.value() == doctest::Approx(9.0));
  CHECK(j.partial1(0) == doctest::Approx(6.0));

  const Expr s3 = Expr::parse("sin(x3)", 3);
  j = s3.jet({0.0, 0.0, 0.0}, 2);
  CHECK(j.value() == doctest::Approx(0.0));
  CHECK(j.partial1(2) == doctest::Approx(1.0));
  const int mi[3] = {0, 0, 2};
  CHECK(j.partial({mi, 3}) == doctest::Approx(0.0));

  const Expr bil = Expr::parse("x1*x2", 3);
  j = bil.jet({3.0, 0.5, 0.0}, 2);
  const int mixed[3] = {1, 1, 0};
  CHECK(j.partial({mixed, 3}) == doctest::Approx(1.0));

  // order-0 jet equals plain evaluation
  const Expr mixedexp = Expr::parse("exp(x1)*sin(x2)+x3^3", 3);
  const Point p{0.3, -0.7, 1.2};
  CHECK(mixedexp.jet(p, 0).value() == doctest::Approx(mixedexp.value(p)));

  // third-order mixed partial, stored once per multi-set
  const Expr tri = Expr::parse("x1*x2*x3", 3);
  const int m111[3] = {1, 1, 1};
  CHECK(tri.jet(p, 3).partial({m111, 3}) == doctest::Approx(1.0));
}

TEST_CASE("central differences agree with jets") {
  const Expr sq = Expr::parse("x1^2", 3);
  CHECK(std::fabs(fd_partial(sq, {3.0, 0.0, 0.0}, 0, 1e-4) - 6.0) < 1e-7);
  const Expr s3 = Expr::parse("sin(x3)", 3);
  CHECK(std::fabs(fd_partial(s3, {0.0, 0.0, 0.0}, 2, 1e-4) - 1.0) < 1e-8);

  const std::vector<std::string> fixtures = {
      "-2*x2", "-x2", "1+0.1*sin(x3)", "1+0.1*x3", "x1*x2*x3",
      "sin(x1)*cos(x2)", "exp(0.3*x1)+x2^2", "sqrt(4+x1^2)", "x1/(2+x2^2)"};
  std::mt19937_64 rng(99);
  for (const auto& src : fixtures) {
    const Expr e = Expr::parse(src, 3);
    for (int trial = 0; trial < 100; ++trial) {
      Point p(3);
      for (auto& c : p) c = -1.0 + 2.0 * u01(rng());
      const Jet j = e.jet(p, 1);
      for (int d = 0; d < 3; ++d) {
        const double fd = fd_partial(e, p, d, 1e-4);
        CHECK(std::fabs(fd - j.partial1(d)) <= 1e-5);
      }
    }
  }
}

TEST_CASE("print / parse round trip is structurally stable") {
  const std::vector<std::string> cases = {
      "-2*x2",          "x1-(x2-x3)",    "(x1+x2)*x3",   "x1^-2",
      "-(x1*x2)",       "1/(1+x1^2)",    "sin(cos(exp(x1)))",
      "sqrt(1+x1^2)",   "x1/x2/x3",      "x1-x2-x3",     "2*x1^3-4*x2",
      "x1*(x2*x3)",     "x1/(x2*x3)",    "--x1",         "(-x1)^2",
      "0.1*sin(x3)+1",  "x2^0"};
  for (const auto& src : cases) {
    const Expr a = Expr::parse(src, 3);
    const Expr b = Expr::parse(a.print(), 3);
    CHECK_MESSAGE(a.structurally_equal(b), src, " -> ", a.print());
    CHECK(b.print() == a.print());
  }
}

TEST_CASE("jet chain rule on nested composites vs finite differences") {
  const Expr e = Expr::parse("sin(exp(x1)+x2^2)*sqrt(2+cos(x3))", 3);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    Point p(3);
    for (auto& c : p) c = -1.0 + 2.0 * u01(rng());
    const Jet j = e.jet(p, 2);
    for (int d = 0; d < 3; ++d) {
      CHECK(std::fabs(fd_partial(e, p, d, 1e-4) - j.partial1(d)) <= 1e-5);
      // second derivative via differences of first jets
      Point hi = p, lo = p;
      hi[d] += 1e-4;
      lo[d] -= 1e-4;
      const double fd2 =
          (e.jet(hi, 1).partial1(d) - e.jet(lo, 1).partial1(d)) / 2e-4;
      int mi[3] = {0, 0, 0};
      mi[d] = 2;
      CHECK(std::fabs(fd2 - j.partial({mi, 3})) <= 1e-5);
    }
  }
}

TEST_CASE("domain errors carry the offending subexpression") {
  const Expr div = Expr::parse("x2+1/x1", 3);
  try {
    div.jet({0.0, 1.0, 0.0}, 1);
    FAIL("expected domain error");
  } catch (const EvalError& e) {
    CHECK(e.subexpr().find("1/x1") != std::string::npos);
  }
  CHECK_THROWS_AS(Expr::parse("sqrt(0-x1)", 3).jet({1.0, 0.0, 0.0}, 0), EvalError);
  CHECK_THROWS_AS(Expr::parse("x1^-1", 3).jet({0.0, 0.0, 0.0}, 0), EvalError);
  // sqrt at zero: value fine at order 0, derivative singular
  const Expr root = Expr::parse("sqrt(x1)", 3);
  CHECK(root.jet({0.0, 0.0, 0.0}, 0).value() == doctest::Approx(0.0));
  CHECK_THROWS_AS(root.jet({0.0, 0.0, 0.0}, 1), EvalError);
}
