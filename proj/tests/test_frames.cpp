#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"

using namespace acml;
using namespace testutil;

TEST_CASE("chart construction validates the frame coefficients") {
  CHECK_NOTHROW(AdaptedChart::from_exprs(3, {"-2*x2", "0"}));
  CHECK_NOTHROW(AdaptedChart::from_exprs(5, {"-x2", "0", "-x4", "0"}));
  CHECK_THROWS_AS(AdaptedChart::from_exprs(3, {"x3", "0"}), GeometryError);
  CHECK_THROWS_AS(AdaptedChart::from_exprs(4, {"0", "0", "0"}), GeometryError);
  CHECK_THROWS_AS(AdaptedChart::from_exprs(3, {"0"}), GeometryError);
}

TEST_CASE("frame derivatives") {
  const AdaptedChart b = AdaptedChart::from_exprs(3, {"-2*x2", "0"});
  const ScalarField x3 = ScalarField::coordinate(2);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    Point p(3);
    for (auto& c : p) c = -1.0 + 2.0 * u01(rng());
    CHECK(b.frame_apply(0, x3, p) == doctest::Approx(2.0 * p[1]));  // e1 = d1 + 2 x2 d3
    CHECK(b.frame_apply(1, ScalarField::constant(4.2), p) == doctest::Approx(0.0));
  }

  // conformal factor on fixture D: e1 lambda = 0.1 x2 cos(x3)
  const AdaptedChart d = AdaptedChart::from_exprs(3, {"-x2", "0"});
  const Expr lam_expr = Expr::parse("1+0.1*sin(x3)", 3);
  const ScalarField lam = ScalarField::from_expr(lam_expr);
  CHECK(d.frame_apply(0, lam, {0.0, 1.0, 0.0}) == doctest::Approx(0.1));
  for (int t = 0; t < 20; ++t) {
    Point p(3);
    for (auto& c : p) c = -1.0 + 2.0 * u01(rng());
    // oracle: e_a f = d_a f - gamma_a d_n f with central differences
    const double fd = fd_partial(lam_expr, p, 0, 1e-4) +
                      p[1] * fd_partial(lam_expr, p, 2, 1e-4);
    CHECK(std::fabs(d.frame_apply(0, lam, p) - fd) < 1e-8);
  }
}

TEST_CASE("lie brackets of frame fields") {
  const AdaptedChart b = AdaptedChart::from_exprs(3, {"-2*x2", "0"});
  const auto e1 = FrameVectorField::frame(b, 0);
  const auto e2 = FrameVectorField::frame(b, 1);
  const auto xi = FrameVectorField::vertical_field(b);

  const Point p{0.3, -0.4, 0.9};
  const FrameVectorValue b12 = lie_bracket(e1, e2, p);
  CHECK(b12.horizontal[0] == doctest::Approx(0.0));
  CHECK(b12.horizontal[1] == doctest::Approx(0.0));
  CHECK(b12.vertical == doctest::Approx(-2.0));

  CHECK(lie_bracket(e1, e1, p).norm() == doctest::Approx(0.0));
  CHECK(lie_bracket(e1, xi, p).norm() == doctest::Approx(0.0));
}

TEST_CASE("bracket antisymmetry and Jacobi on random polynomial fields") {
  const AdaptedChart chart = AdaptedChart::from_exprs(3, {"-2*x2", "0"});
  auto field = [&](uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto expr = [&]() {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%.4f+%.4f*x%d*x%d",
                    -1.0 + 2.0 * u01(rng()), -1.0 + 2.0 * u01(rng()),
                    1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 3));
      return ScalarField::from_expr(Expr::parse(buf, 3));
    };
    FrameVectorField v = FrameVectorField::zero(chart);
    v.horizontal[0] = expr();
    v.horizontal[1] = expr();
    v.vertical = expr();
    return v;
  };
  const auto x = field(11), y = field(12), z = field(13);

  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    Point p(3);
    for (auto& c : p) c = -1.0 + 2.0 * u01(rng());
    FrameVectorValue ab = lie_bracket(x, y, p);
    FrameVectorValue ba = lie_bracket(y, x, p);
    ab += ba;
    CHECK(ab.norm() <= 1e-12);

    FrameVectorValue jac = lie_bracket(lie_bracket(x, y), z, p);
    jac += lie_bracket(lie_bracket(y, z), x, p);
    jac += lie_bracket(lie_bracket(z, x), y, p);
    CHECK(jac.norm() <= 1e-8);
  }
}

TEST_CASE("omega and the non-holonomicity tensor") {
  const AdaptedChart a = AdaptedChart::from_exprs(3, {"0", "0"});
  const AdaptedChart b = AdaptedChart::from_exprs(3, {"-2*x2", "0"});
  const AdaptedChart c = AdaptedChart::from_exprs(3, {"-x2", "0"});
  const Point p{0.2, 0.5, -0.3};
  CHECK(omega_from_chart(b)({0, 1}).value(p) == doctest::Approx(1.0));
  CHECK(omega_from_chart(a)({0, 1}).value(p) == doctest::Approx(0.0));
  CHECK(omega_from_chart(c)({0, 1}).value(p) == doctest::Approx(0.5));
  CHECK(nonholonomicity(b)({0, 1}).value(p) == doctest::Approx(-2.0));

  // the defining identity [e_a, e_b] = 2 omega_{ba} d_n on every fixture
  for (const auto& s : all_fixtures()) {
    const AdaptedChart& chart = s.chart();
    const int m = chart.frame_dim();
    const auto pts = sample_points(spec_for(s));
    EvalCache cache;
    const AdmissibleTensorField mt = nonholonomicity(chart);
    for (const auto& q : pts) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          const auto br = lie_bracket(FrameVectorField::frame(chart, i),
                                      FrameVectorField::frame(chart, j), q, &cache);
          for (int k = 0; k < m; ++k) CHECK(std::fabs(br.horizontal[k]) <= 1e-10);
          CHECK(std::fabs(br.vertical - 2.0 * chart.omega(j, i).value(q, &cache)) <=
                1e-10);
          CHECK(std::fabs(mt({i, j}).value(q, &cache) + mt({j, i}).value(q, &cache)) <=
                1e-14);
        }
        const auto bv = lie_bracket(FrameVectorField::frame(chart, i),
                                    FrameVectorField::vertical_field(chart), q, &cache);
        CHECK(bv.norm() <= 1e-10);
      }
    }
  }
}

TEST_CASE("pointwise metric inversion") {
  const AdaptedChart chart = AdaptedChart::from_exprs(5, {"-x2", "0", "-x4", "0"});
  const auto f = fixture_f();
  const Point p{0.1, 0.2, 0.4, -0.2, 0.6};
  const double u = 1.0 + 0.1 * p[2];
  const Eigen::MatrixXd inv = invert_admissible_metric(f.metric(), p);
  CHECK(inv(0, 0) == doctest::Approx(1.0 / u));
  CHECK(inv(1, 1) == doctest::Approx(1.0 / u));
  CHECK(inv(2, 2) == doctest::Approx(1.0));
  CHECK(inv(0, 1) == doctest::Approx(0.0));

  // identity metric inverts to the identity
  const auto b = fixture_b();
  CHECK((invert_admissible_metric(b.metric(), {0, 0, 0}) -
         Eigen::MatrixXd::Identity(2, 2)).norm() == doctest::Approx(0.0));

  // degenerate at a point: structured error
  const AdaptedChart c3 = AdaptedChart::from_exprs(3, {"0", "0"});
  std::vector<ScalarField> comps = {
      ScalarField::from_expr(Expr::parse("x1", 3)), ScalarField::constant(0.0),
      ScalarField::constant(0.0), ScalarField::constant(1.0)};
  const AdmissibleTensorField g(c3, 0, 2, comps);
  CHECK_THROWS_AS(invert_admissible_metric(g, {-1.0, 0.0, 0.0}), GeometryError);
}

TEST_CASE("exterior derivative: the d(eta) pin and closedness") {
  for (const auto& s : all_fixtures()) {
    const AdaptedChart& chart = s.chart();
    const int m = chart.frame_dim();
    const FrameForm deta = exterior_derivative(eta_form(chart));
    const FrameForm ddeta = exterior_derivative(deta);
    EvalCache cache;
    for (const auto& p : sample_points(spec_for(s, 50))) {
      for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b)
          CHECK(std::fabs(deta({a, b}).value(p, &cache) -
                          chart.omega(a, b).value(p, &cache)) <= 1e-12);
        CHECK(std::fabs(deta({a, m}).value(p, &cache)) <= 1e-12);
      }
      CHECK(ddeta.frobenius(p, &cache) <= 1e-9);  // d(d eta) = 0
    }
  }

  // fixture C: the fundamental form is constant, d Omega = 0
  const auto c = fixture_c();
  const FrameForm dom_c = exterior_derivative(fundamental_form(c));
  for (const auto& p : sample_points(spec_for(c, 25)))
    CHECK(dom_c.frobenius(p) <= 1e-12);

  // fixture D: the only surviving component is the vertical one,
  // (1/3) d_n Omega_12 = -0.1 cos(x3) / 3
  const auto d = fixture_d();
  const FrameForm dom_d = exterior_derivative(fundamental_form(d));
  for (const auto& p : sample_points(spec_for(d, 25))) {
    const double expect = -0.1 * std::cos(p[2]) / 3.0;
    CHECK(dom_d({0, 1, 2}).value(p) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("frame form value and norms") {
  const auto b = fixture_b();
  FrameForm omega2 = fundamental_form(b);
  const Point p{0.0, 0.0, 0.0};
  // Omega(e1, e2) = g_{1c} phi^c_2 = 1 on fixture B
  const FrameVectorValue args[2] = {slotv(2, 0), slotv(2, 1)};
  CHECK(omega2.value({args, 2}, p) == doctest::Approx(1.0));
  // antisymmetric evaluation
  const FrameVectorValue rev[2] = {slotv(2, 1), slotv(2, 0)};
  CHECK(omega2.value({rev, 2}, p) == doctest::Approx(-1.0));
}
