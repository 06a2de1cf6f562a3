#include "acml/structure.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>

namespace acml {

AlmostContactStructure::AlmostContactStructure(AdaptedChart chart,
                                               AdmissibleTensorField g,
                                               AdmissibleTensorField phi)
    : chart_(std::move(chart)), g_(std::move(g)), phi_(std::move(phi)) {
  if (!g_.chart().same_as(chart_) || !phi_.chart().same_as(chart_))
    throw GeometryError("structure fields must live on the structure chart");
  if (g_.upper() != 0 || g_.lower() != 2)
    throw GeometryError("metric must be a (0,2) field");
  if (phi_.upper() != 1 || phi_.lower() != 1)
    throw GeometryError("endomorphism must be a (1,1) field");
  omega_ = omega_from_chart(chart_);
  MatrixFieldInverse inv(g_.components(), chart_.frame_dim(), /*require_spd=*/true);
  const int m = chart_.frame_dim();
  ginv_.reserve(static_cast<size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) ginv_.push_back(inv.entry(i, j));
}

std::vector<Diagnostic> validate_structure(const AlmostContactStructure& s,
                                           const std::vector<Point>& points,
                                           double tol) {
  std::vector<Diagnostic> out;
  const int m = s.frame_dim();
  EvalCache cache;
  Eigen::MatrixXd gm(m, m), ph(m, m);
  for (const Point& p : points) {
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        gm(a, b) = s.metric()({a, b}).value(p, &cache);
        ph(a, b) = s.phi()({a, b}).value(p, &cache);
      }
    const double sym = (gm - gm.transpose()).cwiseAbs().maxCoeff();
    if (sym > tol)
      out.push_back({"metric not symmetric", p, sym});
    const double sq =
        (ph * ph + Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
    if (sq > tol)
      out.push_back({"phi^2 + id != 0 on the distribution", p, sq});
    const double compat = (ph.transpose() * gm * ph - gm).cwiseAbs().maxCoeff();
    if (compat > tol)
      out.push_back({"metric not phi-compatible", p, compat});
    Eigen::LLT<Eigen::MatrixXd> llt(gm);
    if (llt.info() != Eigen::Success) {
      out.push_back({"metric not positive definite", p, 0.0});
      continue;
    }
    // Omega antisymmetry is a consequence of compatibility; checked anyway
    Eigen::MatrixXd om = gm * ph;
    const double anti = (om + om.transpose()).cwiseAbs().maxCoeff();
    if (anti > tol)
      out.push_back({"fundamental form not antisymmetric", p, anti});
  }
  return out;
}

FrameForm fundamental_form(const AlmostContactStructure& s) {
  const int m = s.frame_dim();
  FrameForm omega2(s.chart(), 2);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      ScalarField v = ScalarField::constant(0.0);
      for (int c = 0; c < m; ++c) v = v + s.metric()({a, c}) * s.phi()({c, b});
      omega2({a, b}) = v;
    }
  // vertical slots stay zero: Omega(xi, .) = 0
  return omega2;
}

NijenhuisComponents nijenhuis_adapted(const AlmostContactStructure& s) {
  const AdaptedChart& chart = s.chart();
  const int m = s.frame_dim();
  const int vert = chart.vertical();
  const auto& phi = s.phi();

  // shared frame derivatives dphi[c][e][b] = e_c phi^e_b
  std::vector<ScalarField> dphi(static_cast<size_t>(m) * m * m);
  auto dp = [&](int c, int e, int b) -> ScalarField& {
    return dphi[(static_cast<size_t>(c) * m + e) * m + b];
  };
  for (int c = 0; c < m; ++c)
    for (int e = 0; e < m; ++e)
      for (int b = 0; b < m; ++b)
        dp(c, e, b) = chart.frame_derivative(c, phi({e, b}));

  AdmissibleTensorField hor_ab = AdmissibleTensorField::zeros(chart, 1, 2);
  AdmissibleTensorField vert_ab = AdmissibleTensorField::zeros(chart, 0, 2);
  AdmissibleTensorField hor_na = AdmissibleTensorField::zeros(chart, 1, 1);

  for (int e = 0; e < m; ++e)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        ScalarField v = ScalarField::constant(0.0);
        for (int c = 0; c < m; ++c) {
          v = v + phi({c, a}) * dp(c, e, b) - phi({c, b}) * dp(c, e, a) +
              phi({e, c}) * dp(b, c, a) - phi({e, c}) * dp(a, c, b);
        }
        hor_ab({e, a, b}) = v;
      }

  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      ScalarField v = ScalarField::constant(0.0);
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d)
          v = v + phi({c, a}) * phi({d, b}) * s.omega()({d, c});
      vert_ab({a, b}) = 2.0 * v;
    }

  for (int e = 0; e < m; ++e)
    for (int a = 0; a < m; ++a) {
      ScalarField v = ScalarField::constant(0.0);
      for (int c = 0; c < m; ++c)
        v = v + phi({e, c}) * phi({c, a}).partial(vert);
      hor_na({e, a}) = -v;
    }

  return {std::move(hor_ab), std::move(vert_ab), std::move(hor_na)};
}

FrameVectorField apply_phi(const AlmostContactStructure& s,
                           const FrameVectorField& x) {
  const int m = s.frame_dim();
  FrameVectorField out = FrameVectorField::zero(s.chart());
  for (int a = 0; a < m; ++a) {
    ScalarField v = ScalarField::constant(0.0);
    for (int b = 0; b < m; ++b) v = v + s.phi()({a, b}) * x.horizontal[b];
    out.horizontal[a] = v;
  }
  return out;
}

FrameVectorField nijenhuis_direct(const AlmostContactStructure& s,
                                  const FrameVectorField& x,
                                  const FrameVectorField& y) {
  const FrameVectorField px = apply_phi(s, x);
  const FrameVectorField py = apply_phi(s, y);
  FrameVectorField out = lie_bracket(px, py);
  const FrameVectorField bxy = apply_phi(s, apply_phi(s, lie_bracket(x, y)));
  const FrameVectorField bpxy = apply_phi(s, lie_bracket(px, y));
  const FrameVectorField bxpy = apply_phi(s, lie_bracket(x, py));
  const int m = s.frame_dim();
  for (int a = 0; a < m; ++a)
    out.horizontal[a] =
        out.horizontal[a] + bxy.horizontal[a] - bpxy.horizontal[a] - bxpy.horizontal[a];
  out.vertical = out.vertical + bxy.vertical - bpxy.vertical - bxpy.vertical;
  return out;
}

FrameVectorValue nijenhuis_direct(const AlmostContactStructure& s,
                                  const FrameVectorField& x,
                                  const FrameVectorField& y, const Point& p,
                                  EvalCache* cache) {
  return eval(nijenhuis_direct(s, x, y), p, cache);
}

ScalarField lie_derivative_eta(const FrameVectorField& x,
                               const FrameVectorField& y) {
  const AdaptedChart& chart = x.chart;
  const int m = chart.frame_dim();
  // x(eta(y)) with x = x^a e_a + x^n d_n
  ScalarField xf = x.vertical * y.vertical.partial(chart.vertical());
  for (int a = 0; a < m; ++a)
    xf = xf + x.horizontal[a] * chart.frame_derivative(a, y.vertical);
  return xf - lie_bracket(x, y).vertical;
}

NormalityTensors normality_tensors(const AlmostContactStructure& s) {
  const AdaptedChart& chart = s.chart();
  const int m = s.frame_dim();
  NijenhuisComponents nij = nijenhuis_adapted(s);

  AdmissibleTensorField n1_vert = AdmissibleTensorField::zeros(chart, 0, 2);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      n1_vert({a, b}) = nij.vert_ab({a, b}) + 2.0 * chart.omega(a, b);

  // N2 via the Lie-derivative definition on frame pairs
  AdmissibleTensorField n2 = AdmissibleTensorField::zeros(chart, 0, 2);
  std::vector<FrameVectorField> frame;
  frame.reserve(m);
  for (int a = 0; a < m; ++a) frame.push_back(FrameVectorField::frame(chart, a));
  for (int a = 0; a < m; ++a) {
    const FrameVectorField pa = apply_phi(s, frame[a]);
    for (int b = 0; b < m; ++b) {
      const FrameVectorField pb = apply_phi(s, frame[b]);
      n2({a, b}) = lie_derivative_eta(pa, frame[b]) - lie_derivative_eta(pb, frame[a]);
    }
  }

  return {nij.hor_ab, std::move(n1_vert), std::move(n2), nij.hor_ab, nij.hor_na};
}

double pn_identity_residual(const AlmostContactStructure& s, const Point& p,
                            EvalCache* cache) {
  // vertical slot of N_phi + 2 d eta(phi., phi.) (x) xi must vanish;
  // horizontal slots agree identically with the projection
  const int m = s.frame_dim();
  NijenhuisComponents nij = nijenhuis_adapted(s);
  double worst = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double twist = 0.0;
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d)
          twist += s.phi()({c, a}).value(p, cache) *
                   s.phi()({d, b}).value(p, cache) *
                   s.omega()({c, d}).value(p, cache);
      const double v = nij.vert_ab({a, b}).value(p, cache) + 2.0 * twist;
      worst = std::max(worst, std::fabs(v));
    }
  return worst;
}

DerivedFields derived_fields(const AlmostContactStructure& s) {
  const AdaptedChart& chart = s.chart();
  const int m = s.frame_dim();
  const int vert = chart.vertical();

  AdmissibleTensorField h = AdmissibleTensorField::zeros(chart, 1, 1);
  AdmissibleTensorField c = AdmissibleTensorField::zeros(chart, 0, 2);
  AdmissibleTensorField csharp = AdmissibleTensorField::zeros(chart, 1, 1);
  AdmissibleTensorField psi = AdmissibleTensorField::zeros(chart, 1, 1);

  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      h({a, b}) = 0.5 * s.phi()({a, b}).partial(vert);
      c({a, b}) = 0.5 * s.metric()({a, b}).partial(vert);
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      ScalarField cs = ScalarField::constant(0.0);
      ScalarField ps = ScalarField::constant(0.0);
      for (int d = 0; d < m; ++d) {
        cs = cs + s.inverse_metric(d, a) * c({d, b});
        ps = ps + s.inverse_metric(d, b) * s.omega()({d, a});
      }
      csharp({a, b}) = cs;
      psi({b, a}) = ps;  // psi^b_a = g^{db} omega_{da}
    }
  return {std::move(h), std::move(c), std::move(csharp), std::move(psi)};
}

}  // namespace acml
