#include "acml/connection.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>

namespace acml {

InteriorConnection::InteriorConnection(AdaptedChart chart,
                                       std::vector<ScalarField> coeff)
    : chart_(std::move(chart)), coeff_(std::move(coeff)) {
  const size_t m = chart_.frame_dim();
  if (coeff_.size() != m * m * m)
    throw GeometryError("connection coefficient count mismatch");
}

namespace {

InteriorConnection metric_connection_impl(const AdaptedChart& chart,
                                          const AdmissibleTensorField& g,
                                          const std::vector<ScalarField>& ginv) {
  const int m = chart.frame_dim();
  // shared frame derivatives dg[b][c][d] = e_b g_{cd}
  std::vector<ScalarField> dg(static_cast<size_t>(m) * m * m);
  auto dgat = [&](int b, int c, int d) -> ScalarField& {
    return dg[(static_cast<size_t>(b) * m + c) * m + d];
  };
  for (int b = 0; b < m; ++b)
    for (int c = 0; c < m; ++c)
      for (int d = 0; d < m; ++d)
        dgat(b, c, d) = chart.frame_derivative(b, g({c, d}));

  std::vector<ScalarField> coeff(static_cast<size_t>(m) * m * m);
  auto at = [&](int a, int b, int c) -> ScalarField& {
    return coeff[(static_cast<size_t>(a) * m + b) * m + c];
  };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = b; c < m; ++c) {
        ScalarField s = ScalarField::constant(0.0);
        for (int d = 0; d < m; ++d)
          s = s + ginv[static_cast<size_t>(a) * m + d] *
                      (dgat(b, c, d) + dgat(c, b, d) - dgat(d, b, c));
        at(a, b, c) = 0.5 * s;
        if (c != b) at(a, c, b) = at(a, b, c);  // shared: torsion-free by sharing
      }
  return InteriorConnection(chart, std::move(coeff));
}

}  // namespace

InteriorConnection interior_metric_connection(const AlmostContactStructure& s) {
  const int m = s.frame_dim();
  std::vector<ScalarField> ginv;
  ginv.reserve(static_cast<size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) ginv.push_back(s.inverse_metric(i, j));
  return metric_connection_impl(s.chart(), s.metric(), ginv);
}

InteriorConnection interior_metric_connection(const AdaptedChart& chart,
                                              const AdmissibleTensorField& g) {
  const int m = chart.frame_dim();
  MatrixFieldInverse inv(g.components(), m, /*require_spd=*/true);
  std::vector<ScalarField> ginv;
  ginv.reserve(static_cast<size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) ginv.push_back(inv.entry(i, j));
  return metric_connection_impl(chart, g, ginv);
}

AdmissibleTensorField torsion(const InteriorConnection& c) {
  const int m = c.dims();
  AdmissibleTensorField s = AdmissibleTensorField::zeros(c.chart(), 1, 2);
  for (int e = 0; e < m; ++e)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        s({e, a, b}) = c.gamma(e, a, b) - c.gamma(e, b, a);
  return s;
}

AdmissibleTensorField covariant_derivative(const InteriorConnection& c,
                                           const AdmissibleTensorField& t) {
  const AdaptedChart& chart = c.chart();
  const int m = c.dims();
  const int rank = t.rank();
  AdmissibleTensorField out =
      AdmissibleTensorField::zeros(chart, t.upper(), t.lower() + 1);

  std::vector<int> idx(rank, 0), inner(rank, 0);
  while (true) {
    for (int d = 0; d < m; ++d) {
      ScalarField s = chart.frame_derivative(d, t.at(idx));
      for (int slot = 0; slot < rank; ++slot) {
        inner = idx;
        for (int e = 0; e < m; ++e) {
          inner[slot] = e;
          if (slot < t.upper())
            s = s + c.gamma(idx[slot], d, e) * t.at(inner);
          else
            s = s - c.gamma(e, d, idx[slot]) * t.at(inner);
        }
      }
      std::vector<int> oidx(idx);
      oidx.push_back(d);
      out.at(oidx) = s;
    }
    int k = rank - 1;
    while (k >= 0 && idx[k] == m - 1) idx[k--] = 0;
    if (k < 0) break;
    ++idx[k];
  }
  return out;
}

ExtendedDerivative extended_derivative(const ExtendedConnection& ec,
                                       const AdmissibleTensorField& t) {
  const AdaptedChart& chart = ec.interior.chart();
  const int vert = chart.vertical();
  AdmissibleTensorField xi =
      AdmissibleTensorField::zeros(chart, t.upper(), t.lower());
  for (size_t i = 0; i < t.components().size(); ++i)
    xi.components()[i] = t.components()[i].partial(vert);
  return {covariant_derivative(ec.interior, t), std::move(xi)};
}

double extended_derivative_residual(const ExtendedDerivative& d, const Point& p,
                                    EvalCache* cache) {
  double worst = 0.0;
  for (const auto& c : d.horizontal.components())
    worst = std::max(worst, std::fabs(c.value(p, cache)));
  for (const auto& c : d.xi.components())
    worst = std::max(worst, std::fabs(c.value(p, cache)));
  return worst;
}

std::vector<double> FrameConnection::values(const Point& p,
                                            EvalCache* cache) const {
  std::vector<double> out(coeff.size());
  for (size_t i = 0; i < coeff.size(); ++i) out[i] = coeff[i].value(p, cache);
  return out;
}

FrameConnection levi_civita_adapted(const AlmostContactStructure& s) {
  const AdaptedChart& chart = s.chart();
  const int n = chart.dim();
  const int m = n - 1;
  FrameConnection fc{chart, std::vector<ScalarField>(
                                static_cast<size_t>(n) * n * n,
                                ScalarField::constant(0.0))};
  const InteriorConnection conn = interior_metric_connection(s);
  const DerivedFields der = derived_fields(s);

  for (int c = 0; c < m; ++c)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) fc.at(c, a, b) = conn.gamma(c, a, b);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      fc.at(m, a, b) = s.omega()({b, a}) - der.c({a, b});
      const ScalarField mixed = der.csharp({b, a}) - der.psi({b, a});
      fc.at(b, a, m) = mixed;  // nabla_{e_a} xi
      fc.at(b, m, a) = mixed;  // nabla_xi e_a
    }
  // remaining vertical-slot coefficients vanish for a metric structure
  return fc;
}

LeviCivitaOracle::LeviCivitaOracle(const AlmostContactStructure& s)
    : chart_(s.chart()) {
  const int n = chart_.dim();
  const int m = n - 1;
  gfull_.assign(static_cast<size_t>(n) * n, ScalarField::constant(0.0));
  auto at = [&](int i, int j) -> ScalarField& {
    return gfull_[static_cast<size_t>(i) * n + j];
  };
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b)
      at(a, b) = s.metric()({a, b}) + chart_.gamma(a) * chart_.gamma(b);
    at(a, m) = chart_.gamma(a);
    at(m, a) = chart_.gamma(a);
  }
  at(m, m) = ScalarField::constant(1.0);
}

std::vector<double> LeviCivitaOracle::values(const Point& p,
                                             EvalCache* cache) const {
  const int n = chart_.dim();
  const int m = n - 1;

  // order-1 jets of the coordinate metric
  std::vector<Jet> gj(gfull_.size());
  Eigen::MatrixXd g0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      gj[i * n + j] = gfull_[i * n + j].jet(p, 1, cache);
      g0(i, j) = gj[i * n + j].value();
    }
  Eigen::LLT<Eigen::MatrixXd> llt(g0);
  if (llt.info() != Eigen::Success)
    throw GeometryError("full metric not positive definite");
  Eigen::MatrixXd ginv = llt.solve(Eigen::MatrixXd::Identity(n, n));

  auto dg = [&](int al, int be, int de) {  // d_de g_{al be}
    return gj[al * n + be].partial1(de);
  };
  // coordinate Christoffels
  std::vector<double> chris(static_cast<size_t>(n) * n * n, 0.0);
  auto ch = [&](int ga, int al, int be) -> double& {
    return chris[(static_cast<size_t>(ga) * n + al) * n + be];
  };
  for (int ga = 0; ga < n; ++ga)
    for (int al = 0; al < n; ++al)
      for (int be = 0; be < n; ++be) {
        double sum = 0.0;
        for (int de = 0; de < n; ++de)
          sum += ginv(ga, de) * (dg(be, de, al) + dg(al, de, be) - dg(al, be, de));
        ch(ga, al, be) = 0.5 * sum;
      }

  // frame matrix A^beta_alpha (columns = frame slots) and inverse B
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  std::vector<Jet> gammaj(m);
  for (int a = 0; a < m; ++a) {
    gammaj[a] = chart_.gamma(a).jet(p, 1, cache);
    A(m, a) = -gammaj[a].value();
    B(m, a) = gammaj[a].value();
  }

  std::vector<double> out(static_cast<size_t>(n) * n * n, 0.0);
  auto oat = [&](int ga, int al, int be) -> double& {
    return out[(static_cast<size_t>(ga) * n + al) * n + be];
  };
  for (int al = 0; al < n; ++al)
    for (int be = 0; be < n; ++be) {
      // M^de = A^eps_al ( d_eps A^de_be + A^ze_be Gamma^de_{eps ze} )
      std::vector<double> mvec(n, 0.0);
      for (int de = 0; de < n; ++de) {
        double sum = 0.0;
        for (int eps = 0; eps < n; ++eps) {
          const double Aeps = A(eps, al);
          if (Aeps == 0.0) continue;
          double inner = 0.0;
          // d_eps A^de_be nonzero only for de == n-1 (the -gamma_be entry)
          if (de == m && be < m) inner -= gammaj[be].partial1(eps);
          for (int ze = 0; ze < n; ++ze) {
            const double Aze = A(ze, be);
            if (Aze != 0.0) inner += Aze * ch(de, eps, ze);
          }
          sum += Aeps * inner;
        }
        mvec[de] = sum;
      }
      for (int ga = 0; ga < n; ++ga) {
        double v = 0.0;
        for (int de = 0; de < n; ++de) v += B(ga, de) * mvec[de];
        oat(ga, al, be) = v;
      }
    }
  return out;
}

AdmissibleTensorField schouten_curvature(const InteriorConnection& c) {
  const AdaptedChart& chart = c.chart();
  const int m = c.dims();
  AdmissibleTensorField r = AdmissibleTensorField::zeros(chart, 1, 3);
  for (int d = 0; d < m; ++d)
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        for (int cc = 0; cc < m; ++cc) {
          ScalarField s = chart.frame_derivative(a, c.gamma(d, b, cc)) -
                          chart.frame_derivative(b, c.gamma(d, a, cc));
          for (int e = 0; e < m; ++e)
            s = s + c.gamma(e, b, cc) * c.gamma(d, a, e) -
                c.gamma(e, a, cc) * c.gamma(d, b, e);
          r({d, a, b, cc}) = s;
          r({d, b, a, cc}) = -s;  // antisymmetry holds exactly, by sharing
        }
  return r;
}

AdmissibleTensorField p_tensor(const InteriorConnection& c) {
  const AdaptedChart& chart = c.chart();
  const int m = c.dims();
  const int vert = chart.vertical();
  AdmissibleTensorField pt = AdmissibleTensorField::zeros(chart, 1, 2);
  for (int b = 0; b < m; ++b)
    for (int a = 0; a < m; ++a)
      for (int cc = 0; cc < m; ++cc)
        pt({b, a, cc}) = c.gamma(b, a, cc).partial(vert);
  return pt;
}

// ---------------------------------------------------------------------------
// parallel transport

Point ParametricCurve::position(double t) const {
  Point p(components.size());
  const Point tp{t};
  for (size_t i = 0; i < components.size(); ++i) p[i] = components[i].value(tp);
  return p;
}

std::vector<double> ParametricCurve::velocity(double t) const {
  std::vector<double> v(components.size());
  const Point tp{t};
  for (size_t i = 0; i < components.size(); ++i)
    v[i] = components[i].jet(tp, 1).partial1(0);
  return v;
}

Polyline square_loop(const Point& center, int i, int j, double side) {
  const double h = side / 2.0;
  Polyline loop;
  auto corner = [&](double di, double dj) {
    Point p = center;
    p[i] += di;
    p[j] += dj;
    return p;
  };
  loop.points = {corner(-h, -h), corner(h, -h), corner(h, h), corner(-h, h),
                 corner(-h, -h)};
  return loop;
}

namespace {

// one RK4 run over [0,1] with position/velocity callbacks
template <typename Pos, typename Vel>
std::vector<double> rk4_transport(const InteriorConnection& conn, Pos pos,
                                  Vel vel, std::vector<double> v, int steps) {
  const int m = conn.dims();
  EvalCache cache;
  auto deriv = [&](double t, const std::vector<double>& state) {
    const Point x = pos(t);
    const std::vector<double> u = vel(t);
    std::vector<double> dv(m, 0.0);
    for (int a = 0; a < m; ++a) {
      double s = 0.0;
      for (int b = 0; b < m; ++b) {
        if (u[b] == 0.0) continue;
        for (int c = 0; c < m; ++c)
          s += conn.gamma(a, b, c).value(x, &cache) * u[b] * state[c];
      }
      dv[a] = -s;
    }
    return dv;
  };
  const double h = 1.0 / steps;
  std::vector<double> k1, k2, k3, k4, tmp(m);
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    k1 = deriv(t, v);
    for (int i = 0; i < m; ++i) tmp[i] = v[i] + 0.5 * h * k1[i];
    k2 = deriv(t + 0.5 * h, tmp);
    for (int i = 0; i < m; ++i) tmp[i] = v[i] + 0.5 * h * k2[i];
    k3 = deriv(t + 0.5 * h, tmp);
    for (int i = 0; i < m; ++i) tmp[i] = v[i] + h * k3[i];
    k4 = deriv(t + h, tmp);
    for (int i = 0; i < m; ++i)
      v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return v;
}

}  // namespace

std::vector<double> parallel_transport(const ExtendedConnection& ec,
                                       const ParametricCurve& curve,
                                       std::vector<double> v0, int steps) {
  if (steps < 2) throw GeometryError("parallel_transport: need at least 2 steps");
  if (static_cast<int>(v0.size()) != ec.interior.dims())
    throw GeometryError("parallel_transport: vector dimension mismatch");
  const double t0 = curve.t0, span = curve.t1 - curve.t0;
  return rk4_transport(
      ec.interior, [&](double t) { return curve.position(t0 + span * t); },
      [&](double t) {
        auto v = curve.velocity(t0 + span * t);
        for (double& x : v) x *= span;
        return v;
      },
      std::move(v0), steps);
}

std::vector<double> parallel_transport(const ExtendedConnection& ec,
                                       const Polyline& curve,
                                       std::vector<double> v0, int steps) {
  if (steps < 2) throw GeometryError("parallel_transport: need at least 2 steps");
  if (curve.points.size() < 2)
    throw GeometryError("parallel_transport: polyline needs two points");
  const int nseg = static_cast<int>(curve.points.size()) - 1;
  const int per = std::max(2, steps / nseg);
  std::vector<double> v = std::move(v0);
  for (int s = 0; s < nseg; ++s) {
    const Point& a = curve.points[s];
    const Point& b = curve.points[s + 1];
    std::vector<double> dir(a.size());
    for (size_t i = 0; i < a.size(); ++i) dir[i] = b[i] - a[i];
    v = rk4_transport(
        ec.interior,
        [&](double t) {
          Point p(a.size());
          for (size_t i = 0; i < a.size(); ++i) p[i] = a[i] + t * dir[i];
          return p;
        },
        [&](double) { return dir; }, std::move(v), per);
  }
  return v;
}

}  // namespace acml
