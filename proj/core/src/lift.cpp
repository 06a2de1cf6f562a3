#include "acml/lift.hpp"

#include <cmath>

namespace acml {

namespace {

// shared zero; keeps folded DAGs small
const ScalarField kZero = ScalarField::constant(0.0);

}  // namespace

LiftedSpace::LiftedSpace(AlmostContactStructure base, InteriorConnection connection)
    : base_(std::move(base)), conn_(std::move(connection)) {
  if (!conn_.chart().same_as(base_.chart()))
    throw GeometryError("lift: connection must live on the base chart");
  const int n = base_.chart().dim();
  const int m = n - 1;
  const int bigm = 2 * m;  // lifted frame dimension

  coord_map_.resize(n);
  for (int i = 0; i < m; ++i) coord_map_[i] = i;
  coord_map_[m] = 2 * n - 2;  // x^n moves last

  // lifted chart: base frame coefficients pulled back, zero on fiber slots
  std::vector<ScalarField> gam(bigm, kZero);
  for (int a = 0; a < m; ++a) gam[a] = pullback(base_.chart().gamma(a), coord_map_);
  AdaptedChart lifted_chart(2 * n - 1, std::move(gam));

  // G^b_a = Gamma^b_{ac} x^{fiber c}
  gcoeff_.assign(static_cast<size_t>(m) * m, kZero);
  for (int b = 0; b < m; ++b)
    for (int a = 0; a < m; ++a) {
      ScalarField s = kZero;
      for (int c = 0; c < m; ++c)
        s = s + pullback(conn_.gamma(b, a, c), coord_map_) *
                    ScalarField::coordinate(fiber_coord(c));
      gcoeff_[static_cast<size_t>(b) * m + a] = s;
    }
  auto G = [&](int b, int a) -> const ScalarField& {
    return gcoeff_[static_cast<size_t>(b) * m + a];
  };

  std::vector<ScalarField> pg(static_cast<size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      pg[static_cast<size_t>(a) * m + b] = pullback(base_.metric()({a, b}), coord_map_);
  auto pga = [&](int a, int b) -> const ScalarField& {
    return pg[static_cast<size_t>(a) * m + b];
  };

  // metric: g~(e~_a, e~_b) = g~(d_{n+a}, d_{n+b}) = g_ab, mixed slots zero,
  // expressed through the adapted frame of the lifted chart
  AdmissibleTensorField ghat = AdmissibleTensorField::zeros(lifted_chart, 0, 2);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      ScalarField s = pga(a, b);
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) s = s + G(c, a) * G(d, b) * pga(c, d);
      ghat({a, b}) = s;
      ghat({b, a}) = s;
      ghat({m + a, m + b}) = pga(a, b);
      ghat({m + b, m + a}) = pga(a, b);
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      ScalarField s = kZero;
      for (int c = 0; c < m; ++c) s = s + G(c, a) * pga(c, b);
      ghat({a, m + b}) = s;
      ghat({m + b, a}) = s;
    }

  // J in the adapted frame of the lifted chart
  AdmissibleTensorField phihat = AdmissibleTensorField::zeros(lifted_chart, 1, 1);
  for (int b = 0; b < m; ++b)
    for (int a = 0; a < m; ++a) {
      phihat({b, a}) = -G(b, a);
      ScalarField s = a == b ? ScalarField::constant(1.0) : kZero;
      for (int c = 0; c < m; ++c) s = s + G(c, a) * G(b, c);
      phihat({m + b, a}) = s;
      phihat({b, m + a}) = ScalarField::constant(a == b ? -1.0 : 0.0);
      phihat({m + b, m + a}) = G(b, a);
    }

  lifted_ = AlmostContactStructure(lifted_chart, std::move(ghat), std::move(phihat));

  // the lift must be a valid structure whenever the base is; asserted at a
  // pinned sample
  SampleSpec pin;
  pin.box.assign(lifted_dim(), {-1.0, 1.0});
  pin.count = 10;
  pin.seed = 0;
  const auto diags = validate_structure(lifted_, sample_points(pin), 1e-9);
  if (!diags.empty())
    throw GeometryError("lifted structure failed validation: " +
                        diags.front().message);
}

int LiftedSpace::lift_coord(int i) const { return coord_map_[i]; }

SampleSpec LiftedSpace::lifted_spec(const SampleSpec& base_spec) const {
  const int m = base_dim() - 1;
  SampleSpec out = base_spec;
  out.box.clear();
  out.box.reserve(lifted_dim());
  for (int a = 0; a < m; ++a) out.box.push_back(base_spec.box[a]);
  for (int c = 0; c < m; ++c) out.box.push_back({-1.0, 1.0});
  out.box.push_back(base_spec.box[m]);
  return out;
}

FrameVectorField LiftedSpace::epsilon(int a) const {
  const int m = base_dim() - 1;
  FrameVectorField v = FrameVectorField::zero(lifted_.chart());
  v.horizontal[a] = ScalarField::constant(1.0);
  for (int b = 0; b < m; ++b) v.horizontal[m + b] = -connection_coeff(b, a);
  return v;
}

FrameVectorField LiftedSpace::fiber_field(int b) const {
  const int m = base_dim() - 1;
  return FrameVectorField::frame(lifted_.chart(), m + b);
}

FrameVectorField LiftedSpace::reeb() const {
  return FrameVectorField::vertical_field(lifted_.chart());
}

ScalarField LiftedSpace::pull(const ScalarField& base_field) const {
  return pullback(base_field, coord_map_);
}

AlmostContactStructure lift_structure(const AlmostContactStructure& base,
                                      const InteriorConnection& connection) {
  return LiftedSpace(base, connection).structure();
}

// ---------------------------------------------------------------------------

namespace {

double field_vector_max(const FrameVectorField& v, const Point& p,
                        EvalCache* cache) {
  double worst = std::fabs(v.vertical.value(p, cache));
  for (const auto& h : v.horizontal)
    worst = std::max(worst, std::fabs(h.value(p, cache)));
  return worst;
}

FrameVectorField field_vector_diff(FrameVectorField a, const FrameVectorField& b) {
  for (size_t i = 0; i < a.horizontal.size(); ++i)
    a.horizontal[i] = a.horizontal[i] - b.horizontal[i];
  a.vertical = a.vertical - b.vertical;
  return a;
}

}  // namespace

LiftedBracketResult lifted_brackets_check(const LiftedSpace& lift,
                                          const SampleSpec& base_spec,
                                          int threads) {
  const int m = lift.base_dim() - 1;
  const auto points = sample_points(lift.lifted_spec(base_spec));
  const AdmissibleTensorField r_base = schouten_curvature(lift.base_connection());
  const AdmissibleTensorField p_base = p_tensor(lift.base_connection());
  const AdaptedChart& lchart = lift.structure().chart();

  // residual fields for each identity
  std::vector<FrameVectorField> residuals_q8, residuals_q9, residuals_q10;
  for (int a = 0; a < m; ++a) {
    const FrameVectorField ea = lift.epsilon(a);
    for (int b = a + 1; b < m; ++b) {
      FrameVectorField rhs = FrameVectorField::zero(lchart);
      rhs.vertical = 2.0 * lift.pull(lift.base().omega()({b, a}));
      for (int e = 0; e < m; ++e) {
        ScalarField s = ScalarField::constant(0.0);
        for (int c = 0; c < m; ++c)
          s = s + lift.pull(r_base({e, a, b, c})) *
                      ScalarField::coordinate(lift.fiber_coord(c));
        rhs.horizontal[m + e] = -s;
      }
      residuals_q8.push_back(
          field_vector_diff(lie_bracket(ea, lift.epsilon(b)), rhs));
    }
    {
      FrameVectorField rhs = FrameVectorField::zero(lchart);
      for (int b = 0; b < m; ++b) {
        ScalarField s = ScalarField::constant(0.0);
        for (int c = 0; c < m; ++c)
          s = s + lift.pull(p_base({b, a, c})) *
                      ScalarField::coordinate(lift.fiber_coord(c));
        rhs.horizontal[m + b] = s;
      }
      residuals_q9.push_back(field_vector_diff(lie_bracket(ea, lift.reeb()), rhs));
    }
    for (int b = 0; b < m; ++b) {
      FrameVectorField rhs = FrameVectorField::zero(lchart);
      for (int c = 0; c < m; ++c)
        rhs.horizontal[m + c] = lift.pull(lift.base_connection().gamma(c, a, b));
      residuals_q10.push_back(
          field_vector_diff(lie_bracket(ea, lift.fiber_field(b)), rhs));
    }
  }

  enum { kQ8, kQ9, kQ10, kMetrics };
  auto maxima = sweep_max(points, kMetrics, threads,
                          [&](int, const Point& p, EvalCache& cache, double* out) {
                            double q8 = 0.0, q9 = 0.0, q10 = 0.0;
                            for (const auto& r : residuals_q8)
                              q8 = std::max(q8, field_vector_max(r, p, &cache));
                            for (const auto& r : residuals_q9)
                              q9 = std::max(q9, field_vector_max(r, p, &cache));
                            for (const auto& r : residuals_q10)
                              q10 = std::max(q10, field_vector_max(r, p, &cache));
                            out[kQ8] = q8;
                            out[kQ9] = q9;
                            out[kQ10] = q10;
                          });

  LiftedBracketResult res;
  res.q8 = maxima[kQ8].value;
  res.q9 = maxima[kQ9].value;
  res.q10 = maxima[kQ10].value;
  res.witness = points[maxima[kQ8].point];
  return res;
}

LiftedNijenhuisResult lifted_nijenhuis_check(const LiftedSpace& lift,
                                             const SampleSpec& base_spec,
                                             int threads) {
  const int m = lift.base_dim() - 1;
  const auto points = sample_points(lift.lifted_spec(base_spec));
  const AlmostContactStructure& ls = lift.structure();
  const AdaptedChart& lchart = ls.chart();
  const AdmissibleTensorField r_base = schouten_curvature(lift.base_connection());
  const AdmissibleTensorField p_base = p_tensor(lift.base_connection());
  const AdmissibleTensorField s_base = torsion(lift.base_connection());

  auto fiber_x = [&](int c) { return ScalarField::coordinate(lift.fiber_coord(c)); };

  // epsilon_e expressed in the adapted frame of the lifted chart
  auto add_epsilon = [&](FrameVectorField& v, const ScalarField& coeff, int e) {
    v.horizontal[e] = v.horizontal[e] + coeff;
    for (int b = 0; b < m; ++b)
      v.horizontal[m + b] = v.horizontal[m + b] - coeff * lift.connection_coeff(b, e);
  };

  // closed forms for N_J on the frame pairs (torsion terms kept so the
  // check stays exact for connections with torsion)
  std::vector<FrameVectorField> d_ee, d_ff, d_ef, d_er, d_fr;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      std::vector<ScalarField> rsum(m);  // coefficients of the curvature term
      for (int e = 0; e < m; ++e) {
        ScalarField s = ScalarField::constant(0.0);
        for (int c = 0; c < m; ++c)
          s = s + lift.pull(r_base({e, a, b, c})) * fiber_x(c);
        rsum[e] = s;
      }
      if (a < b) {
        // N_J(eps_a, eps_b) = x R_{ab.}^e V_e + S^c_{ab} eps_c
        FrameVectorField v1 = FrameVectorField::zero(lchart);
        for (int e = 0; e < m; ++e) v1.horizontal[m + e] = rsum[e];
        for (int c = 0; c < m; ++c)
          add_epsilon(v1, lift.pull(s_base({c, a, b})), c);
        d_ee.push_back(field_vector_diff(
            nijenhuis_direct(ls, lift.epsilon(a), lift.epsilon(b)), v1));

        // N_J(V_a, V_b) = 2 omega_{ba} d_n - x R V - S eps
        FrameVectorField v2 = FrameVectorField::zero(lchart);
        v2.vertical = 2.0 * lift.pull(lift.base().omega()({b, a}));
        for (int e = 0; e < m; ++e) v2.horizontal[m + e] = -rsum[e];
        for (int c = 0; c < m; ++c)
          add_epsilon(v2, -lift.pull(s_base({c, a, b})), c);
        d_ff.push_back(field_vector_diff(
            nijenhuis_direct(ls, lift.fiber_field(a), lift.fiber_field(b)), v2));
      }
      // N_J(eps_a, V_b) = x R_{ab.}^e eps_e - S^c_{ab} V_c
      FrameVectorField v3 = FrameVectorField::zero(lchart);
      for (int e = 0; e < m; ++e) add_epsilon(v3, rsum[e], e);
      for (int c = 0; c < m; ++c)
        v3.horizontal[m + c] = v3.horizontal[m + c] - lift.pull(s_base({c, a, b}));
      d_ef.push_back(field_vector_diff(
          nijenhuis_direct(ls, lift.epsilon(a), lift.fiber_field(b)), v3));
    }
    // N_J(eps_a, d_n) = -x^c P^b_{ac} V_b ; N_J(V_a, d_n) = -x^c P^b_{ac} eps_b
    FrameVectorField v4 = FrameVectorField::zero(lchart);
    FrameVectorField v5 = FrameVectorField::zero(lchart);
    for (int b = 0; b < m; ++b) {
      ScalarField s = ScalarField::constant(0.0);
      for (int c = 0; c < m; ++c) s = s + lift.pull(p_base({b, a, c})) * fiber_x(c);
      v4.horizontal[m + b] = -s;
      add_epsilon(v5, -s, b);
    }
    d_er.push_back(field_vector_diff(
        nijenhuis_direct(ls, lift.epsilon(a), lift.reeb()), v4));
    d_fr.push_back(field_vector_diff(
        nijenhuis_direct(ls, lift.fiber_field(a), lift.reeb()), v5));
  }

  NijenhuisComponents lifted_nij = nijenhuis_adapted(ls);
  NormalityTensors lifted_norm = normality_tensors(ls);
  std::vector<ScalarField> n1_fields = lifted_nij.hor_ab.components();
  n1_fields.insert(n1_fields.end(), lifted_nij.hor_na.components().begin(),
                   lifted_nij.hor_na.components().end());
  n1_fields.insert(n1_fields.end(), lifted_norm.n1_vert.components().begin(),
                   lifted_norm.n1_vert.components().end());
  std::vector<ScalarField> omega_fields;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      omega_fields.push_back(lift.pull(lift.base().omega()({a, b})));

  enum { kEE, kFF, kEF, kER, kFR, kN1, kOmega, kMetrics };
  auto maxima = sweep_max(
      points, kMetrics, threads,
      [&](int, const Point& p, EvalCache& cache, double* out) {
        auto group = [&](const std::vector<FrameVectorField>& rs) {
          double worst = 0.0;
          for (const auto& r : rs)
            worst = std::max(worst, field_vector_max(r, p, &cache));
          return worst;
        };
        out[kEE] = group(d_ee);
        out[kFF] = group(d_ff);
        out[kEF] = group(d_ef);
        out[kER] = group(d_er);
        out[kFR] = group(d_fr);
        double n1 = 0.0;
        for (const auto& f : n1_fields)
          n1 = std::max(n1, std::fabs(f.value(p, &cache)));
        out[kN1] = n1;
        double om = 0.0;
        for (const auto& f : omega_fields)
          om = std::max(om, std::fabs(f.value(p, &cache)));
        out[kOmega] = om;
      });

  LiftedNijenhuisResult res;
  res.eps_eps = maxima[kEE].value;
  res.fiber_fiber = maxima[kFF].value;
  res.eps_fiber = maxima[kEF].value;
  res.eps_reeb = maxima[kER].value;
  res.fiber_reeb = maxima[kFR].value;
  res.n1_witness_norm = maxima[kN1].value;
  res.two_max_omega = 2.0 * maxima[kOmega].value;
  res.witness = points[maxima[kN1].point];
  return res;
}

LiftTheoremsResult check_theorems_9_10(const LiftedSpace& lift,
                                       const SampleSpec& base_spec,
                                       int threads) {
  const auto base_points = sample_points(base_spec);
  const AdmissibleTensorField r_base = schouten_curvature(lift.base_connection());
  const AdmissibleTensorField p_base = p_tensor(lift.base_connection());

  enum { kR, kP, kBaseMetrics };
  auto base_max = sweep_max(base_points, kBaseMetrics, threads,
                            [&](int, const Point& p, EvalCache& cache, double* out) {
                              double r = 0.0, pp = 0.0;
                              for (const auto& f : r_base.components())
                                r = std::max(r, std::fabs(f.value(p, &cache)));
                              for (const auto& f : p_base.components())
                                pp = std::max(pp, std::fabs(f.value(p, &cache)));
                              out[kR] = r;
                              out[kP] = pp;
                            });

  const ClassificationReport base_class = classify(lift.base(), base_spec, threads);
  const SampleSpec lspec = lift.lifted_spec(base_spec);
  const ClassificationReport lifted_class = classify(lift.structure(), lspec, threads);

  const double tol = base_spec.tolerance;
  LiftTheoremsResult res;
  res.base_r_max = base_max[kR].value;
  res.base_p_max = base_max[kP].value;
  res.base_zero_curvature = res.base_r_max <= tol;
  res.base_sasakian = base_class.sasakian.verdict;
  res.lifted_pn = lifted_class.almost_hermitian.max_residual;
  res.lifted_domega_full = lifted_class.ack_full.max_residual;
  res.lifted_domega_horizontal = lifted_class.ack_horizontal.max_residual;
  res.lifted_ack_full = lifted_class.ack_full.verdict;
  res.theorem10_consistent =
      res.lifted_ack_full == (res.base_sasakian && res.base_zero_curvature);
  res.witness = lifted_class.ack_full.witness;
  return res;
}

}  // namespace acml
