#pragma once

#include <vector>

#include "acml/structure.hpp"

namespace acml {

/// Linear connection acting along the distribution: coefficients
/// Gamma^a_{bc} of nabla_{e_b} e_c (fields; x^n dependence allowed).
class InteriorConnection {
 public:
  InteriorConnection() = default;
  InteriorConnection(AdaptedChart chart, std::vector<ScalarField> coeff);

  const AdaptedChart& chart() const { return chart_; }
  int dims() const { return chart_.frame_dim(); }
  const ScalarField& gamma(int a, int b, int c) const {
    const int m = chart_.frame_dim();
    return coeff_[(static_cast<size_t>(a) * m + b) * m + c];
  }
  ScalarField& gamma(int a, int b, int c) {
    const int m = chart_.frame_dim();
    return coeff_[(static_cast<size_t>(a) * m + b) * m + c];
  }

 private:
  AdaptedChart chart_;
  std::vector<ScalarField> coeff_;
};

/// The unique torsion-free metric-compatible interior connection,
/// Gamma^a_{bc} = g^{ad} (e_b g_{cd} + e_c g_{bd} - e_d g_{bc}) / 2.
/// Components are built once per unordered (b,c) pair, so the torsion
/// vanishes identically.
InteriorConnection interior_metric_connection(const AlmostContactStructure& s);
InteriorConnection interior_metric_connection(const AdaptedChart& chart,
                                              const AdmissibleTensorField& g);

/// S^c_{ab} = Gamma^c_{ab} - Gamma^c_{ba}, stored at (c; a, b).
AdmissibleTensorField torsion(const InteriorConnection& c);

/// nabla t with the direction appended as the last lower index.
AdmissibleTensorField covariant_derivative(const InteriorConnection& c,
                                           const AdmissibleTensorField& t);

/// Interior connection extended to arbitrary directions by differentiating
/// components along xi (the G^a_n = 0 rule).
struct ExtendedConnection {
  InteriorConnection interior;
};

/// nabla^1 t: interior part plus the xi-direction derivative.
struct ExtendedDerivative {
  AdmissibleTensorField horizontal;  // valence (p, q+1)
  AdmissibleTensorField xi;          // valence (p, q)
};
ExtendedDerivative extended_derivative(const ExtendedConnection& ec,
                                       const AdmissibleTensorField& t);

/// max |components| of an extended derivative at a point.
double extended_derivative_residual(const ExtendedDerivative& d, const Point& p,
                                    EvalCache* cache = nullptr);

/// Connection coefficients over the full frame (e_1..e_{n-1}, d_n):
/// coefficient (gamma, alpha, beta) of nabla_{E_alpha} E_beta = ... E_gamma.
/// Frame slot n-1 is the vertical direction.
struct FrameConnection {
  AdaptedChart chart;
  std::vector<ScalarField> coeff;  // n^3

  const ScalarField& at(int gamma, int alpha, int beta) const {
    const int n = chart.dim();
    return coeff[(static_cast<size_t>(gamma) * n + alpha) * n + beta];
  }
  ScalarField& at(int gamma, int alpha, int beta) {
    const int n = chart.dim();
    return coeff[(static_cast<size_t>(gamma) * n + alpha) * n + beta];
  }
  std::vector<double> values(const Point& p, EvalCache* cache = nullptr) const;
};

/// Levi-Civita coefficients of the full metric assembled from the interior
/// metric connection, omega and the x^n-variation fields:
///   hat Gamma^c_{ab} = Gamma^c_{ab}, hat Gamma^n_{ab} = omega_{ba} - C_{ab},
///   hat Gamma^b_{an} = hat Gamma^b_{na} = C#^b_a - psi^b_a, all other
///   vertical-slot coefficients zero.
FrameConnection levi_civita_adapted(const AlmostContactStructure& s);

/// Independent route: the full coordinate metric g_ab + eta-square closure,
/// classical coordinate Christoffel symbols from exact jets, transformed to
/// the adapted frame. Returns the same n^3 cube as FrameConnection::values.
class LeviCivitaOracle {
 public:
  explicit LeviCivitaOracle(const AlmostContactStructure& s);
  std::vector<double> values(const Point& p, EvalCache* cache = nullptr) const;
  int dim() const { return chart_.dim(); }

 private:
  AdaptedChart chart_;
  std::vector<ScalarField> gfull_;  // n^2 coordinate metric components
};

/// Curvature of the interior connection from the operator definition; the
/// projected frame bracket vanishes, so
///   R_{abc}^d = e_a Gamma^d_{bc} - e_b Gamma^d_{ac}
///             + Gamma^e_{bc} Gamma^d_{ae} - Gamma^e_{ac} Gamma^d_{be},
/// stored at (d; a, b, c); antisymmetric in a, b.
AdmissibleTensorField schouten_curvature(const InteriorConnection& c);

/// P^b_{ac} = d_n Gamma^b_{ac}, stored at (b; a, c).
AdmissibleTensorField p_tensor(const InteriorConnection& c);

/// Smooth curve given componentwise as expressions of one parameter.
struct ParametricCurve {
  std::vector<ScalarField> components;  // chart-dim fields of the variable t
  double t0 = 0.0;
  double t1 = 1.0;

  Point position(double t) const;
  std::vector<double> velocity(double t) const;
};

/// Piecewise-linear curve through the listed points.
struct Polyline {
  std::vector<Point> points;
};

/// Axis-aligned square loop in the (i, j)-coordinate plane, centred at
/// `center` with the given side, counterclockwise, closed.
Polyline square_loop(const Point& center, int i, int j, double side);

/// Transports v0 along the curve with classical fixed-step RK4:
/// dv^a/dt = -Gamma^a_{bc} dx^b/dt v^c; motion along xi transports
/// components unchanged. `steps` >= 2.
std::vector<double> parallel_transport(const ExtendedConnection& ec,
                                       const ParametricCurve& curve,
                                       std::vector<double> v0, int steps);
std::vector<double> parallel_transport(const ExtendedConnection& ec,
                                       const Polyline& curve,
                                       std::vector<double> v0, int steps);

}  // namespace acml
