#pragma once

#include <string>
#include <vector>

#include "acml/chart.hpp"

namespace acml {

/// One validation failure: where, what, how large.
struct Diagnostic {
  std::string message;
  Point point;
  double residual = 0.0;
};

/// Chart + admissible metric + admissible endomorphism. The Reeb field is
/// d_n and eta the vertical coframe element; the full metric is g on the
/// distribution extended by eta (x) eta. Immutable after construction.
class AlmostContactStructure {
 public:
  AlmostContactStructure() = default;
  AlmostContactStructure(AdaptedChart chart, AdmissibleTensorField g,
                         AdmissibleTensorField phi);

  const AdaptedChart& chart() const { return chart_; }
  const AdmissibleTensorField& metric() const { return g_; }
  const AdmissibleTensorField& phi() const { return phi_; }
  const AdmissibleTensorField& omega() const { return omega_; }
  int frame_dim() const { return chart_.frame_dim(); }

  /// g^{ab} as shared fields (positive-definiteness enforced at evaluation).
  const ScalarField& inverse_metric(int a, int b) const {
    return ginv_[static_cast<size_t>(a) * chart_.frame_dim() + b];
  }

 private:
  AdaptedChart chart_;
  AdmissibleTensorField g_, phi_, omega_;
  std::vector<ScalarField> ginv_;
};

/// Pointwise checks of the structure axioms (phi^2 = -1 on D, metric
/// compatibility, symmetry and positive definiteness of g). Empty result
/// means every residual stayed within `tol` at every point.
std::vector<Diagnostic> validate_structure(const AlmostContactStructure& s,
                                           const std::vector<Point>& points,
                                           double tol = 1e-10);

/// The 2-form Omega(x, y) = g(x, phi y) over the full frame; vertical slots
/// vanish.
FrameForm fundamental_form(const AlmostContactStructure& s);

/// Nijenhuis components in the adapted frame:
///   hor_ab (1,2): N^e_{ab},  vert_ab (0,2): N^n_{ab},  hor_na (1,1): N^e_{na}.
struct NijenhuisComponents {
  AdmissibleTensorField hor_ab;
  AdmissibleTensorField vert_ab;
  AdmissibleTensorField hor_na;
};
NijenhuisComponents nijenhuis_adapted(const AlmostContactStructure& s);

/// phi applied slotwise to a frame vector field (vertical part mapped to 0).
FrameVectorField apply_phi(const AlmostContactStructure& s,
                           const FrameVectorField& x);

/// N_phi(x, y) = [phi x, phi y] + phi^2 [x, y] - phi[phi x, y] - phi[x, phi y],
/// computed directly from brackets; the independent oracle for
/// nijenhuis_adapted.
FrameVectorField nijenhuis_direct(const AlmostContactStructure& s,
                                  const FrameVectorField& x,
                                  const FrameVectorField& y);
FrameVectorValue nijenhuis_direct(const AlmostContactStructure& s,
                                  const FrameVectorField& x,
                                  const FrameVectorField& y, const Point& p,
                                  EvalCache* cache = nullptr);

/// (L_x eta)(y) = x(eta(y)) - eta([x, y]) as a field.
ScalarField lie_derivative_eta(const FrameVectorField& x,
                               const FrameVectorField& y);

/// Normality data over the frame slots:
///   n1_hor/_vert on (a,b);  n1 on (n,a) slots equals pn_na;
///   n2_ab on (a,b) pairs (N2 vanishes on (n,a) slots);
///   pn_* = horizontal projection of N_phi.
struct NormalityTensors {
  AdmissibleTensorField n1_hor;   // (1,2)
  AdmissibleTensorField n1_vert;  // (0,2)
  AdmissibleTensorField n2;       // (0,2)
  AdmissibleTensorField pn_hor;   // (1,2)
  AdmissibleTensorField pn_na;    // (1,1)
};
NormalityTensors normality_tensors(const AlmostContactStructure& s);

/// Residual of P(N_phi) = N_phi + 2 (d eta . phi) (x) xi at a point; exercises
/// the vertical cancellation behind the projection identity.
double pn_identity_residual(const AlmostContactStructure& s, const Point& p,
                            EvalCache* cache = nullptr);

/// The x^n-variation fields: h = d_n phi / 2, C = d_n g / 2, C# = g^{-1} C,
/// psi^b_a = g^{db} omega_{da}.
struct DerivedFields {
  AdmissibleTensorField h;       // (1,1)
  AdmissibleTensorField c;       // (0,2)
  AdmissibleTensorField csharp;  // (1,1)
  AdmissibleTensorField psi;     // (1,1)
};
DerivedFields derived_fields(const AlmostContactStructure& s);

}  // namespace acml
