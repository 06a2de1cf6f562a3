#pragma once

#include <Eigen/Core>

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "acml/field.hpp"

namespace acml {

/// Structural / geometric precondition failure (bad dimensions, a chart
/// coefficient depending on x^n, degenerate metric, ...).
class GeometryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Chart of odd dimension n whose last coordinate direction spans the
/// complement of the distribution. Owns the coefficients of the frame
/// e_a = d_a - gamma_a d_n and the dual coframe (dx^a, dx^n + gamma_a dx^a).
/// The coefficients never depend on x^n; this is validated on construction
/// at a pinned deterministic sample.
class AdaptedChart {
 public:
  AdaptedChart() = default;
  AdaptedChart(int n, std::vector<ScalarField> gamma);
  static AdaptedChart from_exprs(int n, const std::vector<std::string>& gamma);

  bool valid() const { return data_ != nullptr; }
  int dim() const;        // n
  int frame_dim() const;  // n - 1
  int vertical() const { return dim() - 1; }  // 0-based index of x^n

  const ScalarField& gamma(int a) const;  // a in [0, frame_dim)

  /// e_a f as a field.
  ScalarField frame_derivative(int a, const ScalarField& f) const;
  /// e_a f at a point.
  double frame_apply(int a, const ScalarField& f, const Point& p,
                     EvalCache* cache = nullptr) const;

  /// omega_{ab} = (e_a gamma_b - e_b gamma_a) / 2, the 2-form d(eta).
  const ScalarField& omega(int a, int b) const;

  bool same_as(const AdaptedChart& o) const { return data_ == o.data_; }

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

/// Dense admissible tensor: p upper and q lower frame indices, each running
/// over 0..n-2. Component fields may depend on all n coordinates.
class AdmissibleTensorField {
 public:
  AdmissibleTensorField() = default;
  AdmissibleTensorField(AdaptedChart chart, int p, int q,
                        std::vector<ScalarField> components);
  static AdmissibleTensorField zeros(const AdaptedChart& chart, int p, int q);

  const AdaptedChart& chart() const { return chart_; }
  int rank() const { return p_ + q_; }
  int upper() const { return p_; }
  int lower() const { return q_; }
  int dims() const { return chart_.frame_dim(); }

  const ScalarField& at(std::span<const int> idx) const {
    return comps_[flat(idx)];
  }
  ScalarField& at(std::span<const int> idx) { return comps_[flat(idx)]; }
  const ScalarField& operator()(std::initializer_list<int> idx) const {
    return comps_[flat({idx.begin(), idx.size()})];
  }
  ScalarField& operator()(std::initializer_list<int> idx) {
    return comps_[flat({idx.begin(), idx.size()})];
  }
  const std::vector<ScalarField>& components() const { return comps_; }
  std::vector<ScalarField>& components() { return comps_; }

  /// All components evaluated at p (flat, same index order as storage).
  std::vector<double> values(const Point& p, EvalCache* cache = nullptr) const;

  size_t flat(std::span<const int> idx) const;

 private:
  AdaptedChart chart_;
  int p_ = 0, q_ = 0;
  std::vector<ScalarField> comps_;
};

/// Vector field expressed in the adapted frame (e_a, d_n): horizontal
/// components plus one vertical component. Admissible iff vertical == 0.
struct FrameVectorField {
  AdaptedChart chart;
  std::vector<ScalarField> horizontal;
  ScalarField vertical;

  static FrameVectorField zero(const AdaptedChart& chart);
  static FrameVectorField frame(const AdaptedChart& chart, int a);  // e_a
  static FrameVectorField vertical_field(const AdaptedChart& chart);  // d_n

  FrameVectorField projected() const;  // vertical component dropped

  /// Coordinate components (d_1..d_n basis) as fields.
  std::vector<ScalarField> coordinate_components() const;
};

/// Frame components of a vector at a point.
struct FrameVectorValue {
  std::vector<double> horizontal;
  double vertical = 0.0;

  double norm() const;
  FrameVectorValue& operator+=(const FrameVectorValue& o);
  FrameVectorValue& operator-=(const FrameVectorValue& o);
  FrameVectorValue& operator*=(double s);
};

FrameVectorValue eval(const FrameVectorField& x, const Point& p,
                      EvalCache* cache = nullptr);

/// Lie bracket [x, y] re-expressed in the frame, exact at every point.
FrameVectorField lie_bracket(const FrameVectorField& x, const FrameVectorField& y);
FrameVectorValue lie_bracket(const FrameVectorField& x, const FrameVectorField& y,
                             const Point& p, EvalCache* cache = nullptr);

/// omega as an antisymmetric admissible (0,2) field; [e_a, e_b] = 2 omega_{ba} d_n.
AdmissibleTensorField omega_from_chart(const AdaptedChart& chart);

/// Non-holonomicity components M^n_{ab} = 2 omega_{ba}.
AdmissibleTensorField nonholonomicity(const AdaptedChart& chart);

/// Pointwise inverse of an admissible symmetric (0,2) field; requires the
/// value to be positive definite and g * g^{-1} = id to 1e-12.
Eigen::MatrixXd invert_admissible_metric(const AdmissibleTensorField& g,
                                         const Point& p, EvalCache* cache = nullptr);

/// Differential form over the full frame (e_1..e_{n-1}, d_n); frame index
/// n-1 (0-based) is the vertical slot. Components are stored once per
/// strictly increasing index tuple.
class FrameForm {
 public:
  FrameForm() = default;
  FrameForm(AdaptedChart chart, int degree);

  const AdaptedChart& chart() const { return chart_; }
  int degree() const { return k_; }
  int frame_size() const { return chart_.dim(); }

  ScalarField& at(std::span<const int> increasing);
  const ScalarField& at(std::span<const int> increasing) const;
  ScalarField& operator()(std::initializer_list<int> idx) {
    return at({idx.begin(), idx.size()});
  }
  const ScalarField& operator()(std::initializer_list<int> idx) const {
    return at({idx.begin(), idx.size()});
  }

  /// Signed lookup for an arbitrary tuple (0 on repeated indices).
  ScalarField component(std::span<const int> idx) const;

  /// Value on arbitrary frame vectors.
  double value(std::span<const FrameVectorValue> args, const Point& p,
               EvalCache* cache = nullptr) const;

  const std::vector<ScalarField>& storage() const { return comps_; }
  const std::vector<std::vector<int>>& tuples() const { return tuples_; }

  /// Frobenius norm over all ordered index tuples at p (increasing-tuple
  /// squares times k!).
  double frobenius(const Point& p, EvalCache* cache = nullptr) const;
  /// Same, restricted to tuples with horizontal indices only.
  double frobenius_horizontal(const Point& p, EvalCache* cache = nullptr) const;

 private:
  AdaptedChart chart_;
  int k_ = 0;
  std::vector<ScalarField> comps_;
  std::vector<std::vector<int>> tuples_;
};

/// d with the normalized convention
///   d a (X_0..X_k) = 1/(k+1) [ sum_i (-1)^i X_i a(..no i..)
///                            + sum_{i<j} (-1)^{i+j} a([X_i,X_j], ..) ];
/// with it, d(eta)(e_a, e_b) equals omega_{ab} exactly. Supported input
/// degrees: 1 and 2.
FrameForm exterior_derivative(const FrameForm& form);

/// eta as a frame 1-form (0 on horizontal slots, 1 on the vertical slot).
FrameForm eta_form(const AdaptedChart& chart);

}  // namespace acml
