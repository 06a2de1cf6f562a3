#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "acml/expr.hpp"
#include "acml/jet.hpp"

namespace acml {

class EvalCache;

namespace detail {
class FieldNode {
 public:
  virtual ~FieldNode() = default;
  virtual Jet eval(const Point& p, int order, EvalCache* cache) const = 0;
  virtual std::optional<double> as_constant() const { return std::nullopt; }
};
}  // namespace detail

/// Per-point evaluation memo. Reset (automatically) whenever the evaluated
/// point changes; shared DAG nodes are then computed once per point.
/// Not shareable between threads; each worker keeps its own cache.
class EvalCache {
 public:
  EvalCache() = default;

  const Point& point() const { return point_; }
  void reset(const Point& p) {
    point_ = p;
    jets_.clear();
    blobs_.clear();
  }
  bool matches(const Point& p) const { return point_ == p; }

  const Jet* find(const void* key, int order) const {
    auto it = jets_.find(key);
    if (it == jets_.end() || it->second.order() < order) return nullptr;
    return &it->second;
  }
  void store(const void* key, Jet j) { jets_[key] = std::move(j); }

  std::shared_ptr<const void>& blob(const void* key) { return blobs_[key]; }

 private:
  Point point_;
  std::unordered_map<const void*, Jet> jets_;
  std::unordered_map<const void*, std::shared_ptr<const void>> blobs_;
};

/// A scalar function of the chart coordinates, evaluable as an exact jet to
/// any order up to 3. Value-semantics handle to an immutable DAG node;
/// evaluation is pure and reentrant.
class ScalarField {
 public:
  ScalarField() = default;

  static ScalarField constant(double v);
  static ScalarField coordinate(int var);
  static ScalarField from_expr(const Expr& e);

  bool valid() const { return node_ != nullptr; }
  std::optional<double> as_constant() const {
    return node_ ? node_->as_constant() : std::nullopt;
  }
  bool is_zero() const { return as_constant() == 0.0; }

  Jet jet(const Point& p, int order, EvalCache* cache = nullptr) const;
  double value(const Point& p, EvalCache* cache = nullptr) const {
    return jet(p, 0, cache).value();
  }

  /// d/dx_var as a field (0-based index).
  ScalarField partial(int var) const;

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator/(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a);
  friend ScalarField operator*(double s, const ScalarField& a);
  friend ScalarField operator*(const ScalarField& a, double s) { return s * a; }
  friend ScalarField operator+(const ScalarField& a, double s);
  ScalarField& operator+=(const ScalarField& o) { return *this = *this + o; }
  ScalarField& operator-=(const ScalarField& o) { return *this = *this - o; }

  const detail::FieldNode* node() const { return node_.get(); }

  explicit ScalarField(std::shared_ptr<const detail::FieldNode> n)
      : node_(std::move(n)) {}

 private:
  std::shared_ptr<const detail::FieldNode> node_;
};

/// Re-expresses a field of a lower-dimensional chart over a larger chart:
/// base variable i becomes variable coord_map[i]; all other variables are
/// inert. Used to pull base data up to a lifted chart.
ScalarField pullback(const ScalarField& base, std::vector<int> coord_map);

/// Matrix of fields inverted per point at jet level (Neumann series around
/// the numeric inverse of the value part). With `require_spd` the value part
/// must be symmetric positive definite, otherwise plain LU is used.
class MatrixFieldInverse {
 public:
  struct Core;

  MatrixFieldInverse(std::vector<ScalarField> entries, int n, bool require_spd);
  int size() const;
  /// Field handle for the (i, j) entry of the inverse.
  ScalarField entry(int i, int j) const;

 private:
  std::shared_ptr<const Core> core_;
};

}  // namespace acml
