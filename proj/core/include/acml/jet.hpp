#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace acml {

/// A chart point: coordinate values, length = chart dimension.
using Point = std::vector<double>;

/// Thrown when evaluation leaves the domain of an operation
/// (division by zero, sqrt of a negative, singular matrix, ...).
class EvalDomainError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Multi-index bookkeeping for truncated Taylor arithmetic in `dim`
/// variables up to total degree `order`. Instances are immutable and
/// shared; get() caches one space per (dim, order).
class JetSpace {
 public:
  static constexpr int kMaxOrder = 4;

  static std::shared_ptr<const JetSpace> get(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(exps_.size()); }

  /// Exponent vector of multi-index `k` (length dim()).
  std::span<const int> exponents(int k) const {
    return {exps_[k].data(), exps_[k].size()};
  }
  int degree(int k) const { return degree_[k]; }

  /// Rank of a multi-index, or -1 when its degree exceeds order().
  int rank_of(std::span<const int> mi) const;

  /// Rank of the product index of ranks i and j, or -1 on overflow.
  int mul_index(int i, int j) const { return mul_[i * size() + j]; }

  /// Rank of the first-order index e_v.
  int var_index(int v) const { return 1 + v; }

  /// Rank of (multi-index k) + e_v, or -1 on degree overflow.
  int shift_up(int k, int v) const;

  /// alpha! for multi-index k.
  double factorial(int k) const { return fact_[k]; }

 private:
  JetSpace(int dim, int order);

  int dim_;
  int order_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> degree_;
  std::vector<int> rank_;  // dense packed-exponent lookup
  std::vector<int> mul_;
  std::vector<int> up_;
  std::vector<double> fact_;
};

/// Value of a smooth function together with all mixed partial derivatives
/// up to the order of its JetSpace, stored as Taylor coefficients.
/// Mixed partials are kept once per multi-set of indices.
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::shared_ptr<const JetSpace> sp)
      : space_(std::move(sp)), c_(space_->size(), 0.0) {}

  static Jet constant(std::shared_ptr<const JetSpace> sp, double v);
  static Jet coordinate(std::shared_ptr<const JetSpace> sp, int var, double v);

  bool valid() const { return space_ != nullptr; }
  const std::shared_ptr<const JetSpace>& space() const { return space_; }
  int dim() const { return space_->dim(); }
  int order() const { return space_->order(); }

  double value() const { return c_[0]; }
  double coeff(int k) const { return c_[k]; }
  double& coeff(int k) { return c_[k]; }

  /// Actual derivative: Taylor coefficient times alpha!.
  double partial(std::span<const int> multi) const;
  /// Single first derivative, var is 0-based.
  double partial1(int var) const;

  /// Copy truncated to a lower order.
  Jet truncated(int order) const;

  /// Jet of the derivative d/dx_var, one order lower.
  Jet derivative(int var) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
  friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
  friend Jet operator-(Jet a);
  friend Jet operator*(Jet a, double s) { a *= s; return a; }
  friend Jet operator*(double s, Jet a) { a *= s; return a; }
  friend Jet operator+(Jet a, double s) { a.c_[0] += s; return a; }
  friend Jet operator-(Jet a, double s) { a.c_[0] -= s; return a; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

  static Jet sin(const Jet& g);
  static Jet cos(const Jet& g);
  static Jet exp(const Jet& g);
  static Jet sqrt(const Jet& g);
  static Jet recip(const Jet& g);
  static Jet pow_int(const Jet& g, int m);

  /// c0 + c1 h + c2 h^2 + c3 h^3 + ... with h = g - g.value().
  static Jet compose(const Jet& g, std::span<const double> taylor);

 private:
  std::shared_ptr<const JetSpace> space_;
  std::vector<double> c_;
};

}  // namespace acml
