#include "acml/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace acml {

namespace {

// All exponent vectors with the given total degree, descending lexicographic.
void compositions(int dim, int deg, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(dim, 0);
  cur[0] = deg;
  while (true) {
    out.push_back(cur);
    int i = dim - 2;
    while (i >= 0 && cur[i] == 0) --i;
    if (i < 0) break;
    cur[i] -= 1;
    int rest = 1;
    for (int j = i + 1; j < dim; ++j) {
      rest += cur[j];
      cur[j] = 0;
    }
    cur[i + 1] = rest;
  }
}

// base-(kMaxOrder+1) packing of an exponent vector
size_t pack(std::span<const int> e) {
  size_t key = 0;
  for (size_t i = e.size(); i-- > 0;) key = key * (JetSpace::kMaxOrder + 1) + e[i];
  return key;
}

}  // namespace

JetSpace::JetSpace(int dim, int order) : dim_(dim), order_(order) {
  for (int deg = 0; deg <= order; ++deg) compositions(dim, deg, exps_);
  const int n = size();
  degree_.resize(n);
  fact_.resize(n);
  for (int k = 0; k < n; ++k) {
    int d = 0;
    double f = 1.0;
    for (int v = 0; v < dim; ++v) {
      d += exps_[k][v];
      for (int j = 2; j <= exps_[k][v]; ++j) f *= j;
    }
    degree_[k] = d;
    fact_[k] = f;
  }
  size_t table = 1;
  for (int v = 0; v < dim; ++v) table *= kMaxOrder + 1;
  rank_.assign(table, -1);
  for (int k = 0; k < n; ++k) rank_[pack(exponents(k))] = k;

  mul_.assign(static_cast<size_t>(n) * n, -1);
  std::vector<int> sum(dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (degree_[i] + degree_[j] > order) continue;
      for (int v = 0; v < dim; ++v) sum[v] = exps_[i][v] + exps_[j][v];
      mul_[static_cast<size_t>(i) * n + j] = rank_[pack(sum)];
    }
  }
  up_.assign(static_cast<size_t>(n) * dim, -1);
  std::vector<int> e(dim);
  for (int k = 0; k < n; ++k) {
    for (int v = 0; v < dim; ++v) {
      if (degree_[k] + 1 > order) continue;
      std::copy(exps_[k].begin(), exps_[k].end(), e.begin());
      e[v] += 1;
      up_[static_cast<size_t>(k) * dim + v] = rank_[pack(e)];
    }
  }
}

std::shared_ptr<const JetSpace> JetSpace::get(int dim, int order) {
  if (dim < 1 || dim > 11) throw std::invalid_argument("JetSpace: bad dimension");
  if (order < 0 || order > kMaxOrder)
    throw std::invalid_argument("JetSpace: order out of range");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{dim, order}];
  if (!slot) slot = std::shared_ptr<const JetSpace>(new JetSpace(dim, order));
  return slot;
}

int JetSpace::rank_of(std::span<const int> mi) const {
  int deg = 0;
  for (int v : mi) {
    if (v < 0 || v > kMaxOrder) return -1;
    deg += v;
  }
  if (deg > order_) return -1;
  return rank_[pack(mi)];
}

int JetSpace::shift_up(int k, int v) const {
  return up_[static_cast<size_t>(k) * dim_ + v];
}

Jet Jet::constant(std::shared_ptr<const JetSpace> sp, double v) {
  Jet j(std::move(sp));
  j.c_[0] = v;
  return j;
}

Jet Jet::coordinate(std::shared_ptr<const JetSpace> sp, int var, double v) {
  Jet j(std::move(sp));
  j.c_[0] = v;
  if (j.order() >= 1) j.c_[j.space_->var_index(var)] = 1.0;
  return j;
}

double Jet::partial(std::span<const int> multi) const {
  const int k = space_->rank_of(multi);
  if (k < 0) throw std::out_of_range("Jet::partial: order exceeds jet order");
  return c_[k] * space_->factorial(k);
}

double Jet::partial1(int var) const {
  return c_[space_->var_index(var)];
}

Jet Jet::truncated(int order) const {
  if (order == this->order()) return *this;
  if (order > this->order())
    throw std::logic_error("Jet::truncated: cannot extend order");
  Jet out(JetSpace::get(dim(), order));
  const int n = out.space_->size();
  // multi-index enumeration is graded, so lower orders are a shared prefix
  for (int k = 0; k < n; ++k) out.c_[k] = c_[k];
  return out;
}

Jet Jet::derivative(int var) const {
  if (order() == 0) throw std::logic_error("Jet::derivative on order-0 jet");
  Jet out(JetSpace::get(dim(), order() - 1));
  const auto& osp = *out.space_;
  for (int k = 0; k < osp.size(); ++k) {
    const int src = space_->shift_up(k, var);
    out.c_[k] = c_[src] * (osp.exponents(k)[var] + 1);
  }
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

Jet operator-(Jet a) {
  for (double& x : a.c_) x = -x;
  return a;
}

Jet operator*(const Jet& a, const Jet& b) {
  const JetSpace& sp = *a.space_;
  Jet out(a.space_);
  const int n = sp.size();
  for (int i = 0; i < n; ++i) {
    const double ai = a.c_[i];
    if (ai == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      const int k = sp.mul_index(i, j);
      if (k >= 0) out.c_[k] += ai * b.c_[j];
    }
  }
  return out;
}

Jet operator/(const Jet& a, const Jet& b) { return a * Jet::recip(b); }

Jet Jet::compose(const Jet& g, std::span<const double> taylor) {
  // Horner over h = g - g0; h vanishes at order 0, so truncation is exact.
  Jet h = g;
  h.coeff(0) = 0.0;
  const int terms = std::min<int>(static_cast<int>(taylor.size()), g.order() + 1);
  Jet acc = Jet::constant(g.space_, taylor[terms - 1]);
  for (int m = terms - 2; m >= 0; --m) {
    acc = acc * h;
    acc.coeff(0) += taylor[m];
  }
  return acc;
}

Jet Jet::sin(const Jet& g) {
  const double s = std::sin(g.value()), c = std::cos(g.value());
  const double t[5] = {s, c, -s / 2.0, -c / 6.0, s / 24.0};
  return compose(g, {t, 5});
}

Jet Jet::cos(const Jet& g) {
  const double s = std::sin(g.value()), c = std::cos(g.value());
  const double t[5] = {c, -s, -c / 2.0, s / 6.0, c / 24.0};
  return compose(g, {t, 5});
}

Jet Jet::exp(const Jet& g) {
  const double e = std::exp(g.value());
  const double t[5] = {e, e, e / 2.0, e / 6.0, e / 24.0};
  return compose(g, {t, 5});
}

Jet Jet::sqrt(const Jet& g) {
  const double v = g.value();
  if (v < 0.0) throw EvalDomainError("sqrt of negative value");
  if (v == 0.0) {
    if (g.order() >= 1) throw EvalDomainError("sqrt derivative singular at zero");
    return constant(g.space_, 0.0);
  }
  const double s = std::sqrt(v);
  const double t[5] = {s, 1.0 / (2.0 * s), -1.0 / (8.0 * v * s),
                       1.0 / (16.0 * v * v * s), -5.0 / (128.0 * v * v * v * s)};
  return compose(g, {t, 5});
}

Jet Jet::recip(const Jet& g) {
  const double v = g.value();
  if (v == 0.0) throw EvalDomainError("division by zero");
  const double iv = 1.0 / v;
  const double t[5] = {iv, -iv * iv, iv * iv * iv, -iv * iv * iv * iv,
                       iv * iv * iv * iv * iv};
  return compose(g, {t, 5});
}

Jet Jet::pow_int(const Jet& g, int m) {
  if (m < 0) return recip(pow_int(g, -m));
  Jet acc = constant(g.space_, 1.0);
  Jet base = g;
  unsigned e = static_cast<unsigned>(m);
  while (e > 0) {
    if (e & 1u) acc = acc * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return acc;
}

}  // namespace acml
