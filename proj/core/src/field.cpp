#include "acml/field.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace acml {

using detail::FieldNode;
using NodeP = std::shared_ptr<const FieldNode>;

namespace {

std::string point_text(const Point& p) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) os << ", ";
    os << p[i];
  }
  os << ')';
  return os.str();
}

struct ConstNode final : FieldNode {
  explicit ConstNode(double v) : v(v) {}
  Jet eval(const Point& p, int order, EvalCache*) const override {
    return Jet::constant(JetSpace::get(static_cast<int>(p.size()), order), v);
  }
  std::optional<double> as_constant() const override { return v; }
  double v;
};

struct CoordNode final : FieldNode {
  explicit CoordNode(int var) : var(var) {}
  Jet eval(const Point& p, int order, EvalCache*) const override {
    return Jet::coordinate(JetSpace::get(static_cast<int>(p.size()), order), var,
                           p[var]);
  }
  int var;
};

struct ExprFieldNode final : FieldNode {
  explicit ExprFieldNode(Expr e) : expr(std::move(e)) {}
  Jet eval(const Point& p, int order, EvalCache*) const override {
    return expr.jet(p, order);
  }
  Expr expr;
};

enum class BinOp { Add, Sub, Mul, Div };

struct BinNode final : FieldNode {
  BinNode(BinOp op, ScalarField a, ScalarField b)
      : op(op), a(std::move(a)), b(std::move(b)) {}
  Jet eval(const Point& p, int order, EvalCache* cache) const override {
    Jet ja = a.jet(p, order, cache);
    Jet jb = b.jet(p, order, cache);
    switch (op) {
      case BinOp::Add: return ja + jb;
      case BinOp::Sub: return ja - jb;
      case BinOp::Mul: return ja * jb;
      case BinOp::Div: return ja / jb;
    }
    return Jet();
  }
  BinOp op;
  ScalarField a, b;
};

struct NegNode final : FieldNode {
  explicit NegNode(ScalarField a) : a(std::move(a)) {}
  Jet eval(const Point& p, int order, EvalCache* cache) const override {
    return -a.jet(p, order, cache);
  }
  ScalarField a;
};

struct ScaleNode final : FieldNode {
  ScaleNode(double s, ScalarField a) : s(s), a(std::move(a)) {}
  Jet eval(const Point& p, int order, EvalCache* cache) const override {
    return a.jet(p, order, cache) * s;
  }
  double s;
  ScalarField a;
};

struct ShiftNode final : FieldNode {
  ShiftNode(ScalarField a, double s) : a(std::move(a)), s(s) {}
  Jet eval(const Point& p, int order, EvalCache* cache) const override {
    return a.jet(p, order, cache) + s;
  }
  ScalarField a;
  double s;
};

struct PartialNode final : FieldNode {
  PartialNode(int var, ScalarField a) : var(var), a(std::move(a)) {}
  Jet eval(const Point& p, int order, EvalCache* cache) const override {
    return a.jet(p, order + 1, cache).derivative(var);
  }
  int var;
  ScalarField a;
};

struct PullbackNode final : FieldNode {
  PullbackNode(ScalarField base, std::vector<int> map)
      : base(std::move(base)), map(std::move(map)) {}
  Jet eval(const Point& p, int order, EvalCache*) const override {
    Point bp(map.size());
    for (size_t i = 0; i < map.size(); ++i) bp[i] = p[map[i]];
    // base DAGs are small; evaluate without a cache rather than mixing
    // memo entries of two different points
    const Jet bj = base.jet(bp, order, nullptr);
    const auto& bsp = *bj.space();
    auto sp = JetSpace::get(static_cast<int>(p.size()), order);
    Jet out(sp);
    std::vector<int> exp(p.size());
    for (int k = 0; k < bsp.size(); ++k) {
      if (bj.coeff(k) == 0.0) continue;
      std::fill(exp.begin(), exp.end(), 0);
      const auto be = bsp.exponents(k);
      for (size_t i = 0; i < map.size(); ++i) exp[map[i]] = be[i];
      out.coeff(sp->rank_of(exp)) = bj.coeff(k);
    }
    return out;
  }
  ScalarField base;
  std::vector<int> map;
};

}  // namespace

ScalarField ScalarField::constant(double v) {
  return ScalarField(std::make_shared<ConstNode>(v));
}

ScalarField ScalarField::coordinate(int var) {
  return ScalarField(std::make_shared<CoordNode>(var));
}

ScalarField ScalarField::from_expr(const Expr& e) {
  if (auto c = e.as_constant()) return constant(*c);
  if (auto v = e.as_coordinate()) return coordinate(*v);
  return ScalarField(std::make_shared<ExprFieldNode>(e));
}

Jet ScalarField::jet(const Point& p, int order, EvalCache* cache) const {
  if (!node_) throw std::logic_error("ScalarField: empty handle");
  if (!cache) return node_->eval(p, order, nullptr);
  if (!cache->matches(p)) cache->reset(p);
  if (const Jet* hit = cache->find(node_.get(), order)) {
    return hit->order() == order ? *hit : hit->truncated(order);
  }
  Jet j = node_->eval(p, order, cache);
  cache->store(node_.get(), j);
  return j;
}

ScalarField ScalarField::partial(int var) const {
  if (auto c = as_constant()) return constant(0.0);
  if (auto* cn = dynamic_cast<const CoordNode*>(node_.get()))
    return constant(cn->var == var ? 1.0 : 0.0);
  return ScalarField(std::make_shared<PartialNode>(var, *this));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  const auto ca = a.as_constant(), cb = b.as_constant();
  if (ca && cb) return ScalarField::constant(*ca + *cb);
  if (ca && *ca == 0.0) return b;
  if (cb && *cb == 0.0) return a;
  if (ca) return b + *ca;
  if (cb) return a + *cb;
  return ScalarField(std::make_shared<BinNode>(BinOp::Add, a, b));
}

ScalarField operator+(const ScalarField& a, double s) {
  if (s == 0.0) return a;
  if (auto c = a.as_constant()) return ScalarField::constant(*c + s);
  return ScalarField(std::make_shared<ShiftNode>(a, s));
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  if (a.node() && a.node() == b.node()) return ScalarField::constant(0.0);
  const auto ca = a.as_constant(), cb = b.as_constant();
  if (ca && cb) return ScalarField::constant(*ca - *cb);
  if (cb && *cb == 0.0) return a;
  if (ca && *ca == 0.0) return -b;
  if (cb) return a + (-*cb);
  return ScalarField(std::make_shared<BinNode>(BinOp::Sub, a, b));
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  const auto ca = a.as_constant(), cb = b.as_constant();
  if (ca && cb) return ScalarField::constant(*ca * *cb);
  if (ca) return *ca * b;
  if (cb) return *cb * a;
  return ScalarField(std::make_shared<BinNode>(BinOp::Mul, a, b));
}

ScalarField operator*(double s, const ScalarField& a) {
  if (s == 0.0) return ScalarField::constant(0.0);
  if (s == 1.0) return a;
  if (auto c = a.as_constant()) return ScalarField::constant(s * *c);
  return ScalarField(std::make_shared<ScaleNode>(s, a));
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  const auto ca = a.as_constant(), cb = b.as_constant();
  if (cb && *cb != 0.0) return (1.0 / *cb) * a;
  if (ca && *ca == 0.0) return ScalarField::constant(0.0);
  return ScalarField(std::make_shared<BinNode>(BinOp::Div, a, b));
}

ScalarField operator-(const ScalarField& a) {
  if (auto c = a.as_constant()) return ScalarField::constant(-*c);
  return ScalarField(std::make_shared<NegNode>(a));
}

ScalarField pullback(const ScalarField& base, std::vector<int> coord_map) {
  if (auto c = base.as_constant()) return ScalarField::constant(*c);
  return ScalarField(std::make_shared<PullbackNode>(base, std::move(coord_map)));
}

// ---------------------------------------------------------------------------
// MatrixFieldInverse

struct MatrixFieldInverse::Core {
  std::vector<ScalarField> entries;
  int n = 0;
  bool spd = false;

  struct Blob {
    int order = -1;
    std::vector<Jet> inv;
  };

  std::shared_ptr<const Blob> compute(const Point& p, int order,
                                      EvalCache* cache) const {
    const int m = n;
    std::vector<Jet> a(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        a[i * m + j] = entries[i * m + j].jet(p, order, cache);

    Eigen::MatrixXd a0(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a0(i, j) = a[i * m + j].value();

    Eigen::MatrixXd x0(m, m);
    if (spd) {
      Eigen::LLT<Eigen::MatrixXd> llt(a0);
      if (llt.info() != Eigen::Success)
        throw EvalDomainError("metric not positive definite at " + point_text(p));
      x0 = llt.solve(Eigen::MatrixXd::Identity(m, m));
    } else {
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(a0);
      const double det = lu.determinant();
      if (!std::isfinite(det) || det == 0.0)
        throw EvalDomainError("singular matrix at " + point_text(p));
      x0 = lu.solve(Eigen::MatrixXd::Identity(m, m));
    }

    auto sp = a[0].space();
    auto blob = std::make_shared<Blob>();
    blob->order = order;
    blob->inv.assign(static_cast<size_t>(m) * m, Jet(sp));
    if (order == 0) {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) blob->inv[i * m + j] = Jet::constant(sp, x0(i, j));
      return blob;
    }

    // u = x0*a - I has zero value part; inv = (I - u + u^2 - ...) * x0
    std::vector<Jet> u(static_cast<size_t>(m) * m, Jet(sp));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Jet s(sp);
        for (int k = 0; k < m; ++k) s += x0(i, k) * a[k * m + j];
        s.coeff(0) = 0.0;  // value part is the identity up to rounding
        u[i * m + j] = std::move(s);
      }

    std::vector<Jet> series(static_cast<size_t>(m) * m, Jet(sp));
    std::vector<Jet> powu(static_cast<size_t>(m) * m, Jet(sp));
    for (int i = 0; i < m; ++i) {
      series[i * m + i] = Jet::constant(sp, 1.0);
      powu[i * m + i] = Jet::constant(sp, 1.0);
    }
    double sign = -1.0;
    std::vector<Jet> next(static_cast<size_t>(m) * m, Jet(sp));
    for (int t = 1; t <= order; ++t) {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          Jet s(sp);
          for (int k = 0; k < m; ++k) s += powu[i * m + k] * u[k * m + j];
          next[i * m + j] = std::move(s);
        }
      powu.swap(next);
      for (int i = 0; i < m * m; ++i) series[i] += sign * powu[i];
      sign = -sign;
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Jet s(sp);
        for (int k = 0; k < m; ++k) s += series[i * m + k] * x0(k, j);
        blob->inv[i * m + j] = std::move(s);
      }
    return blob;
  }
};

namespace {

struct InvEntryNode final : FieldNode {
  InvEntryNode(std::shared_ptr<const MatrixFieldInverse::Core> core, int i, int j)
      : core(std::move(core)), i(i), j(j) {}
  Jet eval(const Point& p, int order, EvalCache* cache) const override;
  std::shared_ptr<const MatrixFieldInverse::Core> core;
  int i, j;
};

Jet InvEntryNode::eval(const Point& p, int order, EvalCache* cache) const {
  using Blob = MatrixFieldInverse::Core::Blob;
  std::shared_ptr<const Blob> blob;
  if (cache) {
    auto& slot = cache->blob(core.get());
    blob = std::static_pointer_cast<const Blob>(slot);
    if (!blob || blob->order < order) {
      blob = core->compute(p, order, cache);
      slot = blob;
    }
  } else {
    blob = core->compute(p, order, nullptr);
  }
  const Jet& j0 = blob->inv[static_cast<size_t>(i) * core->n + j];
  return j0.order() == order ? j0 : j0.truncated(order);
}

}  // namespace

MatrixFieldInverse::MatrixFieldInverse(std::vector<ScalarField> entries, int n,
                                       bool require_spd) {
  if (static_cast<int>(entries.size()) != n * n)
    throw std::invalid_argument("MatrixFieldInverse: entry count mismatch");
  auto core = std::make_shared<Core>();
  core->entries = std::move(entries);
  core->n = n;
  core->spd = require_spd;
  core_ = core;
}

int MatrixFieldInverse::size() const { return core_->n; }

ScalarField MatrixFieldInverse::entry(int i, int j) const {
  return ScalarField(std::make_shared<InvEntryNode>(core_, i, j));
}

}  // namespace acml
