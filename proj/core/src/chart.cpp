#include "acml/chart.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

namespace acml {

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

double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

uint64_t pack_tuple(std::span<const int> idx) {
  uint64_t key = 0;
  for (int v : idx) key = key * 16 + static_cast<uint64_t>(v + 1);
  return key;
}

}  // namespace

// ---------------------------------------------------------------------------
// AdaptedChart

struct AdaptedChart::Data {
  int n = 0;
  std::vector<ScalarField> gamma;
  std::vector<ScalarField> omega;  // (n-1)^2, antisymmetric, shared negations
};

AdaptedChart::AdaptedChart(int n, std::vector<ScalarField> gamma) {
  if (n < 3 || n % 2 == 0)
    throw GeometryError("chart dimension must be odd and >= 3, got " +
                        std::to_string(n));
  if (static_cast<int>(gamma.size()) != n - 1)
    throw GeometryError("expected " + std::to_string(n - 1) +
                        " frame coefficients, got " + std::to_string(gamma.size()));

  auto data = std::make_shared<Data>();
  data->n = n;
  data->gamma = std::move(gamma);

  // the coefficients may not depend on x^n; checked at a pinned sample
  std::mt19937_64 rng(0);
  for (int s = 0; s < 20; ++s) {
    Point p(n);
    for (int d = 0; d < n; ++d) p[d] = -1.0 + 2.0 * u01(rng);
    for (int a = 0; a < n - 1; ++a) {
      const double dn = data->gamma[a].jet(p, 1).partial1(n - 1);
      if (std::fabs(dn) > 1e-10)
        throw GeometryError("frame coefficient " + std::to_string(a + 1) +
                            " depends on x" + std::to_string(n) + " (d_n value " +
                            std::to_string(dn) + " at " + point_text(p) + ")");
    }
  }

  // omega_{ab} = (e_a gamma_b - e_b gamma_a)/2; stored once per pair
  const int m = n - 1;
  data->omega.assign(static_cast<size_t>(m) * m, ScalarField::constant(0.0));
  data_ = data;  // frame_derivative below needs a live handle
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      ScalarField w =
          0.5 * (frame_derivative(a, data->gamma[b]) -
                 frame_derivative(b, data->gamma[a]));
      data->omega[a * m + b] = w;
      data->omega[b * m + a] = -w;
    }
}

AdaptedChart AdaptedChart::from_exprs(int n,
                                      const std::vector<std::string>& gamma) {
  std::vector<ScalarField> fields;
  fields.reserve(gamma.size());
  for (const auto& src : gamma)
    fields.push_back(ScalarField::from_expr(Expr::parse(src, n)));
  return AdaptedChart(n, std::move(fields));
}

int AdaptedChart::dim() const { return data_->n; }
int AdaptedChart::frame_dim() const { return data_->n - 1; }

const ScalarField& AdaptedChart::gamma(int a) const { return data_->gamma[a]; }

ScalarField AdaptedChart::frame_derivative(int a, const ScalarField& f) const {
  return f.partial(a) - data_->gamma[a] * f.partial(vertical());
}

double AdaptedChart::frame_apply(int a, const ScalarField& f, const Point& p,
                                 EvalCache* cache) const {
  const Jet j = f.jet(p, 1, cache);
  return j.partial1(a) - data_->gamma[a].value(p, cache) * j.partial1(vertical());
}

const ScalarField& AdaptedChart::omega(int a, int b) const {
  return data_->omega[static_cast<size_t>(a) * frame_dim() + b];
}

// ---------------------------------------------------------------------------
// AdmissibleTensorField

AdmissibleTensorField::AdmissibleTensorField(AdaptedChart chart, int p, int q,
                                             std::vector<ScalarField> components)
    : chart_(std::move(chart)), p_(p), q_(q), comps_(std::move(components)) {
  size_t expect = 1;
  for (int i = 0; i < p_ + q_; ++i) expect *= chart_.frame_dim();
  if (comps_.size() != expect)
    throw GeometryError("tensor component count mismatch");
}

AdmissibleTensorField AdmissibleTensorField::zeros(const AdaptedChart& chart,
                                                   int p, int q) {
  size_t count = 1;
  for (int i = 0; i < p + q; ++i) count *= chart.frame_dim();
  return AdmissibleTensorField(chart, p, q,
                               std::vector<ScalarField>(count, ScalarField::constant(0.0)));
}

size_t AdmissibleTensorField::flat(std::span<const int> idx) const {
  size_t f = 0;
  for (int i : idx) f = f * chart_.frame_dim() + static_cast<size_t>(i);
  return f;
}

std::vector<double> AdmissibleTensorField::values(const Point& p,
                                                  EvalCache* cache) const {
  std::vector<double> out(comps_.size());
  for (size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i].value(p, cache);
  return out;
}

// ---------------------------------------------------------------------------
// FrameVectorField

FrameVectorField FrameVectorField::zero(const AdaptedChart& chart) {
  return {chart,
          std::vector<ScalarField>(chart.frame_dim(), ScalarField::constant(0.0)),
          ScalarField::constant(0.0)};
}

FrameVectorField FrameVectorField::frame(const AdaptedChart& chart, int a) {
  FrameVectorField v = zero(chart);
  v.horizontal[a] = ScalarField::constant(1.0);
  return v;
}

FrameVectorField FrameVectorField::vertical_field(const AdaptedChart& chart) {
  FrameVectorField v = zero(chart);
  v.vertical = ScalarField::constant(1.0);
  return v;
}

FrameVectorField FrameVectorField::projected() const {
  return {chart, horizontal, ScalarField::constant(0.0)};
}

std::vector<ScalarField> FrameVectorField::coordinate_components() const {
  const int m = chart.frame_dim();
  std::vector<ScalarField> coord(m + 1);
  ScalarField vert = vertical;
  for (int a = 0; a < m; ++a) {
    coord[a] = horizontal[a];
    vert = vert - horizontal[a] * chart.gamma(a);
  }
  coord[m] = vert;
  return coord;
}

double FrameVectorValue::norm() const {
  double s = vertical * vertical;
  for (double h : horizontal) s += h * h;
  return std::sqrt(s);
}

FrameVectorValue& FrameVectorValue::operator+=(const FrameVectorValue& o) {
  for (size_t i = 0; i < horizontal.size(); ++i) horizontal[i] += o.horizontal[i];
  vertical += o.vertical;
  return *this;
}

FrameVectorValue& FrameVectorValue::operator-=(const FrameVectorValue& o) {
  for (size_t i = 0; i < horizontal.size(); ++i) horizontal[i] -= o.horizontal[i];
  vertical -= o.vertical;
  return *this;
}

FrameVectorValue& FrameVectorValue::operator*=(double s) {
  for (double& h : horizontal) h *= s;
  vertical *= s;
  return *this;
}

FrameVectorValue eval(const FrameVectorField& x, const Point& p,
                      EvalCache* cache) {
  FrameVectorValue v;
  v.horizontal.resize(x.horizontal.size());
  for (size_t a = 0; a < x.horizontal.size(); ++a)
    v.horizontal[a] = x.horizontal[a].value(p, cache);
  v.vertical = x.vertical.value(p, cache);
  return v;
}

FrameVectorField lie_bracket(const FrameVectorField& x,
                             const FrameVectorField& y) {
  if (!x.chart.same_as(y.chart))
    throw GeometryError("lie_bracket: fields live on different charts");
  const AdaptedChart& chart = x.chart;
  const int n = chart.dim();
  const auto xc = x.coordinate_components();
  const auto yc = y.coordinate_components();

  // [x, y]^al = x^be d_be y^al - y^be d_be x^al, then back to the frame
  std::vector<ScalarField> bc(n, ScalarField::constant(0.0));
  for (int al = 0; al < n; ++al) {
    ScalarField s = ScalarField::constant(0.0);
    for (int be = 0; be < n; ++be)
      s = s + xc[be] * yc[al].partial(be) - yc[be] * xc[al].partial(be);
    bc[al] = s;
  }

  FrameVectorField out = FrameVectorField::zero(chart);
  ScalarField vert = bc[n - 1];
  for (int a = 0; a < n - 1; ++a) {
    out.horizontal[a] = bc[a];
    vert = vert + bc[a] * chart.gamma(a);
  }
  out.vertical = vert;
  return out;
}

FrameVectorValue lie_bracket(const FrameVectorField& x, const FrameVectorField& y,
                             const Point& p, EvalCache* cache) {
  return eval(lie_bracket(x, y), p, cache);
}

AdmissibleTensorField omega_from_chart(const AdaptedChart& chart) {
  const int m = chart.frame_dim();
  std::vector<ScalarField> comps(static_cast<size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) comps[a * m + b] = chart.omega(a, b);
  return AdmissibleTensorField(chart, 0, 2, std::move(comps));
}

AdmissibleTensorField nonholonomicity(const AdaptedChart& chart) {
  const int m = chart.frame_dim();
  std::vector<ScalarField> comps(static_cast<size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) comps[a * m + b] = 2.0 * chart.omega(b, a);
  return AdmissibleTensorField(chart, 0, 2, std::move(comps));
}

Eigen::MatrixXd invert_admissible_metric(const AdmissibleTensorField& g,
                                         const Point& p, EvalCache* cache) {
  const int m = g.dims();
  Eigen::MatrixXd gm(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) gm(i, j) = g({i, j}).value(p, cache);
  Eigen::LLT<Eigen::MatrixXd> llt(gm);
  if (llt.info() != Eigen::Success)
    throw GeometryError("metric not positive definite at " + point_text(p));
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
  const double resid =
      (gm * inv - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  if (resid > 1e-12)
    throw GeometryError("metric inversion residual " + std::to_string(resid) +
                        " exceeds 1e-12 at " + point_text(p));
  return inv;
}

// ---------------------------------------------------------------------------
// FrameForm

namespace {

void increasing_tuples(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  if (k == 0) {
    out.push_back({});
    return;
  }
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
}

}  // namespace

FrameForm::FrameForm(AdaptedChart chart, int degree)
    : chart_(std::move(chart)), k_(degree) {
  increasing_tuples(chart_.dim(), k_, tuples_);
  comps_.assign(tuples_.size(), ScalarField::constant(0.0));
}

namespace {
int tuple_rank(const std::vector<std::vector<int>>& tuples,
               std::span<const int> idx) {
  for (size_t r = 0; r < tuples.size(); ++r) {
    if (std::equal(tuples[r].begin(), tuples[r].end(), idx.begin(), idx.end()))
      return static_cast<int>(r);
  }
  throw std::out_of_range("FrameForm: bad index tuple");
}
}  // namespace

ScalarField& FrameForm::at(std::span<const int> increasing) {
  return comps_[tuple_rank(tuples_, increasing)];
}

const ScalarField& FrameForm::at(std::span<const int> increasing) const {
  return comps_[tuple_rank(tuples_, increasing)];
}

ScalarField FrameForm::component(std::span<const int> idx) const {
  std::vector<int> sorted(idx.begin(), idx.end());
  int sign = 1;
  // insertion sort, tracking parity
  for (size_t i = 1; i < sorted.size(); ++i) {
    for (size_t j = i; j > 0 && sorted[j] < sorted[j - 1]; --j) {
      std::swap(sorted[j], sorted[j - 1]);
      sign = -sign;
    }
  }
  for (size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] == sorted[i - 1]) return ScalarField::constant(0.0);
  const ScalarField& c = at(sorted);
  return sign > 0 ? c : -c;
}

double FrameForm::value(std::span<const FrameVectorValue> args, const Point& p,
                        EvalCache* cache) const {
  if (static_cast<int>(args.size()) != k_)
    throw std::invalid_argument("FrameForm::value: wrong argument count");
  const int vert = chart_.dim() - 1;
  auto slot = [&](const FrameVectorValue& v, int i) {
    return i == vert ? v.vertical : v.horizontal[i];
  };
  double total = 0.0;
  Eigen::MatrixXd m(k_, k_);
  for (size_t r = 0; r < tuples_.size(); ++r) {
    const double c = comps_[r].value(p, cache);
    if (c == 0.0) continue;
    for (int row = 0; row < k_; ++row)
      for (int col = 0; col < k_; ++col)
        m(row, col) = slot(args[row], tuples_[r][col]);
    total += c * m.determinant();
  }
  return total;
}

double FrameForm::frobenius(const Point& p, EvalCache* cache) const {
  double kfact = 1.0;
  for (int i = 2; i <= k_; ++i) kfact *= i;
  double s = 0.0;
  for (const auto& c : comps_) {
    const double v = c.value(p, cache);
    s += v * v;
  }
  return std::sqrt(kfact * s);
}

double FrameForm::frobenius_horizontal(const Point& p, EvalCache* cache) const {
  double kfact = 1.0;
  for (int i = 2; i <= k_; ++i) kfact *= i;
  const int vert = chart_.dim() - 1;
  double s = 0.0;
  for (size_t r = 0; r < tuples_.size(); ++r) {
    if (!tuples_[r].empty() && tuples_[r].back() == vert) continue;
    const double v = comps_[r].value(p, cache);
    s += v * v;
  }
  return std::sqrt(kfact * s);
}

FrameForm exterior_derivative(const FrameForm& form) {
  const int k = form.degree();
  if (k != 1 && k != 2)
    throw GeometryError("exterior_derivative: supported input degrees are 1 and 2");
  const AdaptedChart& chart = form.chart();
  const int vert = chart.dim() - 1;
  FrameForm out(chart, k + 1);

  std::vector<std::vector<int>> tuples;
  increasing_tuples(chart.dim(), k + 1, tuples);
  std::vector<int> rest(k);
  for (const auto& I : tuples) {
    ScalarField f = ScalarField::constant(0.0);
    // sum_i (-1)^i E_i (a(rest))
    for (int m = 0; m <= k; ++m) {
      int w = 0;
      for (int j = 0; j <= k; ++j)
        if (j != m) rest[w++] = I[j];
      const ScalarField& c = form.at(rest);
      ScalarField d = (I[m] == vert) ? c.partial(vert)
                                     : chart.frame_derivative(I[m], c);
      f = (m % 2 == 0) ? f + d : f - d;
    }
    // sum_{i<j} (-1)^{i+j} a([E_i, E_j], rest); only horizontal pairs
    // bracket: [E_a, E_b] = 2 omega_{ba} E_vert
    for (int m = 0; m <= k; ++m) {
      for (int l = m + 1; l <= k; ++l) {
        if (I[m] == vert || I[l] == vert) continue;
        std::vector<int> args;
        args.push_back(vert);
        for (int j = 0; j <= k; ++j)
          if (j != m && j != l) args.push_back(I[j]);
        ScalarField comp = form.component(args);
        if (comp.is_zero()) continue;
        ScalarField term = 2.0 * chart.omega(I[l], I[m]) * comp;
        f = ((m + l) % 2 == 0) ? f + term : f - term;
      }
    }
    out.at(I) = (1.0 / (k + 1)) * f;
  }
  return out;
}

FrameForm eta_form(const AdaptedChart& chart) {
  FrameForm eta(chart, 1);
  const int vert = chart.dim() - 1;
  eta.at(std::array<int, 1>{vert}) = ScalarField::constant(1.0);
  return eta;
}

}  // namespace acml
