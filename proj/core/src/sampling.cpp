#include "acml/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace acml {

std::vector<Point> sample_points(const SampleSpec& spec) {
  if (spec.count < 1)
    throw std::invalid_argument("sample_points: count must be >= 1");
  if (spec.box.empty())
    throw std::invalid_argument("sample_points: empty box");
  for (const auto& iv : spec.box)
    if (!(iv[0] <= iv[1]))
      throw std::invalid_argument("sample_points: empty interval in box");

  std::mt19937_64 rng(spec.seed);
  std::vector<Point> out;
  out.reserve(spec.count);
  const int dim = static_cast<int>(spec.box.size());
  for (int i = 0; i < spec.count; ++i) {
    Point p(dim);
    for (int d = 0; d < dim; ++d) {
      const double u = u01(rng());
      p[d] = spec.box[d][0] + u * (spec.box[d][1] - spec.box[d][0]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<SweepMax> sweep_max(const std::vector<Point>& points, int metrics,
                                int threads, const SweepFn& fn) {
  const int n = static_cast<int>(points.size());
  std::vector<double> table(static_cast<size_t>(n) * metrics, 0.0);

  threads = std::clamp(threads, 1, n == 0 ? 1 : n);
  if (threads <= 1) {
    EvalCache cache;
    for (int i = 0; i < n; ++i)
      fn(i, points[i], cache, table.data() + static_cast<size_t>(i) * metrics);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        EvalCache cache;
        for (int i = t; i < n; i += threads)
          fn(i, points[i], cache, table.data() + static_cast<size_t>(i) * metrics);
      });
    }
    for (auto& th : pool) th.join();
  }

  // sequential reduction: result independent of the thread count
  std::vector<SweepMax> out(metrics);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < metrics; ++k) {
      const double v = table[static_cast<size_t>(i) * metrics + k];
      if (out[k].point < 0 || v > out[k].value) {
        out[k].value = v;
        out[k].point = i;
      }
    }
  return out;
}

}  // namespace acml
