#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "acml/field.hpp"

namespace acml {

/// Seeded point sample over a coordinate box. Identical spec => identical
/// point sequence, on every platform (the generator and the uniform mapping
/// are pinned, see sample_points).
struct SampleSpec {
  std::vector<std::array<double, 2>> box;  // per-coordinate [lo, hi]
  int count = 200;
  uint64_t seed = 42;
  double tolerance = 1e-8;
};

/// mt19937_64 with u = (x >> 11) * 2^-53; coordinates filled in order,
/// point by point. uniform_real_distribution is implementation-defined and
/// deliberately not used.
std::vector<Point> sample_points(const SampleSpec& spec);

/// Uniform double in [0, 1) from a raw 64-bit draw (the pinned mapping).
inline double u01(uint64_t raw) {
  return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

/// Largest per-point residuals over a sample, reduced deterministically by
/// point index regardless of the thread count. The callback fills `out`
/// (size = metric count) with this point's residuals.
struct SweepMax {
  double value = 0.0;
  int point = -1;  // index of the first point attaining the max
};

using SweepFn =
    std::function<void(int index, const Point& p, EvalCache& cache, double* out)>;

std::vector<SweepMax> sweep_max(const std::vector<Point>& points, int metrics,
                                int threads, const SweepFn& fn);

}  // namespace acml
