#pragma once

// Brute-force reference computations used only by the tests.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace clickstat::oracle {

inline double choose(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Joint table Pr(k1, k2) obtained by enumerating all 2^N click patterns of
/// N independent detectors that each click with probability `c`.  Detectors
/// [0, N/2) form the first branch.  Row-major, extent N/2 + 1.
inline std::vector<double> enumerate_detectors(std::int64_t degree, double c) {
  const auto n = static_cast<int>(degree);
  const int half = n / 2;
  std::vector<double> table(static_cast<std::size_t>((half + 1) * (half + 1)), 0.0);
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << n); ++pattern) {
    double prob = 1.0;
    int k1 = 0;
    int k2 = 0;
    for (int det = 0; det < n; ++det) {
      const bool click = ((pattern >> det) & 1u) != 0;
      prob *= click ? c : 1.0 - c;
      if (click) (det < half ? k1 : k2) += 1;
    }
    table[static_cast<std::size_t>(k1 * (half + 1) + k2)] += prob;
  }
  return table;
}

/// Keeps k1, k2 <= 1 and renormalizes; entries indexed 2 * k1 + k2.
inline std::array<double, 4> restrict_and_normalize(const std::vector<double>& table, std::int64_t half) {
  const auto extent = static_cast<std::size_t>(half + 1);
  std::array<double, 4> out{table[0], table[1], table[extent], table[extent + 1]};
  const double total = out[0] + out[1] + out[2] + out[3];
  for (double& v : out) v /= total;
  return out;
}

/// Composite Simpson rule on [a, b] with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace clickstat::oracle
