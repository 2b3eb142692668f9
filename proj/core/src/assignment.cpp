#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "xlingevent/error.hpp"
#include "xlingevent/metrics.hpp"

namespace xlingevent {

// Kuhn-Munkres with potentials on the padded square cost matrix
// (cost = -weight, padding 0), O(n^3). Returns the maximum total weight of
// a one-to-one row/column assignment.
double max_weight_matching(const std::vector<double>& weights, int rows,
                           int cols) {
  if (rows < 0 || cols < 0 ||
      weights.size() != static_cast<std::size_t>(rows) * cols)
    throw UsageError("max_weight_matching: bad matrix shape");
  if (rows == 0 || cols == 0) return 0.0;
  for (double w : weights)
    if (!std::isfinite(w))
      throw UsageError("max_weight_matching: non-finite weight");

  const int n = std::max(rows, cols);
  auto cost = [&](int i, int j) -> double {
    if (i < rows && j < cols)
      return -weights[static_cast<std::size_t>(i) * cols + j];
    return 0.0;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[j] = row assigned to column j
  std::vector<int> way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    const int i = match[j];
    if (i >= 1 && i - 1 < rows && j - 1 < cols)
      total += weights[static_cast<std::size_t>(i - 1) * cols + (j - 1)];
  }
  return total;
}

}  // namespace xlingevent
