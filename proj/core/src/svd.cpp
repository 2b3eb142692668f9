#include "svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "xlingevent/error.hpp"

namespace xlingevent::detail {

namespace {

constexpr double kOrthogonalityThreshold = 1e-10;
constexpr int kMaxSweeps = 100;

double column_dot(const double* a, const double* b, int d) {
  double acc = 0.0;
  for (int i = 0; i < d; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

SvdResult svd_square_jacobi(const std::vector<double>& m, int d) {
  if (d <= 0 || m.size() != static_cast<std::size_t>(d) * d)
    throw UsageError("svd_square_jacobi: bad matrix shape");

  // Column-major working copies so the rotations touch contiguous memory.
  std::vector<double> a(static_cast<std::size_t>(d) * d);
  std::vector<double> v(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      a[static_cast<std::size_t>(j) * d + i] = m[static_cast<std::size_t>(i) * d + j];
  for (int j = 0; j < d; ++j) v[static_cast<std::size_t>(j) * d + j] = 1.0;

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    int rotations = 0;
    for (int p = 0; p < d - 1; ++p) {
      for (int q = p + 1; q < d; ++q) {
        double* ap = a.data() + static_cast<std::size_t>(p) * d;
        double* aq = a.data() + static_cast<std::size_t>(q) * d;
        const double alpha = column_dot(ap, ap, d);
        const double beta = column_dot(aq, aq, d);
        const double gamma = column_dot(ap, aq, d);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kOrthogonalityThreshold * std::sqrt(alpha * beta))
          continue;

        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        double* vp = v.data() + static_cast<std::size_t>(p) * d;
        double* vq = v.data() + static_cast<std::size_t>(q) * d;
        for (int i = 0; i < d; ++i) {
          const double x = ap[i], y = aq[i];
          ap[i] = c * x - s * y;
          aq[i] = s * x + c * y;
        }
        for (int i = 0; i < d; ++i) {
          const double x = vp[i], y = vq[i];
          vp[i] = c * x - s * y;
          vq[i] = s * x + c * y;
        }
        ++rotations;
      }
    }
    converged = rotations == 0;
  }
  if (!converged)
    throw DataError("SVD did not converge within " +
                    std::to_string(kMaxSweeps) + " Jacobi sweeps");

  std::vector<double> sigma(d);
  for (int j = 0; j < d; ++j)
    sigma[j] =
        std::sqrt(column_dot(a.data() + static_cast<std::size_t>(j) * d,
                             a.data() + static_cast<std::size_t>(j) * d, d));

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (sigma[x] != sigma[y]) return sigma[x] > sigma[y];
    return x < y;
  });

  const double sigma_max = sigma.empty() ? 0.0 : sigma[order[0]];
  const double rank_tol =
      sigma_max * d * std::numeric_limits<double>::epsilon();

  SvdResult result;
  result.sigma.resize(d);
  result.u.assign(static_cast<std::size_t>(d) * d, 0.0);
  result.v.assign(static_cast<std::size_t>(d) * d, 0.0);

  // Column-major U while we build it; transposed to row-major at the end.
  std::vector<double> u_cols(static_cast<std::size_t>(d) * d, 0.0);
  std::vector<bool> filled(d, false);
  for (int rank_pos = 0; rank_pos < d; ++rank_pos) {
    const int j = order[rank_pos];
    result.sigma[rank_pos] = sigma[j];
    for (int i = 0; i < d; ++i)
      result.v[static_cast<std::size_t>(i) * d + rank_pos] =
          v[static_cast<std::size_t>(j) * d + i];
    if (sigma[j] > rank_tol && sigma[j] > 0.0) {
      const double inv = 1.0 / sigma[j];
      for (int i = 0; i < d; ++i)
        u_cols[static_cast<std::size_t>(rank_pos) * d + i] =
            a[static_cast<std::size_t>(j) * d + i] * inv;
      filled[rank_pos] = true;
    }
  }

  // Complete null columns against the established ones (twice-iterated
  // modified Gram-Schmidt over the standard basis, first viable vector).
  for (int col = 0; col < d; ++col) {
    if (filled[col]) continue;
    std::vector<double> cand(d);
    bool ok = false;
    for (int basis = 0; basis < d && !ok; ++basis) {
      std::fill(cand.begin(), cand.end(), 0.0);
      cand[basis] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k < d; ++k) {
          if (!filled[k]) continue;
          const double* uk = u_cols.data() + static_cast<std::size_t>(k) * d;
          const double proj = column_dot(cand.data(), uk, d);
          for (int i = 0; i < d; ++i) cand[i] -= proj * uk[i];
        }
      }
      const double norm = std::sqrt(column_dot(cand.data(), cand.data(), d));
      if (norm > 0.5) {
        for (int i = 0; i < d; ++i)
          u_cols[static_cast<std::size_t>(col) * d + i] = cand[i] / norm;
        ok = true;
      }
    }
    if (!ok)
      throw DataError("SVD null-space completion failed");
    filled[col] = true;
  }

  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      result.u[static_cast<std::size_t>(i) * d + j] =
          u_cols[static_cast<std::size_t>(j) * d + i];
  return result;
}

}  // namespace xlingevent::detail
