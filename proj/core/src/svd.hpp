#pragma once

#include <vector>

namespace xlingevent::detail {

struct SvdResult {
  std::vector<double> u;      // d x d row-major, orthonormal columns
  std::vector<double> v;      // d x d row-major, orthonormal columns
  std::vector<double> sigma;  // descending, >= 0
};

// One-sided Jacobi SVD of a square matrix M = U diag(sigma) V^T.
// Columns of M are orthogonalized by plane rotations accumulated into V;
// convergence when every column pair satisfies |<a_p, a_q>| <=
// 1e-10 * ||a_p|| * ||a_q||, capped at 100 sweeps (DataError beyond that).
// Null columns of U are completed to an orthonormal basis so U is always
// fully orthogonal, which keeps U V^T orthogonal for rank-deficient input.
SvdResult svd_square_jacobi(const std::vector<double>& m, int d);

}  // namespace xlingevent::detail
