#include "opplab/lattice_reduction.hpp"

#include <cmath>

#include "opplab/errors.hpp"

namespace opplab {
namespace {

// Recomputes Gram-Schmidt data for rows [0, n).
void gram_schmidt(const Eigen::MatrixXd& b, Eigen::MatrixXd& mu, Eigen::VectorXd& norms2,
                  Eigen::MatrixXd& bstar) {
  const Eigen::Index n = b.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    bstar.row(i) = b.row(i);
    for (Eigen::Index j = 0; j < i; ++j) {
      mu(i, j) = norms2(j) > 0.0 ? b.row(i).dot(bstar.row(j)) / norms2(j) : 0.0;
      bstar.row(i) -= mu(i, j) * bstar.row(j);
    }
    norms2(i) = bstar.row(i).squaredNorm();
  }
}

}  // namespace

Eigen::MatrixXd lll_reduce_rows(Eigen::MatrixXd& b, double delta) {
  const Eigen::Index n = b.rows();
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(n, n);
  if (n <= 1) return u;

  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd norms2(n);
  Eigen::MatrixXd bstar(n, b.cols());
  gram_schmidt(b, mu, norms2, bstar);

  // Swaps are bounded by O(n² log(max norm)); anything past this is a
  // numerical breakdown rather than slow progress.
  const long max_iterations = 100000;
  long iterations = 0;
  Eigen::Index k = 1;
  while (k < n) {
    if (++iterations > max_iterations) {
      throw CapacityExceeded("lll_reduce_rows: iteration limit reached");
    }
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const double q = std::round(mu(k, j));
      if (q != 0.0) {
        b.row(k) -= q * b.row(j);
        u.row(k) -= q * u.row(j);
        for (Eigen::Index l = 0; l <= j; ++l) {
          mu(k, l) -= q * (l == j ? 1.0 : mu(j, l));
        }
      }
    }
    if (norms2(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * norms2(k - 1)) {
      ++k;
    } else {
      b.row(k).swap(b.row(k - 1));
      u.row(k).swap(u.row(k - 1));
      gram_schmidt(b, mu, norms2, bstar);
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
  return u;
}

}  // namespace opplab
