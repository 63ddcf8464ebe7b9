#pragma once

#include <Eigen/Core>

namespace opplab {

// LLL reduction of the lattice spanned by the ROWS of `basis`, in place.
// Returns the integral unimodular matrix U with reduced = U · original.
// Floating-point Gram-Schmidt; adequate for the small dimensions (≤ 8) and
// moderate condition numbers this library feeds it.
Eigen::MatrixXd lll_reduce_rows(Eigen::MatrixXd& basis, double delta = 0.99);

}  // namespace opplab
