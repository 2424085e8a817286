#ifndef QCERT_NEGATIVITY_HPP
#define QCERT_NEGATIVITY_HPP

#include <vector>

#include "qcert/matrix.hpp"

namespace qcert {

// Entanglement negativity across the given cut: sum of |negative
// eigenvalues| of the partial transpose over `transposed_positions`.
double negativity(const ComplexMatrix& rho,
                  const std::vector<int>& transposed_positions);

// Negativity of the damped |++><++| family on an n x n grid over
// (p, q) in [0,1]^2. grid[i][j] corresponds to p = i/(n-1), q = j/(n-1).
std::vector<std::vector<double>> negativity_grid(int resolution, int jobs = 0);

}  // namespace qcert

#endif
