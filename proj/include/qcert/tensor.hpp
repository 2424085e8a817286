#ifndef QCERT_TENSOR_HPP
#define QCERT_TENSOR_HPP

#include <utility>
#include <vector>

#include "qcert/matrix.hpp"

namespace qcert {

// Kronecker product; subsystem dims metadata is concatenated.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const std::vector<ComplexMatrix>& factors);

// Trace over the subsystems NOT listed in `keep` (positions into dims()).
// The result keeps the kept factors in their original order.
ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& keep);

// Transpose the indices of the selected subsystems only. Involution.
ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                const std::vector<int>& over);

// Reorder subsystems: new factor i is old factor order[i].
ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const std::vector<int>& order);

// Entrywise (Schur) product. Shapes must match.
ComplexMatrix schur(const ComplexMatrix& a, const ComplexMatrix& b);

struct HermEig {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // columns, orthonormal
};

// Eigendecomposition of a Hermitian matrix (tolerance 1e-10 on input).
HermEig herm_eig(const ComplexMatrix& m);

double min_eigenvalue(const ComplexMatrix& m);

// Extend an isometry (orthonormal columns within 1e-10) to a square unitary.
// The first block of columns equals the input; the rest come from pivoted
// Gram-Schmidt against canonical basis vectors, smallest index first.
ComplexMatrix unitary_completion(const ComplexMatrix& iso);

// Flat composite index helpers for the shared row-major convention
// (leftmost factor most significant).
std::vector<int> unflatten_index(long long flat, const std::vector<int>& dims);
long long flatten_index(const std::vector<int>& multi,
                        const std::vector<int>& dims);

}  // namespace qcert

#endif
