#ifndef QCERT_CATALOG_HPP
#define QCERT_CATALOG_HPP

#include <vector>

#include "qcert/channels.hpp"
#include "qcert/matrix.hpp"

namespace qcert::catalog {

// Two-bit flattening convention used when reading a printed two-qubit
// formula into flat indices: |m,n> -> 2m+n (first_major) or m+2n
// (second_major).
enum class BitOrder { first_major, second_major };

// Base used when reading printed flat matrix coefficients.
enum class IndexBase { zero_based, one_based };

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();

// Projector |v><v| from amplitudes (normalized).
ComplexMatrix pure_state(const std::vector<cplx>& amplitudes);

// (|0...0> + ... + |d-1...d-1>)/sqrt(d) on two d-level systems.
ComplexMatrix max_entangled_state(int d);

// |+>^{x2} density matrix: every entry 1/4.
ComplexMatrix plus_plus_state();

// The rank-one sign Gram 4 |psi><psi| with |psi> = (|0+> + |1->)/sqrt 2;
// dephasing |++><++| by it yields the Bell state |psi>.
ComplexMatrix bell_sign_gram();

// D_q . D'_p applied to |++><++|: unit diagonal, (1-q) off-diagonal and
// x = (1-q)(1-2p) coherences to the fourth level (all over 4).
ComplexMatrix damped_plus_state(double p, double q);

// Choi of a unitary channel (monopartite, d = dim U).
ChoiChannel unitary_channel(const ComplexMatrix& u);

// Choi of a two-qubit unitary as a bipartite channel (A0,B0,A1,B1).
ChoiChannel bipartite_unitary_channel(const ComplexMatrix& u);

ChoiChannel cnot_channel();

// Completely depolarizing channel on dimension d.
ChoiChannel depolarizing_channel(int d);

// The two-qubit unitary mapping the computational basis to Bell states,
// U |i+j, j> = (X^i Z^j x 1)|phi+>, read under the given bit order.
ComplexMatrix bell_basis_unitary(BitOrder order);

// (H x H) U (1 x H) for the Bell-basis unitary above, same bit order.
ComplexMatrix rotated_bell_basis_unitary(BitOrder order);

// The 16x16 dephasing Gram that lifts the local unitary 1 x X to the
// controlled unitary |0><0| x X + |1><1| x Y when Schur-applied to its Choi.
// `base` selects how the printed flat coefficients are read;
// `sign_corrected` replaces them with the phase-consistent rank-structured
// values (the only choice that is PSD and reproduces the unitary).
ComplexMatrix controlled_unitary_lift_gram(IndexBase base, bool sign_corrected);

// The target controlled unitary |0><0| x X + |1><1| x Y of the lift above.
ComplexMatrix controlled_xy_unitary();

// Tetrahedral qubit states (Bloch vectors of a regular tetrahedron);
// linearly independent and spanning the qubit operator space.
std::vector<ComplexMatrix> tetrahedral_states();

// The 16 pairwise tensor products of the tetrahedral states; spans the
// two-qubit operator space (informationally complete input family).
std::vector<ComplexMatrix> tetrahedral_pair_states();

// PR-box stochastic matrix (a xor b = xy), rows (a,b), cols (x,y).
std::vector<std::vector<double>> pr_box();
// Its companion with a xor b = xy xor 1.
std::vector<std::vector<double>> pr_box_flipped();
// Identity stochastic matrix of size n.
std::vector<std::vector<double>> identity_box(int n);
// s * R + t * S + (1-s-t) * identity on the PR-box pair above.
std::vector<std::vector<double>> box_mixture(double s, double t);

}  // namespace qcert::catalog

#endif
