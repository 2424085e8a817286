#ifndef QCERT_RNG_HPP
#define QCERT_RNG_HPP

#include <cstdint>
#include <vector>

#include "qcert/matrix.hpp"

namespace qcert {

// Deterministic random source. Gaussians are produced by Box-Muller from the
// raw engine so streams are reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  uint64_t next_u64();
  double uniform();            // [0,1)
  double gaussian();           // standard normal
  cplx complex_gaussian();     // (g + i g)/sqrt(2)
  int uniform_int(int n);      // [0,n)

  // Random vector on the probability simplex (exponential spacings).
  std::vector<double> simplex_weights(int n);

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0;
};

// Ginibre matrix with iid complex Gaussian entries.
ComplexMatrix random_ginibre(Rng& rng, int rows, int cols);

// Haar-random unitary (QR of Ginibre with phase correction).
ComplexMatrix random_unitary(Rng& rng, int d);

// Haar-random pure state as a density matrix.
ComplexMatrix random_pure_state(Rng& rng, int d);

// Full-rank random density matrix GG^dag / Tr.
ComplexMatrix random_density(Rng& rng, int d);

// Random isometry d_in -> d_in * env truncated from a Haar unitary.
ComplexMatrix random_isometry(Rng& rng, int rows, int cols);

// Random CPTP channel of the given Kraus rank, as a list of Kraus operators.
std::vector<ComplexMatrix> random_kraus_set(Rng& rng, int d_in, int d_out,
                                            int rank);

// Random projective measurement with `outcomes` effects of equal rank
// (requires outcomes | d): columns of a Haar unitary grouped into projectors.
std::vector<ComplexMatrix> random_projective_measurement(Rng& rng, int d,
                                                         int outcomes);

}  // namespace qcert

#endif
