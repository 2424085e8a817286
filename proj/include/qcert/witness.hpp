#ifndef QCERT_WITNESS_HPP
#define QCERT_WITNESS_HPP

#include <string>

#include "qcert/channels.hpp"
#include "qcert/correlations.hpp"
#include "qcert/matrix.hpp"

namespace qcert {

enum class WitnessSet { local, quantum, nonsignaling };

// Linear channel witness W = gamma_S/(d_A0 d_B0) 1 - Omega on labels
// (A0, A1, B0, B1), with Omega diagonal in the |x a y b> basis.
struct ChannelWitness {
  ComplexMatrix w;            // on (A0, A1, B0, B1)
  BellFunctional gamma;       // defining functional
  double bound = 0;           // gamma_S used in the shift
  WitnessSet target = WitnessSet::local;
  int d_a0 = 0, d_a1 = 0, d_b0 = 0, d_b1 = 0;

  ChannelWitness() : gamma(Scenario{}) {}
};

// The diagonal Omega operator of a functional on (A0, A1, B0, B1).
ComplexMatrix witness_omega(const BellFunctional& gamma);

// Build the witness for the chosen set. The quantum bound comes from the
// level-2 moment relaxation (a certified upper bound on the quantum value).
ChannelWitness build_witness(const BellFunctional& gamma, WitnessSet set);

// Tr(J W); negative values certify the channel outside the target set.
// The bipartite Choi (A0,B0,A1,B1) is permuted to the witness label order.
double witness_value(const ChannelWitness& w, const ChoiChannel& ch);

}  // namespace qcert

#endif
