#include "qcert/witness.hpp"

#include <stdexcept>

#include "qcert/npa.hpp"
#include "qcert/tensor.hpp"

namespace qcert {

ComplexMatrix witness_omega(const BellFunctional& gamma) {
  const Scenario& sc = gamma.scenario();
  // labels (A0, A1, B0, B1) with dims (nx, na, ny, nb), basis |x a y b>
  std::vector<int> dims = {sc.nx, sc.na, sc.ny, sc.nb};
  int n = sc.nx * sc.na * sc.ny * sc.nb;
  ComplexMatrix omega(n, n, dims, dims);
  for (int x = 0; x < sc.nx; ++x)
    for (int a = 0; a < sc.na; ++a)
      for (int y = 0; y < sc.ny; ++y)
        for (int b = 0; b < sc.nb; ++b) {
          long long idx = flatten_index({x, a, y, b}, dims);
          omega(static_cast<int>(idx), static_cast<int>(idx)) =
              gamma.at(a, b, x, y);
        }
  return omega;
}

ChannelWitness build_witness(const BellFunctional& gamma, WitnessSet set) {
  ChannelWitness w;
  w.gamma = gamma;
  w.target = set;
  const Scenario& sc = gamma.scenario();
  w.d_a0 = sc.nx;
  w.d_a1 = sc.na;
  w.d_b0 = sc.ny;
  w.d_b1 = sc.nb;

  switch (set) {
    case WitnessSet::local:
      w.bound = max_bell_local(gamma);
      break;
    case WitnessSet::quantum: {
      NpaValue v = npa_max(gamma, 2);
      if (!v.converged)
        throw std::runtime_error("build_witness: quantum bound did not converge");
      // certified upper side of the bracket: sound as a bound on the set
      w.bound = v.upper;
      break;
    }
    case WitnessSet::nonsignaling:
      w.bound = max_bell_ns(gamma);
      break;
  }

  ComplexMatrix omega = witness_omega(gamma);
  ComplexMatrix shift = ComplexMatrix::identity(omega.rows()) *
                        (w.bound / (w.d_a0 * w.d_b0));
  w.w = shift - omega;
  w.w.set_dims(omega.row_dims(), omega.col_dims());
  return w;
}

double witness_value(const ChannelWitness& w, const ChoiChannel& ch) {
  if (!ch.is_bipartite())
    throw std::invalid_argument("witness_value: bipartite channel required");
  if (ch.d_a0() != w.d_a0 || ch.d_a1() != w.d_a1 || ch.d_b0() != w.d_b0 ||
      ch.d_b1() != w.d_b1)
    throw std::invalid_argument("witness_value: dimension mismatch");
  // permute Choi (A0,B0,A1,B1) -> (A0,A1,B0,B1)
  ComplexMatrix j = permute_subsystems(ch.choi(), {0, 2, 1, 3});
  return (j * w.w).trace().real();
}

}  // namespace qcert
