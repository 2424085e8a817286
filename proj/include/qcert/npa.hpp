#ifndef QCERT_NPA_HPP
#define QCERT_NPA_HPP

#include <map>
#include <string>
#include <vector>

#include "qcert/correlations.hpp"
#include "qcert/report.hpp"

namespace qcert {

//=========================================================================
// Moment-matrix relaxations of the quantum set (levels 1 and 2)
//=========================================================================
//
// Two-outcome projective parameterization: one projector per setting
// (E_x for Alice, F_y for Bob), the complement implicit. Words are reduced
// under idempotence and the [E, F] = 0 commutation; w and its reverse share
// a moment.

struct MomentWord {
  std::vector<int> es;  // Alice projector indices, adjacent repeats removed
  std::vector<int> fs;  // Bob projector indices
  bool operator<(const MomentWord& o) const;
  bool operator==(const MomentWord& o) const = default;
  bool is_identity() const { return es.empty() && fs.empty(); }
};

struct MomentMatrixSpec {
  Scenario scenario;
  int level = 1;
  std::vector<MomentWord> words;          // rows/cols of the moment matrix
  std::vector<MomentWord> moments;        // distinct canonical moments, [0] = identity
  std::map<MomentWord, int> moment_index;
  // entry (i,j) -> index into `moments`
  std::vector<std::vector<int>> entry_moment;

  static MomentMatrixSpec build(const Scenario& sc, int level);
};

struct NpaValue {
  double value = 0;        // achieved by an exactly feasible moment matrix
  double upper = 0;        // weak-duality bound from the primal certificate
  double uncertainty = 0;  // bracket width |upper - value| plus residual slack
  bool converged = false;  // bracket certified within 1e-6
  int iterations = 0;
};

// Value of the level-k relaxation, an upper bound on the quantum value.
NpaValue npa_max(const BellFunctional& gamma, int level);

// Feasibility of a behavior inside the level-k relaxation. The margin is
// the largest t with M - tI >= 0 under the behavior pins; inside means
// margin >= -1e-9. Pins use setting-averaged marginals; disagreement
// beyond the slack is itself an outside certificate.
CertificateReport npa_membership(const ConditionalDistribution& p, int level);

}  // namespace qcert

#endif
