#ifndef QCERT_DEPHASING_HPP
#define QCERT_DEPHASING_HPP

#include <vector>

#include "qcert/channels.hpp"
#include "qcert/matrix.hpp"

namespace qcert {

//=========================================================================
// Gram-matrix dephasing of states and channels
//=========================================================================

// PSD matrix with unit diagonal; Schur-multiplying by one is a dephasing.
class GramMatrix {
 public:
  explicit GramMatrix(ComplexMatrix g, bool validate = true);
  static GramMatrix all_ones(int d);
  const ComplexMatrix& matrix() const { return g_; }
  int dim() const { return g_.rows(); }
  // (min eigenvalue, max |diag - 1|)
  std::pair<double, double> residuals() const;

 private:
  ComplexMatrix g_;
};

// Uniform damping strength q and fourth-level coherence damping p.
struct NoiseParams {
  double q = 0;  // in [0,1]
  double p = 0;  // in [0,1]
};

// D^G(rho) = rho . G (Schur product). Diagonal preserved exactly.
ComplexMatrix dephase_state(const ComplexMatrix& rho, const GramMatrix& g);

// Composition of the two parametric noises on a 4x4 state: fourth-level
// damping by p, then uniform damping by q.
ComplexMatrix apply_damping(const ComplexMatrix& rho, const NoiseParams& params);

// Memoryless dephasing of a channel: J -> J . (G_in x G_out).
ChoiChannel dephase_channel_memoryless(const ChoiChannel& ch,
                                       const GramMatrix& g_in,
                                       const GramMatrix& g_out);

// Local dephasing of a bipartite channel by per-label Grams
// (order A0, B0, A1, B1, matching the channel's Choi labels).
ChoiChannel dephase_local(const ChoiChannel& ch, const GramMatrix& g_a0,
                          const GramMatrix& g_b0, const GramMatrix& g_a1,
                          const GramMatrix& g_b1);

// (1-q) rho + q diag(rho).
ComplexMatrix noise_uniform_damping(const ComplexMatrix& rho, double q);

// Scale coherences to the fourth population level (flat index 3) by (1-2p).
// Input must be 4x4.
ComplexMatrix noise_fourth_level_damping(const ComplexMatrix& rho, double p);

//=========================================================================
// Decoherent action
//=========================================================================

// Real stochastic matrix S with S_{out,in} = <out| E(|in><in|) |out>,
// i.e. the diagonal of the Choi matrix reshaped. Columns sum to one.
// Rows/cols are flat composite indices (a,b)/(x,y) for bipartite channels.
std::vector<std::vector<double>> decoherent_action(const ChoiChannel& ch);

// Same map computed from Kraus operators: S = sum_i K_i . K_i^*.
std::vector<std::vector<double>> decoherent_action(const KrausChannel& k);

// Embed a stochastic matrix as the diagonal-Choi classical channel.
ChoiChannel classical_channel(const std::vector<std::vector<double>>& s);

double column_sum_residual(const std::vector<std::vector<double>>& s);

}  // namespace qcert

#endif
