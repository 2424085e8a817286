#ifndef QCERT_SDP_HPP
#define QCERT_SDP_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace qcert {

//=========================================================================
// Small dense semidefinite programming
//=========================================================================
//
//   primal:  min <C,X>   s.t.  <A_i,X> = b_i,  X >= 0
//   dual:    max b'y     s.t.  sum_i y_i A_i + S = C,  S >= 0
//
// over block-diagonal complex Hermitian matrices, <A,B> = Re Tr(AB).
// Solved by a primal-dual predictor-corrector interior-point method.

struct SdpEntry {
  int block;
  int row, col;               // upper triangle (row <= col); Hermitian completion implied
  std::complex<double> value;
};

struct SdpMatrix {
  std::vector<SdpEntry> entries;
  void add(int block, int row, int col, std::complex<double> v);
};

struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<SdpMatrix> constraints;  // A_i
  std::vector<double> b;
  SdpMatrix cost;                      // C
};

struct SdpOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iterations = 200;
  // When finite: stop once the certified bracket [dual, primal] separates
  // from this value by `decide_gap` (feasibility-checked on both sides).
  double decide_threshold = std::numeric_limits<double>::quiet_NaN();
  double decide_gap = 1e-7;
};

enum class SdpStatus { optimal, iteration_limit, numerical_failure };

struct SdpSolution {
  SdpStatus status = SdpStatus::numerical_failure;
  double primal_objective = 0;
  double dual_objective = 0;
  double gap = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  int iterations = 0;
  bool decided_early = false;  // bracket separated from decide_threshold
  std::vector<double> y;
  std::vector<Eigen::MatrixXcd> x_blocks;
  std::vector<Eigen::MatrixXcd> s_blocks;
  bool converged() const { return status == SdpStatus::optimal; }
};

SdpSolution solve_sdp(const SdpProblem& prob, const SdpOptions& opts = {});

}  // namespace qcert

#endif
