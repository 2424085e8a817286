#ifndef QCERT_LP_HPP
#define QCERT_LP_HPP

#include <vector>

namespace qcert {

//=========================================================================
// Dense two-phase simplex for small linear programs
//=========================================================================
//
//   minimize    c' x
//   subject to  A x = b,  x >= 0
//
// Infeasible problems return a Farkas certificate y with y'A <= 0 and
// y'b > 0. Optimal problems return the primal solution and dual prices.

struct LpProblem {
  int m = 0, n = 0;
  std::vector<double> a;  // row-major m x n
  std::vector<double> b;  // m
  std::vector<double> c;  // n
  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::iteration_limit;
  double objective = 0;
  std::vector<double> x;        // primal (n)
  std::vector<double> y;        // dual prices / Farkas certificate (m)
  double infeasibility = 0;     // phase-1 objective
};

LpResult solve_lp(const LpProblem& p);

}  // namespace qcert

#endif
