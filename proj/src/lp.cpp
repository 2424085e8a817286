#include "qcert/lp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace qcert {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kReducedCostTol = 1e-9;
constexpr int kMaxIter = 20000;

struct Tableau {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<int> basis;
  int n_real;  // columns beyond this are artificials

  int m() const { return static_cast<int>(a.rows()); }
  int n() const { return static_cast<int>(a.cols()); }
};

// Revised simplex core. Returns false on iteration limit.
bool simplex_core(Tableau& t, bool ban_artificials, Eigen::VectorXd* y_out) {
  int m = t.m(), n = t.n();
  Eigen::MatrixXd binv;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    Eigen::MatrixXd bmat(m, m);
    for (int i = 0; i < m; ++i) bmat.col(i) = t.a.col(t.basis[i]);
    binv = bmat.partialPivLu().inverse();
    Eigen::VectorXd xb = binv * t.b;
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb(i) = t.c(t.basis[i]);
    Eigen::VectorXd y = binv.transpose() * cb;
    if (y_out) *y_out = y;

    bool bland = iter > 4 * (m + n);
    int enter = -1;
    double best = -kReducedCostTol;
    for (int j = 0; j < n; ++j) {
      if (ban_artificials && j >= t.n_real) continue;
      bool basic = false;
      for (int i = 0; i < m; ++i)
        if (t.basis[i] == j) { basic = true; break; }
      if (basic) continue;
      double rc = t.c(j) - y.dot(t.a.col(j));
      if (bland) {
        if (rc < -kReducedCostTol) { enter = j; break; }
      } else if (rc < best) {
        best = rc;
        enter = j;
      }
    }
    if (enter < 0) return true;  // optimal

    Eigen::VectorXd w = binv * t.a.col(enter);
    int leave = -1;
    double best_ratio = 0;
    for (int i = 0; i < m; ++i) {
      if (w(i) > kPivotTol) {
        double ratio = std::max(xb(i), 0.0) / w(i);
        if (leave < 0 || ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 &&
             t.basis[i] < t.basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) return true;  // unbounded; caller detects via objective
    t.basis[leave] = enter;
  }
  return false;
}

double objective_of(const Tableau& t) {
  Eigen::MatrixXd bmat(t.m(), t.m());
  for (int i = 0; i < t.m(); ++i) bmat.col(i) = t.a.col(t.basis[i]);
  Eigen::VectorXd xb = bmat.partialPivLu().solve(t.b);
  double obj = 0;
  for (int i = 0; i < t.m(); ++i) obj += t.c(t.basis[i]) * xb(i);
  return obj;
}

}  // namespace

LpResult solve_lp(const LpProblem& p) {
  int m = p.m, n = p.n;
  Tableau t;
  t.a.resize(m, n + m);
  t.b.resize(m);
  t.c = Eigen::VectorXd::Zero(n + m);
  t.n_real = n;
  for (int i = 0; i < m; ++i) {
    double sign = p.b[i] >= 0 ? 1.0 : -1.0;
    for (int j = 0; j < n; ++j) t.a(i, j) = sign * p.at(i, j);
    t.b(i) = sign * p.b[i];
  }
  // artificial columns
  t.a.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  for (int j = 0; j < m; ++j) t.c(n + j) = 1.0;
  t.basis.resize(m);
  for (int i = 0; i < m; ++i) t.basis[i] = n + i;

  LpResult res;
  Eigen::VectorXd y;
  // Phase 1
  if (!simplex_core(t, false, &y)) {
    res.status = LpStatus::iteration_limit;
    return res;
  }
  double phase1 = objective_of(t);
  res.infeasibility = phase1;
  if (phase1 > 1e-9) {
    res.status = LpStatus::infeasible;
    // Undo the row sign flips so y certifies against the original data.
    res.y.resize(m);
    for (int i = 0; i < m; ++i)
      res.y[i] = (p.b[i] >= 0 ? 1.0 : -1.0) * y(i);
    return res;
  }

  // Phase 2 with real costs, artificials banned from entering.
  for (int j = 0; j < n; ++j) t.c(j) = p.c[j];
  for (int j = 0; j < m; ++j) t.c(n + j) = 0.0;
  if (!simplex_core(t, true, &y)) {
    res.status = LpStatus::iteration_limit;
    return res;
  }

  Eigen::MatrixXd bmat(m, m);
  for (int i = 0; i < m; ++i) bmat.col(i) = t.a.col(t.basis[i]);
  Eigen::VectorXd xb = bmat.partialPivLu().solve(t.b);

  res.x.assign(n, 0.0);
  bool unbounded = false;
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] < n) res.x[t.basis[i]] = std::max(xb(i), 0.0);
  }
  // Detect unboundedness: re-check reduced costs; a negative one with no
  // blocking row means simplex_core exited on an unbounded ray.
  Eigen::VectorXd cb(m);
  for (int i = 0; i < m; ++i) cb(i) = t.c(t.basis[i]);
  Eigen::VectorXd yf = bmat.transpose().partialPivLu().solve(cb);
  for (int j = 0; j < n && !unbounded; ++j) {
    double rc = t.c(j) - yf.dot(t.a.col(j));
    if (rc < -1e-7) {
      Eigen::VectorXd w = bmat.partialPivLu().solve(t.a.col(j));
      if ((w.array() <= kPivotTol).all()) unbounded = true;
    }
  }
  if (unbounded) {
    res.status = LpStatus::unbounded;
    return res;
  }

  res.status = LpStatus::optimal;
  res.objective = 0;
  for (int j = 0; j < n; ++j) res.objective += p.c[j] * res.x[j];
  res.y.resize(m);
  for (int i = 0; i < m; ++i)
    res.y[i] = (p.b[i] >= 0 ? 1.0 : -1.0) * yf(i);
  return res;
}

}  // namespace qcert
