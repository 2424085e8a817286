#include "qcert/sdp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace qcert {

using Eigen::MatrixXcd;
using Eigen::VectorXd;
using cdbl = std::complex<double>;

void SdpMatrix::add(int block, int row, int col, cdbl v) {
  if (row > col) {
    std::swap(row, col);
    v = std::conj(v);
  }
  entries.push_back({block, row, col, v});
}

namespace {

using Blocks = std::vector<MatrixXcd>;

Blocks zero_blocks(const std::vector<int>& dims) {
  Blocks b;
  b.reserve(dims.size());
  for (int d : dims) b.push_back(MatrixXcd::Zero(d, d));
  return b;
}

Blocks identity_blocks(const std::vector<int>& dims, double scale) {
  Blocks b;
  b.reserve(dims.size());
  for (int d : dims) b.push_back(scale * MatrixXcd::Identity(d, d));
  return b;
}

void add_sparse(Blocks& dst, const SdpMatrix& m, double scale) {
  for (const auto& e : m.entries) {
    dst[e.block](e.row, e.col) += scale * e.value;
    if (e.row != e.col) dst[e.block](e.col, e.row) += scale * std::conj(e.value);
  }
}

// <A, M> = Re Tr(A M) for sparse Hermitian A against a dense matrix.
double sparse_inner(const SdpMatrix& a, const Blocks& m) {
  double s = 0;
  for (const auto& e : a.entries) {
    s += std::real(e.value * m[e.block](e.col, e.row));
    if (e.row != e.col)
      s += std::real(std::conj(e.value) * m[e.block](e.row, e.col));
  }
  return s;
}

double frob_inner(const Blocks& a, const Blocks& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i)
    s += std::real((a[i].adjoint() * b[i]).trace());
  return s;
}

double max_norm(const Blocks& a) {
  double s = 0;
  for (const auto& m : a)
    if (m.size() > 0) s = std::max(s, m.cwiseAbs().maxCoeff());
  return s;
}

void symmetrize(Blocks& a) {
  for (auto& m : a) m = ((m + m.adjoint()) / 2.0).eval();
}

// Nesterov-Todd scaling point: W S W = X, via W = Ls^-dag M^1/2 Ls^-1 with
// S = Ls Ls^dag and M = Ls^dag X Ls.
bool nt_scaling(const Blocks& x, const Blocks& s, Blocks& w) {
  w.resize(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    Eigen::LLT<MatrixXcd> llt(s[i]);
    if (llt.info() != Eigen::Success) return false;
    MatrixXcd l = llt.matrixL();
    MatrixXcd m = l.adjoint() * x[i] * l;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es((m + m.adjoint()) / 2.0);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0) return false;
    MatrixXcd msqrt = es.eigenvectors() *
                      es.eigenvalues().cwiseSqrt().asDiagonal() *
                      es.eigenvectors().adjoint();
    MatrixXcd linv_t = l.adjoint()
                           .triangularView<Eigen::Upper>()
                           .solve(MatrixXcd::Identity(l.rows(), l.cols()));
    w[i] = linv_t * msqrt * linv_t.adjoint();
    w[i] = ((w[i] + w[i].adjoint()) / 2.0).eval();
  }
  return true;
}

// Largest alpha in (0, cap] with P + alpha D >= 0. A full step is accepted
// on a single Cholesky probe (valid by cone convexity); otherwise the bound
// comes from the smallest eigenvalue of L^-1 D L^-dag with P = L L^dag.
double max_step(const Blocks& p, const Blocks& d, double cap) {
  double alpha = cap;
  for (size_t i = 0; i < p.size(); ++i) {
    Eigen::LLT<MatrixXcd> probe(p[i] + cap * d[i]);
    if (probe.info() == Eigen::Success) continue;
    Eigen::LLT<MatrixXcd> llt(p[i]);
    if (llt.info() != Eigen::Success) return 0;
    MatrixXcd l = llt.matrixL();
    MatrixXcd w = l.triangularView<Eigen::Lower>().solve(d[i]);
    w = l.triangularView<Eigen::Lower>().solve(w.adjoint()).adjoint();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es((w + w.adjoint()) / 2.0);
    double lmin = es.eigenvalues().minCoeff();
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& prob, const SdpOptions& opts) {
  const int m = static_cast<int>(prob.constraints.size());
  const int nblocks = static_cast<int>(prob.block_dims.size());
  int ntotal = 0;
  for (int d : prob.block_dims) ntotal += d;
  const bool trace = std::getenv("QCERT_SDP_TRACE") != nullptr;

  SdpSolution sol;
  sol.y.assign(m, 0.0);
  bool failed = false;

  if (m == 0) {
    // min <C,X> over X >= 0 alone: optimum 0 at X = 0 when C is PSD
    sol.x_blocks = zero_blocks(prob.block_dims);
    Blocks cm = zero_blocks(prob.block_dims);
    add_sparse(cm, prob.cost, 1.0);
    double min_eig = 0;
    for (const auto& blk : cm) {
      if (blk.rows() == 0) continue;
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es((blk + blk.adjoint()) / 2.0);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    sol.s_blocks = std::move(cm);
    sol.status = min_eig >= -1e-12 ? SdpStatus::optimal : SdpStatus::numerical_failure;
    return sol;
  }

  // data scale for initialization
  double data_scale = 1.0;
  for (const auto& a : prob.constraints)
    for (const auto& e : a.entries) data_scale = std::max(data_scale, std::abs(e.value));
  for (const auto& e : prob.cost.entries)
    data_scale = std::max(data_scale, std::abs(e.value));
  double bmax = 1.0;
  for (double v : prob.b) bmax = std::max(bmax, std::abs(v));

  Blocks x = identity_blocks(prob.block_dims, std::max(std::sqrt(static_cast<double>(ntotal)), bmax));
  Blocks s = identity_blocks(prob.block_dims, data_scale * std::sqrt(static_cast<double>(ntotal)));
  VectorXd y = VectorXd::Zero(m);

  Blocks cmat = zero_blocks(prob.block_dims);
  add_sparse(cmat, prob.cost, 1.0);

  std::vector<std::vector<int>> touched(m);
  for (int i = 0; i < m; ++i) {
    std::vector<bool> seen(nblocks, false);
    for (const auto& e : prob.constraints[i].entries)
      if (!seen[e.block]) {
        seen[e.block] = true;
        touched[i].push_back(e.block);
      }
  }

  auto a_into = [&](const Blocks& mat, VectorXd& v) {
    for (int i = 0; i < m; ++i) v(i) = sparse_inner(prob.constraints[i], mat);
  };
  auto at_into = [&](const VectorXd& yy, Blocks& out) {
    for (auto& blk : out) blk.setZero();
    for (int i = 0; i < m; ++i)
      if (yy(i) != 0) add_sparse(out, prob.constraints[i], yy(i));
  };

  VectorXd bvec(m);
  for (int i = 0; i < m; ++i) bvec(i) = prob.b[i];

  Eigen::MatrixXd schur(m, m);
  // T_i = W A_i W, allocated once on the touched blocks
  std::vector<Blocks> tmats(m);
  for (int i = 0; i < m; ++i) {
    tmats[i] = Blocks(nblocks);
    for (int bnum : touched[i])
      tmats[i][bnum] = MatrixXcd::Zero(prob.block_dims[bnum], prob.block_dims[bnum]);
  }

  // reusable iteration workspace
  Blocks rd = zero_blocks(prob.block_dims);
  Blocks scratch = zero_blocks(prob.block_dims);
  Blocks sinv = zero_blocks(prob.block_dims);
  Blocks w_nt;
  Blocks work = zero_blocks(prob.block_dims);
  Blocks dxa = zero_blocks(prob.block_dims), dsa = zero_blocks(prob.block_dims);
  Blocks dx = zero_blocks(prob.block_dims), ds = zero_blocks(prob.block_dims);
  Blocks xa = zero_blocks(prob.block_dims), sa = zero_blocks(prob.block_dims);
  VectorXd rp(m), rhs(m), resid(m);

  // Gram factorization of the constraint set, for cheap projection of X onto
  // the affine subspace (small problems only)
  Eigen::LDLT<Eigen::MatrixXd> proj_fact;
  bool have_proj = false;
  if (m <= 1500) {
    Eigen::MatrixXd gram(m, m);
    Blocks ai = zero_blocks(prob.block_dims);
    for (int i = 0; i < m; ++i) {
      for (auto& blk : ai) blk.setZero();
      add_sparse(ai, prob.constraints[i], 1.0);
      for (int j = i; j < m; ++j) {
        double v = sparse_inner(prob.constraints[j], ai);
        gram(i, j) = v;
        gram(j, i) = v;
      }
    }
    for (int i = 0; i < m; ++i) gram(i, i) += 1e-12 * (1.0 + gram(i, i));
    proj_fact.compute(gram);
    have_proj = proj_fact.info() == Eigen::Success;
  }
  auto project_x = [&](Blocks& xx) {
    // late-stage cleanup only, reverted when it would leave the cone
    if (!have_proj) return;
    VectorXd rp2(m);
    a_into(xx, rp2);
    rp2 = bvec - rp2;
    double r = rp2.cwiseAbs().maxCoeff();
    if (r < 1e-15 * (1.0 + bmax) || r > 1e-7 * (1.0 + bmax)) return;
    VectorXd lambda = proj_fact.solve(rp2);
    Blocks trial = xx;
    for (int i = 0; i < m; ++i)
      if (lambda(i) != 0) add_sparse(trial, prob.constraints[i], lambda(i));
    for (const auto& blk : trial) {
      Eigen::LLT<MatrixXcd> llt(blk);
      if (llt.info() != Eigen::Success) return;
    }
    xx = std::move(trial);
  };

  // best-merit snapshot; late iterations can deteriorate numerically
  double best_merit = std::numeric_limits<double>::infinity();
  int best_age = 0;
  Blocks best_x, best_s;
  VectorXd best_y;
  double best_pobj = 0, best_dobj = 0, best_gap = 0, best_pres = 0, best_dres = 0;

  // DX = sigma*mu*S^-1 - X - W DS W  with  DS = Rd - A*(dy):
  //   M dy = b + A(W Rd W - sigma*mu*S^-1),  M_ij = <A_i, W A_j W>
  auto solve_direction = [&](double sigma_mu,
                             const Eigen::LDLT<Eigen::MatrixXd>& schur_fact,
                             Blocks& dx_out, Blocks& ds_out, VectorXd& dy_out) {
    for (int bnum = 0; bnum < nblocks; ++bnum) {
      work[bnum].noalias() = w_nt[bnum] * rd[bnum] * w_nt[bnum];
      if (sigma_mu != 0) work[bnum] -= sigma_mu * sinv[bnum];
    }
    a_into(work, rhs);
    rhs += bvec;
    dy_out = schur_fact.solve(rhs);
    for (int round = 0; round < 2; ++round) {
      for (int i = 0; i < m; ++i) {
        long double acc = rhs(i);
        for (int j = 0; j < m; ++j)
          acc -= static_cast<long double>(schur(i, j)) * dy_out(j);
        resid(i) = static_cast<double>(acc);
      }
      dy_out += schur_fact.solve(resid);
    }
    at_into(dy_out, scratch);
    for (int bnum = 0; bnum < nblocks; ++bnum) {
      ds_out[bnum] = rd[bnum] - scratch[bnum];
      dx_out[bnum].noalias() = -(w_nt[bnum] * ds_out[bnum] * w_nt[bnum]);
      dx_out[bnum] -= x[bnum];
      if (sigma_mu != 0) dx_out[bnum] += sigma_mu * sinv[bnum];
      dx_out[bnum] = ((dx_out[bnum] + dx_out[bnum].adjoint()) / 2.0).eval();
    }
  };

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    sol.iterations = iter + 1;

    // residuals
    a_into(x, rp);
    rp = bvec - rp;
    at_into(y, rd);
    for (int bnum = 0; bnum < nblocks; ++bnum)
      rd[bnum] = cmat[bnum] - rd[bnum] - s[bnum];
    double mu = frob_inner(x, s) / ntotal;
    double pobj = sparse_inner(prob.cost, x);
    double dobj = bvec.dot(y);
    double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    double pres = rp.cwiseAbs().maxCoeff() / (1.0 + bmax);
    double dres = max_norm(rd) / (1.0 + data_scale);

    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.gap = rel_gap;
    sol.primal_residual = pres;
    sol.dual_residual = dres;

    double merit = std::max({rel_gap, pres, dres});
    if (merit < best_merit) {
      best_merit = merit;
      best_age = 0;
      best_x = x;
      best_s = s;
      best_y = y;
      best_pobj = pobj;
      best_dobj = dobj;
      best_gap = rel_gap;
      best_pres = pres;
      best_dres = dres;
    } else if (++best_age > 15) {
      break;  // stalled; fall back to the best iterate seen
    }

    if (rel_gap < opts.gap_tol && pres < opts.feas_tol && dres < opts.feas_tol) {
      sol.status = SdpStatus::optimal;
      break;
    }

    // early decision: either certified side of the bracket clears the
    // threshold, so the caller's verdict cannot change anymore
    if (std::isfinite(opts.decide_threshold)) {
      bool above = dres < opts.feas_tol &&
                   dobj > opts.decide_threshold + opts.decide_gap;
      bool below = pres < opts.feas_tol &&
                   pobj < opts.decide_threshold - opts.decide_gap;
      if (above || below) {
        sol.decided_early = true;
        break;
      }
    }

    // S^-1 and the NT scaling point
    bool chol_ok = true;
    for (int bnum = 0; bnum < nblocks; ++bnum) {
      Eigen::LLT<MatrixXcd> llt(s[bnum]);
      if (llt.info() != Eigen::Success) {
        chol_ok = false;
        break;
      }
      sinv[bnum] = llt.solve(MatrixXcd::Identity(prob.block_dims[bnum], prob.block_dims[bnum]));
    }
    if (!chol_ok || !nt_scaling(x, s, w_nt)) {
      failed = iter == 0;
      break;
    }

    // T_i = W A_i W on touched blocks; Schur M_ij = Re <A_j, T_i>
    for (int i = 0; i < m; ++i) {
      for (int bnum : touched[i]) tmats[i][bnum].setZero();
      for (const auto& e : prob.constraints[i].entries) {
        tmats[i][e.block].noalias() +=
            w_nt[e.block].col(e.row) * (e.value * w_nt[e.block].row(e.col));
        if (e.row != e.col)
          tmats[i][e.block].noalias() +=
              w_nt[e.block].col(e.col) * (std::conj(e.value) * w_nt[e.block].row(e.row));
      }
    }
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        double v = 0;
        for (const auto& e : prob.constraints[j].entries) {
          if (tmats[i][e.block].size() == 0) continue;
          v += std::real(e.value * tmats[i][e.block](e.col, e.row));
          if (e.row != e.col)
            v += std::real(std::conj(e.value) * tmats[i][e.block](e.row, e.col));
        }
        schur(i, j) = v;
        schur(j, i) = v;
      }
    for (int i = 0; i < m; ++i) schur(i, i) += 1e-13 * (1.0 + schur(i, i));
    Eigen::LDLT<Eigen::MatrixXd> schur_fact(schur);
    if (schur_fact.info() != Eigen::Success) {
      failed = iter == 0;
      break;
    }

    // affine probe sets the centering weight, then a single corrected step
    VectorXd dya(m), dy(m);
    solve_direction(0.0, schur_fact, dxa, dsa, dya);
    double apa = max_step(x, dxa, 1.0);
    double ada = max_step(s, dsa, 1.0);
    for (int bnum = 0; bnum < nblocks; ++bnum) {
      xa[bnum] = x[bnum] + 0.98 * apa * dxa[bnum];
      sa[bnum] = s[bnum] + 0.98 * ada * dsa[bnum];
    }
    double mu_aff = frob_inner(xa, sa) / ntotal;
    double sigma = std::pow(mu_aff / mu, 3.0);
    sigma = std::min(std::max(sigma, 1e-6), 1.0);
    // near the optimum, approach gently: aggressive mu cuts outrun the
    // accuracy of the Schur solves and feasibility never catches up
    if (rel_gap < 1e-6) sigma = std::max(sigma, 0.1);

    solve_direction(sigma * mu, schur_fact, dx, ds, dy);

    double ap = 0.98 * max_step(x, dx, 1.0 / 0.98);
    double ad = 0.98 * max_step(s, ds, 1.0 / 0.98);
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);
    if (ap < 1e-10 && ad < 1e-10) break;  // no usable step remains
    for (int bnum = 0; bnum < nblocks; ++bnum) {
      x[bnum] += ap * dx[bnum];
      s[bnum] += ad * ds[bnum];
    }
    symmetrize(x);
    symmetrize(s);
    project_x(x);
    y += ad * dy;

    if (trace)
      std::fprintf(stderr,
                   "it %3d gap %.2e pres %.2e dres %.2e mu %.2e sigma %.2e "
                   "ap %.2e ad %.2e\n",
                   iter, rel_gap, pres, dres, mu, sigma, ap, ad);
  }

  // restore the best iterate when the final one is worse (not after an
  // early decision, whose bracket lives on the current iterate)
  if (!sol.decided_early &&
      best_merit < std::max({sol.gap, sol.primal_residual, sol.dual_residual})) {
    x = std::move(best_x);
    s = std::move(best_s);
    y = std::move(best_y);
    sol.primal_objective = best_pobj;
    sol.dual_objective = best_dobj;
    sol.gap = best_gap;
    sol.primal_residual = best_pres;
    sol.dual_residual = best_dres;
  }

  // primal polish: least-norm correction onto the affine constraints; the
  // late-iteration gap floor is set by the leftover primal infeasibility
  if (!failed && !sol.decided_early && have_proj && sol.primal_residual > 0) {
    Blocks xp = x;
    project_x(xp);
    VectorXd rp2(m);
    a_into(xp, rp2);
    double pres_p = (bvec - rp2).cwiseAbs().maxCoeff() / (1.0 + bmax);
    double pobj_p = sparse_inner(prob.cost, xp);
    double gap_p = std::abs(pobj_p - sol.dual_objective) /
                   (1.0 + std::abs(pobj_p) + std::abs(sol.dual_objective));
    if (std::max(gap_p, pres_p) < std::max(sol.gap, sol.primal_residual)) {
      x = std::move(xp);
      sol.primal_objective = pobj_p;
      sol.primal_residual = pres_p;
      sol.gap = gap_p;
    }
  }
  if (sol.gap < opts.gap_tol && sol.primal_residual < opts.feas_tol &&
      sol.dual_residual < opts.feas_tol)
    sol.status = SdpStatus::optimal;
  else if (sol.decided_early)
    sol.status = SdpStatus::iteration_limit;  // bracket decided, not fully solved
  else
    sol.status = failed ? SdpStatus::numerical_failure : SdpStatus::iteration_limit;

  sol.x_blocks = std::move(x);
  sol.s_blocks = std::move(s);
  for (int i = 0; i < m; ++i) sol.y[i] = y(i);
  return sol;
}

}  // namespace qcert
