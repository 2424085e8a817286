#include "qcert/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcert {

using EMat =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<int> unflatten_index(long long flat, const std::vector<int>& dims) {
  std::vector<int> idx(dims.size());
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % dims[i]);
    flat /= dims[i];
  }
  return idx;
}

long long flatten_index(const std::vector<int>& multi,
                        const std::vector<int>& dims) {
  long long flat = 0;
  for (size_t i = 0; i < dims.size(); ++i) flat = flat * dims[i] + multi[i];
  return flat;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  std::vector<int> rd = a.row_dims(), cd = a.col_dims();
  rd.insert(rd.end(), b.row_dims().begin(), b.row_dims().end());
  cd.insert(cd.end(), b.col_dims().begin(), b.col_dims().end());
  ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols(), rd, cd);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      cplx v = a(i, j);
      if (v == cplx(0, 0)) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          r(i * b.rows() + k, j * b.cols() + l) = v * b(k, l);
    }
  return r;
}

ComplexMatrix kron(const std::vector<ComplexMatrix>& factors) {
  if (factors.empty()) throw std::invalid_argument("kron: empty factor list");
  ComplexMatrix r = factors[0];
  for (size_t i = 1; i < factors.size(); ++i) r = kron(r, factors[i]);
  return r;
}

static void check_square_dims(const ComplexMatrix& m) {
  if (!m.is_square() || m.row_dims() != m.col_dims())
    throw std::invalid_argument("operation requires square matrix with matching dims");
}

static void check_positions(const std::vector<int>& pos, size_t nsub,
                            const char* what) {
  for (int p : pos)
    if (p < 0 || p >= static_cast<int>(nsub))
      throw std::invalid_argument(std::string(what) + ": subsystem position out of range");
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& keep) {
  check_square_dims(m);
  const std::vector<int>& dims = m.dims();
  std::vector<int> kp = keep;
  std::sort(kp.begin(), kp.end());
  kp.erase(std::unique(kp.begin(), kp.end()), kp.end());
  check_positions(kp, dims.size(), "partial_trace");

  std::vector<int> traced;
  for (int i = 0; i < static_cast<int>(dims.size()); ++i)
    if (!std::binary_search(kp.begin(), kp.end(), i)) traced.push_back(i);

  std::vector<int> keep_dims, traced_dims;
  for (int p : kp) keep_dims.push_back(dims[p]);
  for (int p : traced) traced_dims.push_back(dims[p]);
  long long nk = 1, nt = 1;
  for (int d : keep_dims) nk *= d;
  for (int d : traced_dims) nt *= d;

  ComplexMatrix out(static_cast<int>(nk), static_cast<int>(nk),
                    keep_dims.empty() ? std::vector<int>{1} : keep_dims,
                    keep_dims.empty() ? std::vector<int>{1} : keep_dims);

  std::vector<int> full_row(dims.size()), full_col(dims.size());
  for (long long rk = 0; rk < nk; ++rk) {
    std::vector<int> rk_idx = unflatten_index(rk, keep_dims.empty() ? std::vector<int>{1} : keep_dims);
    for (long long ck = 0; ck < nk; ++ck) {
      std::vector<int> ck_idx = unflatten_index(ck, keep_dims.empty() ? std::vector<int>{1} : keep_dims);
      cplx sum(0, 0);
      for (long long t = 0; t < nt; ++t) {
        std::vector<int> t_idx = unflatten_index(t, traced_dims.empty() ? std::vector<int>{1} : traced_dims);
        for (size_t i = 0; i < kp.size(); ++i) {
          full_row[kp[i]] = rk_idx[i];
          full_col[kp[i]] = ck_idx[i];
        }
        for (size_t i = 0; i < traced.size(); ++i) {
          full_row[traced[i]] = t_idx[i];
          full_col[traced[i]] = t_idx[i];
        }
        sum += m(static_cast<int>(flatten_index(full_row, dims)),
                 static_cast<int>(flatten_index(full_col, dims)));
      }
      out(static_cast<int>(rk), static_cast<int>(ck)) = sum;
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                const std::vector<int>& over) {
  check_square_dims(m);
  const std::vector<int>& dims = m.dims();
  check_positions(over, dims.size(), "partial_transpose");
  std::vector<bool> flip(dims.size(), false);
  for (int p : over) flip[p] = true;

  ComplexMatrix out(m.rows(), m.cols(), dims, dims);
  for (int r = 0; r < m.rows(); ++r) {
    std::vector<int> ri = unflatten_index(r, dims);
    for (int c = 0; c < m.cols(); ++c) {
      std::vector<int> ci = unflatten_index(c, dims);
      std::vector<int> nr = ri, nc = ci;
      for (size_t i = 0; i < dims.size(); ++i)
        if (flip[i]) std::swap(nr[i], nc[i]);
      out(static_cast<int>(flatten_index(nr, dims)),
          static_cast<int>(flatten_index(nc, dims))) = m(r, c);
    }
  }
  return out;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const std::vector<int>& order) {
  check_square_dims(m);
  const std::vector<int>& dims = m.dims();
  if (order.size() != dims.size())
    throw std::invalid_argument("permute_subsystems: order length mismatch");
  std::vector<bool> seen(dims.size(), false);
  for (int p : order) {
    if (p < 0 || p >= static_cast<int>(dims.size()) || seen[p])
      throw std::invalid_argument("permute_subsystems: invalid permutation");
    seen[p] = true;
  }
  std::vector<int> new_dims(dims.size());
  for (size_t i = 0; i < order.size(); ++i) new_dims[i] = dims[order[i]];

  ComplexMatrix out(m.rows(), m.cols(), new_dims, new_dims);
  for (int r = 0; r < m.rows(); ++r) {
    std::vector<int> ri = unflatten_index(r, dims);
    std::vector<int> nri(dims.size());
    for (size_t i = 0; i < order.size(); ++i) nri[i] = ri[order[i]];
    int nr = static_cast<int>(flatten_index(nri, new_dims));
    for (int c = 0; c < m.cols(); ++c) {
      std::vector<int> ci = unflatten_index(c, dims);
      std::vector<int> nci(dims.size());
      for (size_t i = 0; i < order.size(); ++i) nci[i] = ci[order[i]];
      out(nr, static_cast<int>(flatten_index(nci, new_dims))) = m(r, c);
    }
  }
  return out;
}

ComplexMatrix schur(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("schur: shape mismatch");
  ComplexMatrix r = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) * b(i, j);
  return r;
}

static EMat to_eigen(const ComplexMatrix& m) {
  EMat e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

HermEig herm_eig(const ComplexMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("herm_eig: non-square input");
  if (m.hermiticity_residual() > 1e-10)
    throw std::invalid_argument("herm_eig: input not Hermitian within 1e-10");
  EMat e = to_eigen(m);
  // symmetrize to kill the sub-tolerance asymmetry before factorizing
  Eigen::MatrixXcd h = (e + e.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("herm_eig: eigensolver failed");
  HermEig out;
  out.eigenvalues.resize(m.rows());
  out.eigenvectors = ComplexMatrix(m.rows(), m.cols(), m.row_dims(), m.col_dims());
  for (int i = 0; i < m.rows(); ++i) {
    out.eigenvalues[i] = solver.eigenvalues()(i);
    for (int j = 0; j < m.cols(); ++j)
      out.eigenvectors(i, j) = solver.eigenvectors()(i, j);
  }
  return out;
}

double min_eigenvalue(const ComplexMatrix& m) {
  return herm_eig(m).eigenvalues.front();
}

ComplexMatrix unitary_completion(const ComplexMatrix& iso) {
  int d = iso.rows(), k = iso.cols();
  if (k > d) throw std::invalid_argument("unitary_completion: more columns than rows");
  EMat v = to_eigen(iso);
  double ortho = (v.adjoint() * v - EMat::Identity(k, k)).cwiseAbs().maxCoeff();
  if (ortho > 1e-10)
    throw std::invalid_argument("unitary_completion: columns not orthonormal within 1e-10");

  Eigen::MatrixXcd q(d, d);
  q.leftCols(k) = v;
  int filled = k;
  for (int j = 0; j < d && filled < d; ++j) {
    Eigen::VectorXcd cand = Eigen::VectorXcd::Zero(d);
    cand(j) = 1.0;
    // two Gram-Schmidt passes for numerical orthogonality
    for (int pass = 0; pass < 2; ++pass)
      cand -= q.leftCols(filled) * (q.leftCols(filled).adjoint() * cand);
    double n = cand.norm();
    if (n > 1e-7) {
      q.col(filled++) = cand / n;
    }
  }
  if (filled != d)
    throw std::runtime_error("unitary_completion: failed to complete basis");

  ComplexMatrix out(d, d, iso.row_dims(), iso.row_dims());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = q(i, j);
  return out;
}

}  // namespace qcert
