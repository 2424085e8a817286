#include "qcert/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace qcert {

static long long product(const std::vector<int>& v) {
  long long p = 1;
  for (int d : v) p *= d;
  return p;
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<int> row_dims,
                             std::vector<int> col_dims)
    : rows_(rows),
      cols_(cols),
      row_dims_(std::move(row_dims)),
      col_dims_(std::move(col_dims)),
      data_(static_cast<size_t>(rows) * cols, cplx(0, 0)) {
  if (product(row_dims_) != rows_ || product(col_dims_) != cols_)
    throw std::invalid_argument("ComplexMatrix: dims do not factor the shape");
}

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zero(int rows, int cols) {
  return ComplexMatrix(rows, cols);
}

ComplexMatrix ComplexMatrix::from_rows(
    std::initializer_list<std::initializer_list<cplx>> rows) {
  int r = static_cast<int>(rows.size());
  int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  ComplexMatrix m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c)
      throw std::invalid_argument("from_rows: ragged rows");
    int j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

ComplexMatrix ComplexMatrix::column(const std::vector<cplx>& amplitudes) {
  ComplexMatrix m(static_cast<int>(amplitudes.size()), 1);
  for (size_t i = 0; i < amplitudes.size(); ++i) m(static_cast<int>(i), 0) = amplitudes[i];
  return m;
}

void ComplexMatrix::set_dims(std::vector<int> row_dims,
                             std::vector<int> col_dims) {
  if (product(row_dims) != rows_ || product(col_dims) != cols_)
    throw std::invalid_argument("set_dims: dims do not factor the shape");
  row_dims_ = std::move(row_dims);
  col_dims_ = std::move(col_dims);
}

const std::vector<int>& ComplexMatrix::dims() const {
  if (row_dims_ != col_dims_)
    throw std::logic_error("dims(): row and column factorizations differ");
  return row_dims_;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("matrix add: shape mismatch");
  ComplexMatrix r = *this;
  for (size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
  return r;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("matrix sub: shape mismatch");
  ComplexMatrix r = *this;
  for (size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
  return r;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("matrix mul: shape mismatch");
  ComplexMatrix r(rows_, o.cols_, row_dims_, o.col_dims_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      cplx a = (*this)(i, k);
      if (a == cplx(0, 0)) continue;
      for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  }
  return r;
}

ComplexMatrix ComplexMatrix::operator*(cplx s) const {
  ComplexMatrix r = *this;
  for (auto& v : r.data_) v *= s;
  return r;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("matrix add: shape mismatch");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix operator*(cplx s, const ComplexMatrix& m) { return m * s; }

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(cols_, rows_, col_dims_, row_dims_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix r(cols_, rows_, col_dims_, row_dims_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix r = *this;
  for (auto& v : r.data_) v = std::conj(v);
  return r;
}

cplx ComplexMatrix::trace() const {
  if (!is_square()) throw std::logic_error("trace: non-square matrix");
  cplx t(0, 0);
  for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0;
  for (size_t i = 0; i < data_.size(); ++i)
    m = std::max(m, std::abs(data_[i] - o.data_[i]));
  return m;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  return is_square() && hermiticity_residual() <= tol;
}

double ComplexMatrix::hermiticity_residual() const {
  if (!is_square()) return std::numeric_limits<double>::infinity();
  double m = 0;
  for (int i = 0; i < rows_; ++i)
    for (int j = i; j < cols_; ++j)
      m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return m;
}

//=========================================================================
// SubsystemIndex
//=========================================================================

SubsystemIndex::SubsystemIndex(std::initializer_list<Subsystem> subs)
    : SubsystemIndex(std::vector<Subsystem>(subs)) {}

SubsystemIndex::SubsystemIndex(std::vector<Subsystem> subs)
    : subs_(std::move(subs)) {
  std::set<std::string> seen;
  for (const auto& s : subs_) {
    if (s.dim < 1) throw std::invalid_argument("SubsystemIndex: dim < 1");
    if (!seen.insert(s.label).second)
      throw std::invalid_argument("SubsystemIndex: duplicate label " + s.label);
  }
}

int SubsystemIndex::total_dim() const {
  int p = 1;
  for (const auto& s : subs_) p *= s.dim;
  return p;
}

int SubsystemIndex::dim(const std::string& label) const {
  return subs_[position(label)].dim;
}

int SubsystemIndex::position(const std::string& label) const {
  for (size_t i = 0; i < subs_.size(); ++i)
    if (subs_[i].label == label) return static_cast<int>(i);
  throw std::invalid_argument("SubsystemIndex: unknown label " + label);
}

std::vector<int> SubsystemIndex::positions(
    const std::vector<std::string>& labels) const {
  std::vector<int> p;
  p.reserve(labels.size());
  for (const auto& l : labels) p.push_back(position(l));
  return p;
}

std::vector<int> SubsystemIndex::dims_vector() const {
  std::vector<int> d;
  d.reserve(subs_.size());
  for (const auto& s : subs_) d.push_back(s.dim);
  return d;
}

bool SubsystemIndex::has(const std::string& label) const {
  for (const auto& s : subs_)
    if (s.label == label) return true;
  return false;
}

}  // namespace qcert
