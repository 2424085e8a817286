#ifndef QCERT_MATRIX_HPP
#define QCERT_MATRIX_HPP

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace qcert {

using cplx = std::complex<double>;

//=========================================================================
// ComplexMatrix: dense complex matrix with subsystem-dimension metadata
//=========================================================================
//
// Entries are stored row-major. The row (column) index is a composite of
// the subsystem dimensions in `row_dims` (`col_dims`): for dims (d0,d1,...)
// the leftmost factor is the most significant digit of the flat index.
// Every module inherits this single convention.

class ComplexMatrix {
 public:
  ComplexMatrix() : rows_(0), cols_(0) {}
  ComplexMatrix(int rows, int cols)
      : rows_(rows),
        cols_(cols),
        row_dims_{rows},
        col_dims_{cols},
        data_(static_cast<size_t>(rows) * cols, cplx(0, 0)) {}
  ComplexMatrix(int rows, int cols, std::vector<int> row_dims,
                std::vector<int> col_dims);

  static ComplexMatrix identity(int n);
  static ComplexMatrix zero(int rows, int cols);
  // Build from nested initializer lists, row by row.
  static ComplexMatrix from_rows(
      std::initializer_list<std::initializer_list<cplx>> rows);
  // Column vector from amplitudes.
  static ComplexMatrix column(const std::vector<cplx>& amplitudes);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  const std::vector<int>& row_dims() const { return row_dims_; }
  const std::vector<int>& col_dims() const { return col_dims_; }
  void set_dims(std::vector<int> row_dims, std::vector<int> col_dims);
  // Square matrices with matching factorizations only.
  const std::vector<int>& dims() const;

  cplx& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  const cplx& operator()(int r, int c) const {
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }

  ComplexMatrix operator+(const ComplexMatrix& o) const;
  ComplexMatrix operator-(const ComplexMatrix& o) const;
  ComplexMatrix operator*(const ComplexMatrix& o) const;
  ComplexMatrix operator*(cplx s) const;
  ComplexMatrix& operator+=(const ComplexMatrix& o);

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  cplx trace() const;
  double max_abs() const;
  double frobenius_norm() const;
  double max_abs_diff(const ComplexMatrix& o) const;
  bool is_hermitian(double tol = 1e-12) const;

  // Largest |entry - entry^dag| deviation; 0 for exactly Hermitian input.
  double hermiticity_residual() const;

 private:
  int rows_, cols_;
  std::vector<int> row_dims_, col_dims_;
  std::vector<cplx> data_;
};

ComplexMatrix operator*(cplx s, const ComplexMatrix& m);

//=========================================================================
// SubsystemIndex: ordered labelled subsystems
//=========================================================================

struct Subsystem {
  std::string label;
  int dim;
};

class SubsystemIndex {
 public:
  SubsystemIndex() = default;
  SubsystemIndex(std::initializer_list<Subsystem> subs);
  explicit SubsystemIndex(std::vector<Subsystem> subs);

  int size() const { return static_cast<int>(subs_.size()); }
  const Subsystem& at(int i) const { return subs_[i]; }
  int total_dim() const;
  int dim(const std::string& label) const;
  // Position of a label; throws on unknown label.
  int position(const std::string& label) const;
  std::vector<int> positions(const std::vector<std::string>& labels) const;
  std::vector<int> dims_vector() const;
  bool has(const std::string& label) const;

 private:
  std::vector<Subsystem> subs_;
};

}  // namespace qcert

#endif
