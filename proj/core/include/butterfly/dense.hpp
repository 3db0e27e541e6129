#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace butterfly {

using Cx = std::complex<double>;

enum class Field { Real, Complex };

// Row-major dense complex matrix.  Real-field objects simply keep zero
// imaginary parts; the tag records which parameter space an object was built
// over, not a different storage layout.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Field field = Field::Complex;
  std::vector<Cx> entries;  // rows * cols, row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, Field f = Field::Complex)
      : rows(r), cols(c), field(f), entries(r * c, Cx{0.0, 0.0}) {}

  static DenseMatrix identity(std::size_t n, Field f = Field::Complex);

  Cx& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  const Cx& at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

  Cx* row(std::size_t i) { return entries.data() + i * cols; }
  const Cx* row(std::size_t i) const { return entries.data() + i * cols; }

  bool is_real(double tol = 0.0) const;
};

// y = A x; x.size() must equal A.cols.
std::vector<Cx> dense_matvec(const DenseMatrix& a, std::span<const Cx> x);
void dense_matvec(const DenseMatrix& a, std::span<const Cx> x, std::span<Cx> y);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix conj_transpose(const DenseMatrix& a);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix real_part(const DenseMatrix& a);

double frobenius_norm(const DenseMatrix& a);
// sqrt(sum |a_ij - b_ij|^2 / (rows*cols)): the scale-free recovery metric used
// throughout training and reporting.
double frobenius_rmse(const DenseMatrix& a, const DenseMatrix& b);
double max_abs(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double max_abs_imag(const DenseMatrix& a);

double norm2(std::span<const Cx> x);
double max_abs_diff(std::span<const Cx> a, std::span<const Cx> b);

}  // namespace butterfly
