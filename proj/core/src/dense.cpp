#include "butterfly/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace butterfly {

DenseMatrix DenseMatrix::identity(std::size_t n, Field f) {
  DenseMatrix m(n, n, f);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Cx{1.0, 0.0};
  return m;
}

bool DenseMatrix::is_real(double tol) const {
  for (const Cx& e : entries)
    if (std::abs(e.imag()) > tol) return false;
  return true;
}

void dense_matvec(const DenseMatrix& a, std::span<const Cx> x, std::span<Cx> y) {
  if (x.size() != a.cols || y.size() != a.rows)
    throw std::invalid_argument("dense_matvec: shape mismatch");
  for (std::size_t i = 0; i < a.rows; ++i) {
    const Cx* r = a.row(i);
    Cx acc{0.0, 0.0};
    for (std::size_t j = 0; j < a.cols; ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
}

std::vector<Cx> dense_matvec(const DenseMatrix& a, std::span<const Cx> x) {
  std::vector<Cx> y(a.rows);
  dense_matvec(a, x, y);
  return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
  DenseMatrix c(a.rows, b.cols,
                (a.field == Field::Real && b.field == Field::Real) ? Field::Real
                                                                   : Field::Complex);
  for (std::size_t i = 0; i < a.rows; ++i) {
    Cx* out = c.row(i);
    const Cx* ra = a.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const Cx v = ra[k];
      if (v == Cx{0.0, 0.0}) continue;
      const Cx* rb = b.row(k);
      for (std::size_t j = 0; j < b.cols; ++j) out[j] += v * rb[j];
    }
  }
  return c;
}

DenseMatrix conj_transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols, a.rows, a.field);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t.at(j, i) = std::conj(a.at(i, j));
  return t;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("subtract: shape mismatch");
  DenseMatrix c(a.rows, a.cols,
                (a.field == Field::Real && b.field == Field::Real) ? Field::Real
                                                                   : Field::Complex);
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    c.entries[i] = a.entries[i] - b.entries[i];
  return c;
}

DenseMatrix real_part(const DenseMatrix& a) {
  DenseMatrix c(a.rows, a.cols, Field::Real);
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    c.entries[i] = Cx{a.entries[i].real(), 0.0};
  return c;
}

double frobenius_norm(const DenseMatrix& a) {
  double sum = 0.0;
  for (const Cx& e : a.entries) sum += std::norm(e);
  return std::sqrt(sum);
}

double frobenius_rmse(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("frobenius_rmse: shape mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    sum += std::norm(a.entries[i] - b.entries[i]);
  return std::sqrt(sum / static_cast<double>(a.entries.size()));
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (const Cx& e : a.entries) m = std::max(m, std::abs(e));
  return m;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    m = std::max(m, std::abs(a.entries[i] - b.entries[i]));
  return m;
}

double max_abs_imag(const DenseMatrix& a) {
  double m = 0.0;
  for (const Cx& e : a.entries) m = std::max(m, std::abs(e.imag()));
  return m;
}

double norm2(std::span<const Cx> x) {
  double sum = 0.0;
  for (const Cx& e : x) sum += std::norm(e);
  return std::sqrt(sum);
}

double max_abs_diff(std::span<const Cx> a, std::span<const Cx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace butterfly
