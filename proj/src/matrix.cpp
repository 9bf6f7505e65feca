#include "fbl/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "fbl/error.hpp"
#include "fbl/kernels.hpp"

namespace fbl {

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::invalid_argument, "multiply: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj != 0.0) kernels::axpy(bkj, a.col(k), c.col(j));
    }
  return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(Errc::invalid_argument, "subtract: shapes differ");
  Matrix c = a;
  for (std::size_t j = 0; j < a.cols(); ++j) kernels::axpy(-1.0, b.col(j), c.col(j));
  return c;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.rows() * a.cols(); ++k) m = std::max(m, std::abs(a.data()[k]));
  return m;
}

double norm1(const Matrix& a) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (double v : a.col(j)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

}  // namespace fbl
