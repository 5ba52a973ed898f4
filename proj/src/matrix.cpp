#include "xicorr/matrix.hpp"

#include "xicorr/error.hpp"
#include "xicorr/simd.hpp"

namespace xicorr {

double trace(const Matrix& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows() && i < a.cols(); ++i) t += a(i, i);
  return t;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix multiply_symmetric(const Matrix& a, const Matrix& b_symmetric) {
  if (a.cols() != b_symmetric.rows() || !b_symmetric.square())
    throw Error(ErrorCode::SizeMismatch, "multiply_symmetric: incompatible shapes");
  Matrix c(a.rows(), b_symmetric.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b_symmetric.cols(); ++j)
      c(i, j) = simd::dot(a.row(i), b_symmetric.row(j));
  return c;
}

Matrix gram(const Matrix& a) {
  const std::size_t m = a.rows();
  Matrix g(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double v = simd::dot(a.row(i), a.row(j));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

}  // namespace xicorr
