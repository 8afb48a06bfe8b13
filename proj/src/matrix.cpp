#include "permrank/matrix.hpp"

#include <cmath>

namespace permrank {

UnitIntervalMatrix::UnitIntervalMatrix(DenseMatrix m, Clamp clamp) : m_(std::move(m)) {
  require_finite(m_, "UnitIntervalMatrix");
  if (clamp == Clamp::kYes) {
    m_ = m_.cwiseMax(0.0).cwiseMin(1.0);
    return;
  }
  for (Index j = 0; j < m_.cols(); ++j) {
    for (Index i = 0; i < m_.rows(); ++i) {
      const double v = m_(i, j);
      if (v < 0.0 || v > 1.0) {
        throw std::invalid_argument("UnitIntervalMatrix: entry (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") = " + std::to_string(v) +
                                    " outside [0, 1]");
      }
    }
  }
}

void require_finite(const DenseMatrix& m, const std::string& what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(what + ": matrix has non-finite entries");
  }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(what + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

bool is_bimonotone(const DenseMatrix& m, double tol) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (i + 1 < m.rows() && m(i, j) > m(i + 1, j) + tol) return false;
      if (j + 1 < m.cols() && m(i, j) > m(i, j + 1) + tol) return false;
    }
  }
  return true;
}

double normalized_sq_error(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "normalized_sq_error");
  if (a.size() == 0) return 0.0;
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

}  // namespace permrank
