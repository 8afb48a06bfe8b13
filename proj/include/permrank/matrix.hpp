#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace permrank {

/// Dense real matrix, column-major. Houses intermediate quantities such as the
/// recentered observations and residuals.
using DenseMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Raised when a matrix or permutation does not have the shape an operation needs.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adjacent-pair violations below this are treated as solver noise.
inline constexpr double kBimonotoneTolerance = 1e-12;

/// Singular values below this fraction of the largest one count as zero.
inline constexpr double kRankThreshold = 1e-9;

enum class Clamp { kNo, kYes };

/// A dense matrix whose entries all lie in [0, 1].
///
/// Construction validates; out-of-range entries are rejected unless the caller
/// explicitly asks for clamping.
class UnitIntervalMatrix {
 public:
  UnitIntervalMatrix() = default;
  explicit UnitIntervalMatrix(DenseMatrix m, Clamp clamp = Clamp::kNo);

  const DenseMatrix& matrix() const { return m_; }
  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }
  double operator()(Index i, Index j) const { return m_(i, j); }

  friend bool operator==(const UnitIntervalMatrix& a, const UnitIntervalMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_.cols() == b.m_.cols() && a.m_ == b.m_;
  }

 private:
  DenseMatrix m_;
};

void require_finite(const DenseMatrix& m, const std::string& what);
void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const std::string& what);

/// True when entries are non-decreasing left-to-right along each row and
/// top-to-bottom down each column, up to `tol`.
bool is_bimonotone(const DenseMatrix& m, double tol = kBimonotoneTolerance);

/// (1 / nd) * ||a - b||_F^2.
double normalized_sq_error(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace permrank
