#include "permrank/oracles.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace permrank::oracle {
namespace {

struct ConstraintBuilder {
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  Index dim;

  void add(Eigen::VectorXd row, double b) {
    rows.push_back(std::move(row));
    rhs.push_back(b);
  }
  // x[hi_idx] - x[lo_idx] >= 0
  void add_order(Index lo_idx, Index hi_idx) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(dim);
    r(hi_idx) = 1.0;
    r(lo_idx) = -1.0;
    add(std::move(r), 0.0);
  }
  DenseMatrix matrix() const {
    DenseMatrix a(static_cast<Index>(rows.size()), dim);
    for (std::size_t k = 0; k < rows.size(); ++k) a.row(static_cast<Index>(k)) = rows[k].transpose();
    return a;
  }
  Eigen::VectorXd vector() const { return Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Index>(rhs.size())); }
};

// Ordering constraints for a variable block at `offset` (column-major n x d)
// that must be bimonotone once `perms` is applied.
void add_bimonotone(ConstraintBuilder& cb, Index offset, Index n, Index d, const PermutationPair& perms) {
  const auto row_at = perms.row_perm.order();  // original row placed at position k
  const auto col_at = perms.col_perm.order();
  const auto idx = [&](std::size_t pr, std::size_t pc) {
    return offset + static_cast<Index>(col_at[pc]) * n + static_cast<Index>(row_at[pr]);
  };
  for (std::size_t pr = 0; pr < static_cast<std::size_t>(n); ++pr) {
    for (std::size_t pc = 0; pc < static_cast<std::size_t>(d); ++pc) {
      if (pc + 1 < static_cast<std::size_t>(d)) cb.add_order(idx(pr, pc), idx(pr, pc + 1));
      if (pr + 1 < static_cast<std::size_t>(n)) cb.add_order(idx(pr, pc), idx(pr + 1, pc));
    }
  }
}

}  // namespace

bool pr1_by_enumeration(const DenseMatrix& m, double tol) {
  for (const auto& p : all_permutation_pairs(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()))) {
    if (is_bimonotone(apply_permutation_pair(m, p), tol)) return true;
  }
  return false;
}

QpResult solve_qp_active_set(const DenseMatrix& g, const Eigen::VectorXd& c, const DenseMatrix& a,
                             const Eigen::VectorXd& b, Eigen::VectorXd x0, int max_iterations) {
  constexpr double kEps = 1e-12;
  const Index dim = g.rows();
  QpResult out;
  out.x = std::move(x0);
  std::vector<Index> working;
  std::vector<bool> in_working(static_cast<std::size_t>(a.rows()), false);

  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    const auto w = static_cast<Index>(working.size());
    DenseMatrix kkt = DenseMatrix::Zero(dim + w, dim + w);
    kkt.topLeftCorner(dim, dim) = g;
    for (Index k = 0; k < w; ++k) {
      kkt.block(dim + k, 0, 1, dim) = a.row(working[static_cast<std::size_t>(k)]);
      kkt.block(0, dim + k, dim, 1) = -a.row(working[static_cast<std::size_t>(k)]).transpose();
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + w);
    rhs.head(dim) = -(g * out.x + c);
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    const Eigen::VectorXd step = sol.head(dim);

    if (step.norm() < 1e-11) {
      Index worst = -1;
      double worst_val = -1e-11;
      for (Index k = 0; k < w; ++k) {
        if (sol(dim + k) < worst_val) {
          worst_val = sol(dim + k);
          worst = k;
        }
      }
      if (worst < 0) {
        out.converged = true;
        return out;
      }
      in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(worst)])] = false;
      working.erase(working.begin() + worst);
      continue;
    }

    double alpha = 1.0;
    Index blocking = -1;
    for (Index i = 0; i < a.rows(); ++i) {
      if (in_working[static_cast<std::size_t>(i)]) continue;
      const double slope = a.row(i).dot(step);
      if (slope < -kEps) {
        const double ratio = (b(i) - a.row(i).dot(out.x)) / slope;
        if (ratio < alpha) {
          alpha = std::max(ratio, 0.0);
          blocking = i;
        }
      }
    }
    out.x += alpha * step;
    if (blocking >= 0) {
      working.push_back(blocking);
      in_working[static_cast<std::size_t>(blocking)] = true;
    }
  }
  return out;
}

DenseMatrix qp_project_bimonotone(const DenseMatrix& target, const PermutationPair& perms, const DenseMatrix& lo,
                                  const DenseMatrix& hi) {
  const Index n = target.rows();
  const Index d = target.cols();
  const Index dim = n * d;
  ConstraintBuilder cb{{}, {}, dim};
  add_bimonotone(cb, 0, n, d, perms);
  for (Index k = 0; k < dim; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e(k) = 1.0;
    cb.add(e, lo.data()[k]);
    cb.add(-e, -hi.data()[k]);
  }
  const DenseMatrix g = DenseMatrix::Identity(dim, dim);
  const Eigen::VectorXd c = -Eigen::Map<const Eigen::VectorXd>(target.data(), dim);
  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(lo.data(), dim);
  const QpResult r = solve_qp_active_set(g, c, cb.matrix(), cb.vector(), x0);
  return Eigen::Map<const DenseMatrix>(r.x.data(), n, d);
}

double qp_fit_sum_objective(const DenseMatrix& y, std::span<const PermutationPair> perms) {
  const Index n = y.rows();
  const Index d = y.cols();
  const Index block = n * d;
  const auto k = static_cast<Index>(perms.size());
  const Index dim = block * k;

  DenseMatrix sum_map = DenseMatrix::Zero(block, dim);
  for (Index l = 0; l < k; ++l) sum_map.block(0, l * block, block, block).setIdentity();
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), block);
  const DenseMatrix g = sum_map.transpose() * sum_map + 1e-10 * DenseMatrix::Identity(dim, dim);
  const Eigen::VectorXd c = -sum_map.transpose() * yv;

  ConstraintBuilder cb{{}, {}, dim};
  for (Index l = 0; l < k; ++l) add_bimonotone(cb, l * block, n, d, perms[static_cast<std::size_t>(l)]);
  for (Index v = 0; v < dim; ++v) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e(v) = 1.0;
    cb.add(std::move(e), 0.0);
  }
  for (Index q = 0; q < block; ++q) cb.add(-sum_map.row(q).transpose(), -1.0);

  const QpResult r = solve_qp_active_set(g, c, cb.matrix(), cb.vector(), Eigen::VectorXd::Zero(dim));
  return (yv - sum_map * r.x).squaredNorm();
}

GridResult grid_project_below_2x2(const DenseMatrix& target, const PermutationPair& perms, const DenseMatrix& cap,
                                  double step) {
  const auto levels = static_cast<int>(std::lround(1.0 / step));
  GridResult best;
  best.objective = std::numeric_limits<double>::infinity();
  DenseMatrix x(2, 2);
  // Enumerate in arranged coordinates: a <= b, a <= c, b <= e, c <= e.
  const PermutationPair inv = perms.inverse();
  const DenseMatrix t = apply_permutation_pair(target, perms);
  const DenseMatrix cp = apply_permutation_pair(cap, perms);
  for (int ia = 0; ia <= levels; ++ia) {
    const double a = ia * step;
    if (a > cp(0, 0) + 1e-12) break;
    for (int ib = ia; ib <= levels; ++ib) {
      const double b = ib * step;
      if (b > cp(0, 1) + 1e-12) break;
      for (int ic = ia; ic <= levels; ++ic) {
        const double c = ic * step;
        if (c > cp(1, 0) + 1e-12) break;
        for (int ie = std::max(ib, ic); ie <= levels; ++ie) {
          const double e = ie * step;
          if (e > cp(1, 1) + 1e-12) break;
          x << a, b, c, e;
          const double obj = (x - t).squaredNorm();
          if (obj < best.objective) {
            best.objective = obj;
            best.argmin = x;
          }
        }
      }
    }
  }
  if (best.argmin.size() > 0) best.argmin = apply_permutation_pair(best.argmin, inv);
  return best;
}

}  // namespace permrank::oracle
