#include "ddimdp/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace ddimdp::lp {
namespace {

constexpr double kPivotEps = 1e-12;

// Tableau in the dictionary convention: row i reads
//   x_{B[i]} = D[i][nv+1] - sum_j D[i][j] x_{N[j]}
// The objective row m holds -c, the phase-one row m+1 the auxiliary objective.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
      : m_(static_cast<int>(A.rows())), nv_(2 * static_cast<int>(A.cols())),
        basis_(m_), nonbasis_(nv_ + 1),
        d_(static_cast<std::size_t>(m_ + 2), std::vector<double>(static_cast<std::size_t>(nv_ + 2), 0.0)) {
    const int n = static_cast<int>(A.cols());
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n; ++j) {
        at(i, j) = A(i, j);
        at(i, j + n) = -A(i, j);
      }
      basis_[i] = nv_ + i;
      at(i, nv_) = -1.0;
      at(i, nv_ + 1) = b(i);
    }
    for (int j = 0; j < n; ++j) {
      at(m_, j) = -c(j);
      at(m_, j + n) = c(j);
    }
    for (int j = 0; j < nv_; ++j) nonbasis_[j] = j;
    nonbasis_[nv_] = -1;
    at(m_ + 1, nv_) = 1.0;
  }

  Result solve() {
    Result result;
    int r = 0;
    for (int i = 1; i < m_; ++i) {
      if (at(i, nv_ + 1) < at(r, nv_ + 1)) r = i;
    }
    if (m_ > 0 && at(r, nv_ + 1) < -kFeasibilityTol) {
      pivot(r, nv_);
      if (!simplex(1) || at(m_ + 1, nv_ + 1) < -kFeasibilityTol) {
        result.status = Status::infeasible;
        return result;
      }
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= nv_; ++j) {
          if (nonbasis_[j] == -1) continue;
          if (s == -1 || std::abs(at(i, j)) > std::abs(at(i, s))) s = j;
        }
        if (s != -1 && std::abs(at(i, s)) > kPivotEps) pivot(i, s);
      }
    }
    if (!simplex(2)) {
      result.status = Status::unbounded;
      result.value = std::numeric_limits<double>::infinity();
      return result;
    }
    const int n = nv_ / 2;
    Eigen::VectorXd split = Eigen::VectorXd::Zero(nv_);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= 0 && basis_[i] < nv_) split(basis_[i]) = at(i, nv_ + 1);
    }
    result.status = Status::optimal;
    result.x = split.head(n) - split.tail(n);
    result.value = at(m_, nv_ + 1);
    return result;
  }

 private:
  double& at(int i, int j) { return d_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

  void pivot(int r, int s) {
    const double inv = 1.0 / at(r, s);
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double factor = at(i, s) * inv;
      if (factor == 0.0) continue;
      for (int j = 0; j < nv_ + 2; ++j) {
        if (j != s) at(i, j) -= at(r, j) * factor;
      }
    }
    for (int j = 0; j < nv_ + 2; ++j) {
      if (j != s) at(r, j) *= inv;
    }
    for (int i = 0; i < m_ + 2; ++i) {
      if (i != r) at(i, s) *= -inv;
    }
    at(r, s) = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  // Bland's rule: lowest-label improving column, then lowest-label row among
  // the minimum-ratio ties.
  bool simplex(int phase) {
    const int objective = phase == 1 ? m_ + 1 : m_;
    for (int iter = 0; iter < 100000; ++iter) {
      int s = -1;
      for (int j = 0; j <= nv_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (at(objective, j) >= -kFeasibilityTol) continue;
        if (s == -1 || nonbasis_[j] < nonbasis_[s]) s = j;
      }
      if (s == -1) return true;
      int r = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (at(i, s) <= kPivotEps) continue;
        const double ratio = at(i, nv_ + 1) / at(i, s);
        if (r == -1 || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 && basis_[i] < basis_[r])) {
          r = i;
          best_ratio = ratio;
        }
      }
      if (r == -1) return false;
      pivot(r, s);
    }
    return true;
  }

  int m_;
  int nv_;
  std::vector<int> basis_;
  std::vector<int> nonbasis_;
  std::vector<std::vector<double>> d_;
};

}  // namespace

Result maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  Tableau tableau(A, b, c);
  return tableau.solve();
}

}  // namespace ddimdp::lp
