#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ddimdp/lp.hpp"
#include "ddimdp/scenario.hpp"
#include "ddimdp/synthesis.hpp"

namespace testing {

inline Eigen::VectorXd v2(double a, double b) { return Eigen::Vector2d(a, b); }

inline ddimdp::Box box2(double x0, double y0, double x1, double y1) { return ddimdp::Box(v2(x0, y0), v2(x1, y1)); }

// min sum p_d v_d over low <= p <= high, sum p = 1, solved as an LP.
inline double lp_min_expectation(const std::vector<double>& v, const std::vector<ddimdp::ProbInterval>& iv) {
  const int n = static_cast<int>(v.size());
  Eigen::MatrixXd A(2 * n + 2, n);
  Eigen::VectorXd b(2 * n + 2);
  A.setZero();
  for (int d = 0; d < n; ++d) {
    A(2 * d, d) = 1.0;
    b(2 * d) = iv[static_cast<std::size_t>(d)].high;
    A(2 * d + 1, d) = -1.0;
    b(2 * d + 1) = -iv[static_cast<std::size_t>(d)].low;
  }
  A.row(2 * n).setOnes();
  b(2 * n) = 1.0;
  A.row(2 * n + 1).setConstant(-1.0);
  b(2 * n + 1) = -1.0;
  Eigen::VectorXd c(n);
  for (int d = 0; d < n; ++d) c(d) = -v[static_cast<std::size_t>(d)];
  const auto r = ddimdp::lp::maximize(A, b, c);
  return -r.value;
}

// Random feasible interval vector of size n.
inline std::vector<ddimdp::ProbInterval> random_intervals(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(n));
  double s = 0.0;
  for (auto& x : p) s += (x = u(rng) + 1e-3);
  std::vector<ddimdp::ProbInterval> out;
  for (auto x : p) {
    x /= s;
    const double lo = x * u(rng);
    const double hi = std::min(1.0, x + (1.0 - x) * u(rng));
    out.push_back({lo, hi});
  }
  return out;
}

using namespace ddimdp;

inline ddimdp::HPolytope random_polygon(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int m = 3 + static_cast<int>(rng() % 4);
  Eigen::MatrixXd N(m, 2);
  Eigen::VectorXd b(m);
  const Eigen::Vector2d c(u(rng), u(rng));
  for (int i = 0; i < m; ++i) {
    const double t = 2.0 * M_PI * (i + 0.3 * u(rng)) / m;
    N.row(i) << std::cos(t), std::sin(t);
    b(i) = N.row(i).dot(c) + 0.3 + 0.6 * (u(rng) + 1.0);
  }
  return HPolytope(N, b);
}

// Random iMDP: state 0 absorbing, state 1 goal, the rest regular.
inline ddimdp::IMDPModel random_imdp(std::mt19937_64& rng, int S, int max_actions, int max_dest) {
  IMDPModel m;
  m.labels.kinds.assign(static_cast<std::size_t>(S), StateKind::regular);
  m.labels.kinds[0] = StateKind::absorbing;
  m.labels.kinds[1] = StateKind::goal;
  m.actions.resize(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    if (s < 2) {
      ImdpAction loop;
      loop.action = kSelfLoopAction;
      loop.row.dest = {static_cast<std::uint32_t>(s)};
      loop.row.prob = {{1, 1}};
      m.actions[static_cast<std::size_t>(s)].push_back(loop);
      continue;
    }
    const int na = static_cast<int>(rng() % static_cast<unsigned>(max_actions + 1));
    for (int a = 0; a < na; ++a) {
      const int nd = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_dest));
      std::vector<std::uint32_t> dest;
      for (int d = 1; d < S && static_cast<int>(dest.size()) < nd; ++d) {
        if (rng() % 2) dest.push_back(static_cast<std::uint32_t>(d));
      }
      if (dest.empty()) dest.push_back(1 + static_cast<std::uint32_t>(rng() % static_cast<unsigned>(S - 1)));
      const auto iv = random_intervals(rng, static_cast<int>(dest.size()) + 1);
      ImdpAction act;
      act.action = static_cast<std::size_t>(3 * a + (rng() % 3));
      act.row.residual = iv[0];
      act.row.dest = dest;
      act.row.prob.assign(iv.begin() + 1, iv.end());
      m.actions[static_cast<std::size_t>(s)].push_back(act);
    }
    std::sort(m.actions[static_cast<std::size_t>(s)].begin(), m.actions[static_cast<std::size_t>(s)].end(),
              [](const ImdpAction& x, const ImdpAction& y) { return x.action < y.action; });
    for (std::size_t k = 1; k < m.actions[static_cast<std::size_t>(s)].size(); ++k) {
      auto& acts = m.actions[static_cast<std::size_t>(s)];
      if (acts[k].action <= acts[k - 1].action) acts[k].action = acts[k - 1].action + 1;
    }
  }
  return m;
}

// Dynamic program with every inner minimum solved as an LP.
inline std::vector<std::vector<double>> brute_force(const ddimdp::IMDPModel& m, int K) {
  const std::size_t S = m.num_states();
  std::vector<std::vector<double>> V(static_cast<std::size_t>(K) + 1, std::vector<double>(S, 0.0));
  for (std::size_t s = 0; s < S; ++s) V[0][s] = m.labels.kinds[s] == StateKind::goal ? 1.0 : 0.0;
  for (int k = 0; k < K; ++k) {
    for (std::size_t s = 0; s < S; ++s) {
      if (m.labels.kinds[s] == StateKind::goal) {
        V[static_cast<std::size_t>(k) + 1][s] = 1.0;
        continue;
      }
      if (m.labels.kinds[s] != StateKind::regular) continue;
      double best = 0.0;
      for (const auto& a : m.actions[s]) {
        std::vector<double> vals{0.0};
        std::vector<ProbInterval> iv{a.row.residual};
        for (std::size_t d = 0; d < a.row.dest.size(); ++d) {
          vals.push_back(V[static_cast<std::size_t>(k)][a.row.dest[d]]);
          iv.push_back(a.row.prob[d]);
        }
        best = std::max(best, lp_min_expectation(vals, iv));
      }
      V[static_cast<std::size_t>(k) + 1][s] = best;
    }
  }
  return V;
}

}  // namespace testing
