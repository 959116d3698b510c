#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ddimdp/dynamics.hpp"
#include "ddimdp/partition.hpp"

namespace ddimdp {

struct ProbInterval {
  double low = 0.0;
  double high = 1.0;

  friend bool operator==(const ProbInterval&, const ProbInterval&) = default;
};

// Where the shifted samples c + w landed. hits holds (cell, count) pairs with
// count >= 1, sorted by cell.
struct BinCounts {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> hits;
  std::uint64_t outside = 0;
  std::uint64_t total = 0;

  std::uint64_t count(std::size_t cell) const;
};

BinCounts bin_counts(const Eigen::VectorXd& c, const PartitionGrid& grid, const SampleBatch& samples);

// bin_counts for every reference point of the grid; entry i belongs to cell i.
std::vector<BinCounts> bin_counts_all(const PartitionGrid& grid, const SampleBatch& samples);

// P(Bin(Z, 1 - p) <= k) and P(Bin(Z, 1 - p) >= k), i.e. the sums
//   sum_{i<=k} C(Z,i) (1-p)^i p^(Z-i)   and   sum_{i>=k} C(Z,i) (1-p)^i p^(Z-i),
// evaluated term-by-term in log space so that tiny tails keep full relative
// precision.
double binomial_tail_le(std::uint64_t Z, std::uint64_t k, double p);
double binomial_tail_ge(std::uint64_t Z, std::uint64_t k, double p);

// Two-sided PAC interval for a probability estimated from Z samples of which
// k_out missed the region; each side holds with confidence beta / (2Z).
ProbInterval pac_interval(std::uint64_t Z, std::uint64_t k_out, double beta);

// Memoizes pac_interval for fixed (Z, beta); rows share a handful of counts.
class PacIntervalCache {
 public:
  PacIntervalCache(std::uint64_t Z, double beta);

  ProbInterval operator()(std::uint64_t k_out);
  std::uint64_t samples() const { return Z_; }
  double beta() const { return beta_; }

 private:
  std::uint64_t Z_;
  double beta_;
  std::unordered_map<std::uint64_t, ProbInterval> cache_;
};

}  // namespace ddimdp
