#include "ddimdp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddimdp/error.hpp"
#include "ddimdp/kernels.hpp"

namespace ddimdp {
namespace {

constexpr int kBisectionSteps = 64;
constexpr double kTailCutoff = 1e-18;

double log_choose(std::uint64_t n, std::uint64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// sum_{i=lo}^{hi} C(Z,i) q^i p^(Z-i) with q = 1 - p, 0 < p < 1. Terms are
// unimodal in i, so summation starts at the in-range maximum (scaled to 1)
// and walks outward until the terms stop mattering.
double binomial_range(std::uint64_t Z, std::uint64_t lo, std::uint64_t hi, double p) {
  const double q = -std::expm1(std::log(p));  // 1 - p without cancellation for tiny p
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double odds = std::exp(log_q - log_p);  // q / p

  const double mode = std::floor((static_cast<double>(Z) + 1.0) * q);
  std::uint64_t peak = mode <= 0.0 ? 0 : static_cast<std::uint64_t>(std::min(mode, static_cast<double>(Z)));
  peak = std::clamp(peak, lo, hi);
  const double log_peak = log_choose(Z, peak) + static_cast<double>(peak) * log_q +
                          static_cast<double>(Z - peak) * log_p;

  double sum = 1.0;
  double term = 1.0;
  for (std::uint64_t i = peak; i < hi; ++i) {
    term *= static_cast<double>(Z - i) / static_cast<double>(i + 1) * odds;
    sum += term;
    if (term < kTailCutoff * sum) break;
  }
  term = 1.0;
  for (std::uint64_t i = peak; i > lo; --i) {
    term *= static_cast<double>(i) / static_cast<double>(Z - i + 1) / odds;
    sum += term;
    if (term < kTailCutoff * sum) break;
  }
  return std::exp(log_peak + std::log(sum));
}

}  // namespace

std::uint64_t BinCounts::count(std::size_t cell) const {
  const auto it = std::lower_bound(hits.begin(), hits.end(), cell,
                                   [](const auto& h, std::size_t c) { return h.first < c; });
  return it != hits.end() && it->first == cell ? it->second : 0;
}

BinCounts bin_counts(const Eigen::VectorXd& c, const PartitionGrid& grid, const SampleBatch& samples) {
  if (samples.dim() != grid.dim() || c.size() != grid.dim()) {
    throw Error(ErrorKind::dimension_mismatch, "bin_counts: sample/grid dimension differs");
  }
  const std::size_t Z = samples.size();
  std::vector<const double*> axes(static_cast<std::size_t>(grid.dim()));
  for (int a = 0; a < grid.dim(); ++a) axes[static_cast<std::size_t>(a)] = samples.vectors.col(a).data();

  std::vector<std::int32_t> cells(Z);
  kernels::locate_cells(grid.view(), c.data(), axes, Z, cells.data());

  BinCounts out;
  out.total = Z;
  std::sort(cells.begin(), cells.end());
  for (std::size_t k = 0; k < Z;) {
    std::size_t j = k;
    while (j < Z && cells[j] == cells[k]) ++j;
    if (cells[k] < 0) {
      out.outside += j - k;
    } else {
      out.hits.emplace_back(static_cast<std::uint32_t>(cells[k]), static_cast<std::uint32_t>(j - k));
    }
    k = j;
  }
  return out;
}

std::vector<BinCounts> bin_counts_all(const PartitionGrid& grid, const SampleBatch& samples) {
  std::vector<BinCounts> out(grid.num_cells());
  for (std::size_t i = 0; i < grid.num_cells(); ++i) out[i] = bin_counts(grid.reference(i), grid, samples);
  return out;
}

double binomial_tail_le(std::uint64_t Z, std::uint64_t k, double p) {
  if (k >= Z) return 1.0;
  if (p <= 0.0) return 0.0;  // all mass at i = Z
  if (p >= 1.0) return 1.0;  // all mass at i = 0
  return binomial_range(Z, 0, k, p);
}

double binomial_tail_ge(std::uint64_t Z, std::uint64_t k, double p) {
  if (k == 0) return 1.0;
  if (k > Z) return 0.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  return binomial_range(Z, k, Z, p);
}

ProbInterval pac_interval(std::uint64_t Z, std::uint64_t k_out, double beta) {
  if (Z == 0 || k_out > Z || !(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorKind::invalid_scenario_parameters,
                "Z=" + std::to_string(Z) + " k_out=" + std::to_string(k_out) + " beta=" + std::to_string(beta));
  }
  const double target = beta / (2.0 * static_cast<double>(Z));
  ProbInterval out{0.0, 1.0};

  if (k_out < Z) {
    // tail_le grows with p; keep the bracket end below the root.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < kBisectionSteps; ++it) {
      const double mid = 0.5 * (lo + hi);
      (binomial_tail_le(Z, k_out, mid) < target ? lo : hi) = mid;
    }
    out.low = lo;
  }
  if (k_out > 0) {
    // tail_ge shrinks with p; keep the bracket end above the root.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < kBisectionSteps; ++it) {
      const double mid = 0.5 * (lo + hi);
      (binomial_tail_ge(Z, k_out, mid) > target ? lo : hi) = mid;
    }
    out.high = hi;
  }
  return out;
}

PacIntervalCache::PacIntervalCache(std::uint64_t Z, double beta) : Z_(Z), beta_(beta) {
  if (Z == 0) throw Error(ErrorKind::no_samples, "no samples");
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorKind::invalid_scenario_parameters, "beta must lie in (0, 1)");
}

ProbInterval PacIntervalCache::operator()(std::uint64_t k_out) {
  const auto it = cache_.find(k_out);
  if (it != cache_.end()) return it->second;
  const ProbInterval v = pac_interval(Z_, k_out, beta_);
  cache_.emplace(k_out, v);
  return v;
}

}  // namespace ddimdp
