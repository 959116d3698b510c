#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ddimdp/geometry.hpp"

namespace ddimdp {

// x' = A x + B u + w with square invertible B, input set U and domain X.
class AffineSystem {
 public:
  AffineSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, HPolytope U, Box domain);

  int dim() const { return static_cast<int>(A_.rows()); }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::MatrixXd& B_inverse() const { return B_inv_; }
  const HPolytope& U() const { return U_; }
  const Box& domain() const { return domain_; }
  bool A_invertible() const { return A_invertible_; }

 private:
  Eigen::MatrixXd A_;
  Eigen::MatrixXd B_;
  Eigen::MatrixXd B_inv_;
  HPolytope U_;
  Box domain_;
  bool A_invertible_ = false;
};

// A x + B u. Throws input_constraint_violated when u is not in U.
Eigen::VectorXd nominal_next(const AffineSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& u);

// Backward reachable set of a point: {x : exists u in U, A x + B u = c}.
HPolytope pre_point(const AffineSystem& sys, const Eigen::VectorXd& c);

// pre_point of every reference, in the given order.
std::vector<HPolytope> pre_union(const AffineSystem& sys, std::span<const Eigen::VectorXd> refs);

struct ControlChoice {
  Eigen::VectorXd u;
  Eigen::VectorXd c_star;
  int ell = 0;  // 1-based position of c_star in the reference list
};

// Lowest-index reference whose Pre set contains x, and the input that drives x
// exactly onto it. Throws action_not_applicable if x is in no Pre set.
ControlChoice u_star(const AffineSystem& sys, const Eigen::VectorXd& x, std::span<const Eigen::VectorXd> refs);

// Same, with the Pre sets already computed (pres[j] = pre_point(refs[j])).
ControlChoice u_star(const AffineSystem& sys, const Eigen::VectorXd& x, std::span<const Eigen::VectorXd> refs,
                     std::span<const HPolytope> pres);

// Z x n block of noise draws, one vector per row.
struct SampleBatch {
  Eigen::MatrixXd vectors;

  std::size_t size() const { return static_cast<std::size_t>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }
};

struct GaussianNoise {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

struct UniformNoise {
  Box box;
};

struct MixtureNoise {
  std::vector<double> weights;
  std::vector<GaussianNoise> components;
};

// Rows loaded from a CSV sample file. Batches take the rows in file order;
// single draws pick a row uniformly at random.
struct SampleFileNoise {
  std::string path;
  Eigen::MatrixXd rows;
};

using NoiseSpec = std::variant<GaussianNoise, UniformNoise, MixtureNoise, SampleFileNoise>;

// Reads a headerless CSV of finite reals, one noise vector per row.
Eigen::MatrixXd read_sample_csv(const std::string& path);
void write_sample_csv(const std::string& path, const Eigen::MatrixXd& rows);

// i.i.d. noise stream. One owner per stream; substream(i) yields independent
// streams keyed by (seed, i).
class NoiseSource {
 public:
  NoiseSource(NoiseSpec spec, std::uint64_t seed);

  static NoiseSource from_file(const std::string& path, std::uint64_t seed = 0);

  int dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  const NoiseSpec& spec() const { return spec_; }

  Eigen::VectorXd draw();
  // For sample files: the first Z rows; fails if the file holds fewer.
  SampleBatch draw_batch(std::size_t Z);
  NoiseSource substream(std::uint64_t index) const;

 private:
  Eigen::VectorXd draw_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& factor);

  NoiseSpec spec_;
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  int dim_ = 0;
  std::vector<Eigen::MatrixXd> factors_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace ddimdp
