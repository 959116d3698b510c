#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ddimdp/geometry.hpp"
#include "ddimdp/kernels.hpp"

namespace ddimdp {

// Uniform grid partition of a box domain. Cells are indexed row-major (last
// axis fastest) from 0; abstract state 0 is the absorbing region outside the
// domain and cell i is abstract state i + 1.
class PartitionGrid {
 public:
  static constexpr std::size_t kAbsorbingState = 0;

  PartitionGrid(Box domain, std::vector<int> dims);

  int dim() const { return domain_.dim(); }
  std::size_t num_cells() const { return num_cells_; }
  std::size_t num_states() const { return num_cells_ + 1; }
  const Box& domain() const { return domain_; }
  const std::vector<int>& dims() const { return dims_; }
  const Eigen::VectorXd& width() const { return width_; }

  Box cell(std::size_t i) const;
  Eigen::VectorXd reference(std::size_t i) const;
  std::vector<int> multi_index(std::size_t i) const;
  std::size_t flat_index(std::span<const int> multi) const;

  // Cell containing x (closed domain; shared faces go to the upper cell), or
  // nullopt when x is outside the domain.
  std::optional<std::size_t> locate(const Eigen::VectorXd& x) const;
  // Abstract state of x: cell + 1, or kAbsorbingState outside the domain.
  std::size_t state_of(const Eigen::VectorXd& x) const;

  static std::size_t state_of_cell(std::size_t cell) { return cell + 1; }
  static std::size_t cell_of_state(std::size_t state) { return state - 1; }

  kernels::GridView view() const;

 private:
  double edge(int axis, int i) const;

  Box domain_;
  std::vector<int> dims_;
  std::vector<std::int32_t> dims32_;
  Eigen::VectorXd width_;
  std::size_t num_cells_ = 0;
};

PartitionGrid build_partition(const Box& domain, std::vector<int> dims);

}  // namespace ddimdp
