#include "ddimdp/partition.hpp"

#include <cmath>
#include <string>

#include "ddimdp/error.hpp"

namespace ddimdp {

PartitionGrid::PartitionGrid(Box domain, std::vector<int> dims) : domain_(std::move(domain)), dims_(std::move(dims)) {
  if (static_cast<int>(dims_.size()) != domain_.dim()) {
    throw Error(ErrorKind::dimension_mismatch, "partition dims do not match the domain dimension");
  }
  width_.resize(domain_.dim());
  num_cells_ = 1;
  for (int a = 0; a < domain_.dim(); ++a) {
    if (dims_[static_cast<std::size_t>(a)] < 1) {
      throw Error(ErrorKind::invalid_config, "partition needs at least one cell per axis");
    }
    const double side = domain_.high(a) - domain_.low(a);
    if (!(side > 0.0)) throw Error(ErrorKind::degenerate_domain, "domain has zero extent on axis " + std::to_string(a));
    width_(a) = side / dims_[static_cast<std::size_t>(a)];
    num_cells_ *= static_cast<std::size_t>(dims_[static_cast<std::size_t>(a)]);
  }
  if (num_cells_ >= static_cast<std::size_t>(INT32_MAX)) throw Error(ErrorKind::invalid_config, "partition too large");
  dims32_.assign(dims_.begin(), dims_.end());
}

double PartitionGrid::edge(int axis, int i) const {
  if (i == dims_[static_cast<std::size_t>(axis)]) return domain_.high(axis);
  return domain_.low(axis) + i * width_(axis);
}

Box PartitionGrid::cell(std::size_t i) const {
  const auto idx = multi_index(i);
  Eigen::VectorXd lo(dim()), hi(dim());
  for (int a = 0; a < dim(); ++a) {
    lo(a) = edge(a, idx[static_cast<std::size_t>(a)]);
    hi(a) = edge(a, idx[static_cast<std::size_t>(a)] + 1);
  }
  return Box(lo, hi);
}

Eigen::VectorXd PartitionGrid::reference(std::size_t i) const {
  const auto idx = multi_index(i);
  Eigen::VectorXd c(dim());
  for (int a = 0; a < dim(); ++a) c(a) = domain_.low(a) + (idx[static_cast<std::size_t>(a)] + 0.5) * width_(a);
  return c;
}

std::vector<int> PartitionGrid::multi_index(std::size_t i) const {
  std::vector<int> idx(dims_.size());
  for (int a = dim() - 1; a >= 0; --a) {
    const auto d = static_cast<std::size_t>(dims_[static_cast<std::size_t>(a)]);
    idx[static_cast<std::size_t>(a)] = static_cast<int>(i % d);
    i /= d;
  }
  return idx;
}

std::size_t PartitionGrid::flat_index(std::span<const int> multi) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim(); ++a) {
    flat = flat * static_cast<std::size_t>(dims_[static_cast<std::size_t>(a)]) +
           static_cast<std::size_t>(multi[static_cast<std::size_t>(a)]);
  }
  return flat;
}

std::optional<std::size_t> PartitionGrid::locate(const Eigen::VectorXd& x) const {
  // Same arithmetic as kernels::locate_cells so simulation and binning agree.
  double flat = 0.0;
  for (int a = 0; a < dim(); ++a) {
    if (!(x(a) >= domain_.low(a) && x(a) <= domain_.high(a))) return std::nullopt;
    double t = std::floor((x(a) - domain_.low(a)) / width_(a));
    const double last = static_cast<double>(dims_[static_cast<std::size_t>(a)] - 1);
    if (t > last) t = last;
    flat = flat * static_cast<double>(dims_[static_cast<std::size_t>(a)]) + t;
  }
  return static_cast<std::size_t>(flat);
}

std::size_t PartitionGrid::state_of(const Eigen::VectorXd& x) const {
  const auto c = locate(x);
  return c ? state_of_cell(*c) : kAbsorbingState;
}

kernels::GridView PartitionGrid::view() const {
  return kernels::GridView{domain_.low.data(), domain_.high.data(), width_.data(), dims32_.data(), dim()};
}

PartitionGrid build_partition(const Box& domain, std::vector<int> dims) { return PartitionGrid(domain, std::move(dims)); }

}  // namespace ddimdp
