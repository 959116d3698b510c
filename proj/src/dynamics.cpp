#include "ddimdp/dynamics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ddimdp/error.hpp"

namespace ddimdp {
namespace {

Eigen::MatrixXd gaussian_factor(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw Error(ErrorKind::invalid_config, "noise covariance must be square");
  const Eigen::MatrixXd off = cov - Eigen::MatrixXd(cov.diagonal().asDiagonal());
  if (off.isZero(0.0)) {
    if ((cov.diagonal().array() < 0.0).any()) throw Error(ErrorKind::invalid_config, "negative noise variance");
    return cov.diagonal().cwiseSqrt().asDiagonal();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if ((eig.eigenvalues().array() < -1e-12).any()) {
    throw Error(ErrorKind::invalid_config, "noise covariance is not positive semidefinite");
  }
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

AffineSystem::AffineSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, HPolytope U, Box domain)
    : A_(std::move(A)), B_(std::move(B)), U_(std::move(U)), domain_(std::move(domain)) {
  const auto n = A_.rows();
  if (A_.cols() != n || B_.rows() != n || B_.cols() != n) {
    throw Error(ErrorKind::dimension_mismatch, "AffineSystem: A and B must be square and of equal size");
  }
  if (U_.dim() != n || domain_.dim() != n) {
    throw Error(ErrorKind::dimension_mismatch, "AffineSystem: U and domain must match the state dimension");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu_b(B_);
  if (!lu_b.isInvertible() || lu_b.rcond() < 1e-13) {
    throw Error(ErrorKind::singular_dynamics, "input matrix B is not invertible");
  }
  B_inv_ = lu_b.inverse();
  Eigen::FullPivLU<Eigen::MatrixXd> lu_a(A_);
  A_invertible_ = lu_a.isInvertible() && lu_a.rcond() >= 1e-13;
  if (!chebyshev(U_).has_interior()) {
    throw Error(ErrorKind::invalid_config, "input set U must have a nonempty interior");
  }
}

Eigen::VectorXd nominal_next(const AffineSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  if (!sys.U().contains(u)) throw Error(ErrorKind::input_constraint_violated, "u is outside U");
  return sys.A() * x + sys.B() * u;
}

HPolytope pre_point(const AffineSystem& sys, const Eigen::VectorXd& c) {
  if (!sys.A_invertible()) throw Error(ErrorKind::singular_dynamics, "state matrix A is not invertible");
  // u = B^-1 (c - A x) must satisfy N u <= b.
  const Eigen::MatrixXd NBinv = sys.U().normals() * sys.B_inverse();
  Eigen::MatrixXd normals = -(NBinv * sys.A());
  Eigen::VectorXd offsets = sys.U().offsets() - NBinv * c;
  return HPolytope(std::move(normals), std::move(offsets));
}

std::vector<HPolytope> pre_union(const AffineSystem& sys, std::span<const Eigen::VectorXd> refs) {
  std::vector<HPolytope> out;
  out.reserve(refs.size());
  for (const auto& c : refs) out.push_back(pre_point(sys, c));
  return out;
}

ControlChoice u_star(const AffineSystem& sys, const Eigen::VectorXd& x, std::span<const Eigen::VectorXd> refs) {
  const auto pres = pre_union(sys, refs);
  return u_star(sys, x, refs, pres);
}

ControlChoice u_star(const AffineSystem& sys, const Eigen::VectorXd& x, std::span<const Eigen::VectorXd> refs,
                     std::span<const HPolytope> pres) {
  for (std::size_t j = 0; j < refs.size(); ++j) {
    if (pres[j].contains(x, kMembershipTol)) {
      ControlChoice out;
      out.c_star = refs[j];
      out.u = sys.B_inverse() * (refs[j] - sys.A() * x);
      out.ell = static_cast<int>(j) + 1;
      return out;
    }
  }
  throw Error(ErrorKind::action_not_applicable, "x lies in no backward reachable set of the target");
}

Eigen::MatrixXd read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open sample file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      std::size_t a = line.find_first_not_of(" \t", pos);
      std::size_t b = line.find_last_not_of(" \t", comma == 0 ? 0 : comma - 1);
      double v = 0.0;
      if (a == std::string::npos || a >= comma || b < a) {
        throw Error(ErrorKind::io, path + ":" + std::to_string(lineno) + ": empty field");
      }
      if (line[a] == '+') ++a;
      const auto res = std::from_chars(line.data() + a, line.data() + b + 1, v);
      if (res.ec != std::errc() || res.ptr != line.data() + b + 1 || !std::isfinite(v)) {
        throw Error(ErrorKind::io, path + ":" + std::to_string(lineno) + ": not a finite number");
      }
      row.push_back(v);
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::io, path + ":" + std::to_string(lineno) + ": inconsistent column count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::no_samples, "sample file " + path + " is empty");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

void write_sample_csv(const std::string& path, const Eigen::MatrixXd& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      if (j) out << ',';
      out << rows(i, j);
    }
    out << '\n';
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the pair.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

NoiseSource::NoiseSource(NoiseSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed), engine_(seed) {
  if (auto* g = std::get_if<GaussianNoise>(&spec_)) {
    dim_ = static_cast<int>(g->mean.size());
    factors_.push_back(gaussian_factor(g->covariance));
    if (factors_.back().rows() != dim_) throw Error(ErrorKind::invalid_config, "gaussian mean/covariance size mismatch");
  } else if (auto* u = std::get_if<UniformNoise>(&spec_)) {
    dim_ = u->box.dim();
  } else if (auto* m = std::get_if<MixtureNoise>(&spec_)) {
    if (m->components.empty() || m->components.size() != m->weights.size()) {
      throw Error(ErrorKind::invalid_config, "mixture needs one weight per component");
    }
    dim_ = static_cast<int>(m->components.front().mean.size());
    for (const auto& c : m->components) {
      factors_.push_back(gaussian_factor(c.covariance));
      if (c.mean.size() != dim_ || factors_.back().rows() != dim_) {
        throw Error(ErrorKind::invalid_config, "mixture components differ in dimension");
      }
    }
    for (double w : m->weights) {
      if (!(w >= 0.0)) throw Error(ErrorKind::invalid_config, "mixture weights must be nonnegative");
    }
  } else {
    auto& f = std::get<SampleFileNoise>(spec_);
    if (f.rows.size() == 0) f.rows = read_sample_csv(f.path);
    dim_ = static_cast<int>(f.rows.cols());
  }
}

NoiseSource NoiseSource::from_file(const std::string& path, std::uint64_t seed) {
  return NoiseSource(SampleFileNoise{path, read_sample_csv(path)}, seed);
}

Eigen::VectorXd NoiseSource::draw_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& factor) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(engine_);
  return mean + factor * z;
}

Eigen::VectorXd NoiseSource::draw() {
  if (auto* g = std::get_if<GaussianNoise>(&spec_)) return draw_gaussian(g->mean, factors_.front());
  if (auto* u = std::get_if<UniformNoise>(&spec_)) {
    Eigen::VectorXd x(dim_);
    for (int i = 0; i < dim_; ++i) {
      std::uniform_real_distribution<double> d(u->box.low(i), u->box.high(i));
      x(i) = d(engine_);
    }
    return x;
  }
  if (auto* m = std::get_if<MixtureNoise>(&spec_)) {
    std::discrete_distribution<std::size_t> pick(m->weights.begin(), m->weights.end());
    const std::size_t k = pick(engine_);
    return draw_gaussian(m->components[k].mean, factors_[k]);
  }
  const auto& f = std::get<SampleFileNoise>(spec_);
  std::uniform_int_distribution<Eigen::Index> row(0, f.rows.rows() - 1);
  return f.rows.row(row(engine_)).transpose();
}

SampleBatch NoiseSource::draw_batch(std::size_t Z) {
  SampleBatch batch;
  if (const auto* f = std::get_if<SampleFileNoise>(&spec_)) {
    if (static_cast<std::size_t>(f->rows.rows()) < Z) {
      throw Error(ErrorKind::no_samples, "sample file " + f->path + " holds " + std::to_string(f->rows.rows()) +
                                             " rows, " + std::to_string(Z) + " requested");
    }
    batch.vectors = f->rows.topRows(static_cast<Eigen::Index>(Z));
    return batch;
  }
  batch.vectors.resize(static_cast<Eigen::Index>(Z), dim_);
  for (std::size_t k = 0; k < Z; ++k) batch.vectors.row(static_cast<Eigen::Index>(k)) = draw().transpose();
  return batch;
}

NoiseSource NoiseSource::substream(std::uint64_t index) const {
  return NoiseSource(spec_, mix_seed(seed_, index));
}

}  // namespace ddimdp
