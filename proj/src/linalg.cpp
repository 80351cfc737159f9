#include "proctensor/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace proctensor {

std::string to_string(Role role) {
  switch (role) {
    case Role::In:
      return "in";
    case Role::Out:
      return "out";
    case Role::Aux:
      return "aux";
  }
  return "?";
}

std::string to_string(const LegLabel& label) {
  return to_string(label.role) + "@" + std::to_string(label.t);
}

LegLayout::LegLayout(std::vector<Leg> legs) : legs_(std::move(legs)) {
  for (std::size_t a = 0; a < legs_.size(); ++a) {
    if (legs_[a].dim < 1) throw std::invalid_argument("leg dimension must be positive");
    for (std::size_t b = a + 1; b < legs_.size(); ++b) {
      if (legs_[a].label() == legs_[b].label())
        throw std::invalid_argument("duplicate leg label " + to_string(legs_[a].label()));
    }
  }
}

LegLayout::LegLayout(std::initializer_list<Leg> legs) : LegLayout(std::vector<Leg>(legs)) {}

Index LegLayout::dim() const {
  Index d = 1;
  for (const auto& leg : legs_) d *= leg.dim;
  return d;
}

Index LegLayout::dim_of(const std::vector<LegLabel>& labels) const {
  Index d = 1;
  for (const auto& l : labels) d *= legs_[position(l)].dim;
  return d;
}

Index LegLayout::role_dim(Role role) const {
  Index d = 1;
  for (const auto& leg : legs_)
    if (leg.role == role) d *= leg.dim;
  return d;
}

bool LegLayout::contains(const LegLabel& label) const {
  return std::any_of(legs_.begin(), legs_.end(),
                     [&](const Leg& leg) { return leg.label() == label; });
}

std::size_t LegLayout::position(const LegLabel& label) const {
  for (std::size_t k = 0; k < legs_.size(); ++k)
    if (legs_[k].label() == label) return k;
  throw std::invalid_argument("unknown leg label " + to_string(label));
}

std::vector<LegLabel> LegLayout::labels() const {
  std::vector<LegLabel> out;
  out.reserve(legs_.size());
  for (const auto& leg : legs_) out.push_back(leg.label());
  return out;
}

LegLayout LegLayout::subset(const std::vector<LegLabel>& labels) const {
  std::vector<Leg> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(legs_[position(l)]);
  return LegLayout(std::move(out));
}

LegLayout LegLayout::without(const std::vector<LegLabel>& labels) const {
  for (const auto& l : labels) position(l);  // validate
  std::vector<Leg> out;
  for (const auto& leg : legs_) {
    if (std::find(labels.begin(), labels.end(), leg.label()) == labels.end()) out.push_back(leg);
  }
  return LegLayout(std::move(out));
}

LegLayout LegLayout::concat(const LegLayout& other) const {
  std::vector<Leg> out = legs_;
  out.insert(out.end(), other.legs_.begin(), other.legs_.end());
  return LegLayout(std::move(out));
}

bool operator==(const LegLayout& a, const LegLayout& b) {
  if (a.legs_.size() != b.legs_.size()) return false;
  for (std::size_t k = 0; k < a.legs_.size(); ++k) {
    if (!(a.legs_[k].label() == b.legs_[k].label()) || a.legs_[k].dim != b.legs_[k].dim)
      return false;
  }
  return true;
}

std::vector<Index> subsystem_offsets(const LegLayout& layout,
                                     const std::vector<std::size_t>& positions) {
  const auto& legs = layout.legs();
  std::vector<Index> stride(legs.size(), 1);
  for (std::size_t k = legs.size(); k-- > 1;) stride[k - 1] = stride[k] * legs[k].dim;

  std::vector<Index> offsets{0};
  for (std::size_t pos : positions) {
    const Index d = legs.at(pos).dim;
    std::vector<Index> next;
    next.reserve(offsets.size() * static_cast<std::size_t>(d));
    for (Index base : offsets)
      for (Index a = 0; a < d; ++a) next.push_back(base + a * stride[pos]);
    offsets = std::move(next);
  }
  return offsets;
}

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": matrix not square");
}

void require_layout(const Matrix& m, const LegLayout& layout) {
  require_square(m, "layout check");
  if (m.rows() != layout.dim())
    throw std::invalid_argument("matrix dimension " + std::to_string(m.rows()) +
                                " does not match layout dimension " +
                                std::to_string(layout.dim()));
}

std::vector<std::size_t> positions_of(const LegLayout& layout, const std::vector<LegLabel>& labels) {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(layout.position(l));
  return out;
}

std::vector<std::size_t> complement(const LegLayout& layout, const std::vector<std::size_t>& taken) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < layout.size(); ++k)
    if (std::find(taken.begin(), taken.end(), k) == taken.end()) out.push_back(k);
  return out;
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix kron_all(const std::vector<Matrix>& factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

LegOperator partial_trace(const Matrix& m, const LegLayout& layout,
                          const std::vector<LegLabel>& traced) {
  require_layout(m, layout);
  const auto tpos = positions_of(layout, traced);
  const auto kpos = complement(layout, tpos);
  const auto ko = subsystem_offsets(layout, kpos);
  const auto to = subsystem_offsets(layout, tpos);

  const Index n = static_cast<Index>(ko.size());
  Matrix out = Matrix::Zero(n, n);
  for (Index b = 0; b < n; ++b) {
    for (Index a = 0; a < n; ++a) {
      Complex s = 0.0;
      for (Index k : to) s += m(ko[a] + k, ko[b] + k);
      out(a, b) = s;
    }
  }
  return {std::move(out), layout.without(traced)};
}

LegOperator permute_legs(const Matrix& m, const LegLayout& layout,
                         const std::vector<LegLabel>& new_order) {
  require_layout(m, layout);
  if (new_order.size() != layout.size())
    throw std::invalid_argument("permutation must list every leg exactly once");
  const auto pos = positions_of(layout, new_order);
  LegLayout next = layout.subset(new_order);  // rejects duplicates
  const auto off = subsystem_offsets(layout, pos);
  const Index n = static_cast<Index>(off.size());
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(i, j) = m(off[i], off[j]);
  return {std::move(out), std::move(next)};
}

LegOperator contract(const Matrix& m, const LegLayout& layout, const Matrix& op,
                     const LegLayout& op_layout) {
  require_layout(m, layout);
  require_layout(op, op_layout);
  const auto opos = positions_of(layout, op_layout.labels());
  for (std::size_t k = 0; k < opos.size(); ++k) {
    if (layout[opos[k]].dim != op_layout[k].dim)
      throw std::invalid_argument("dimension mismatch on leg " + to_string(op_layout[k].label()));
  }
  const auto kpos = complement(layout, opos);
  const auto lo = subsystem_offsets(layout, opos);
  const auto ko = subsystem_offsets(layout, kpos);

  const Index n = static_cast<Index>(ko.size());
  const Index dl = static_cast<Index>(lo.size());
  Matrix out = Matrix::Zero(n, n);
  for (Index k = 0; k < dl; ++k) {
    for (Index l = 0; l < dl; ++l) {
      const Complex w = op(l, k);
      if (w == Complex(0.0)) continue;
      for (Index b = 0; b < n; ++b)
        for (Index a = 0; a < n; ++a) out(a, b) += w * m(lo[l] + ko[a], lo[k] + ko[b]);
    }
  }
  return {std::move(out), layout.without(op_layout.labels())};
}

Matrix embed(const Matrix& op, const LegLayout& op_layout, const LegLayout& layout) {
  require_layout(op, op_layout);
  std::vector<Leg> rest;
  for (const auto& leg : layout.legs())
    if (!op_layout.contains(leg.label())) rest.push_back(leg);
  LegLayout rest_layout(rest);
  Matrix full = kron(op, Matrix::Identity(rest_layout.dim(), rest_layout.dim()));
  return permute_legs(full, op_layout.concat(rest_layout), layout.labels()).matrix;
}

double hermiticity_residual(const Matrix& m) {
  require_square(m, "hermiticity_residual");
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return true;
  const double scale = m.cwiseAbs().maxCoeff();
  return hermiticity_residual(m) <= rel_tol * std::max(scale, 1e-300);
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

EigenDecomposition eig_hermitian(const Matrix& m) {
  require_square(m, "eig_hermitian");
  if (!is_hermitian(m)) throw std::invalid_argument("eig_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const Index n = m.rows();
  EigenDecomposition out{RealVector(n), Matrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

RealVector eigvals_hermitian(const Matrix& m) {
  require_square(m, "eigvals_hermitian");
  if (!is_hermitian(m)) throw std::invalid_argument("eigvals_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  return solver.eigenvalues().reverse();
}

Matrix expm(const Matrix& m) {
  require_square(m, "expm");
  return m.exp();
}

double trace_norm(const Matrix& m) {
  require_square(m, "trace_norm");
  if (m.size() == 0) return 0.0;
  if (is_hermitian(m, 1e-12)) return eigvals_hermitian(hermitian_part(m)).cwiseAbs().sum();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

Complex trace(const Matrix& m) { return m.trace(); }

}  // namespace proctensor
