#include "proctensor/quantum_info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace proctensor {

namespace {

// Eigenvalues of a positive operator with floating noise removed.
RealVector clamped_spectrum(const Matrix& rho) {
  RealVector ev = eigvals_hermitian(hermitian_part(rho));
  const double scale = std::max(1.0, ev.size() ? std::abs(ev(0)) : 0.0);
  for (Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < -kNegativeTolerance * scale)
      throw std::domain_error("operator has eigenvalue " + std::to_string(ev(k)) +
                              " below the positivity tolerance");
    if (ev(k) < 0.0) ev(k) = 0.0;
  }
  return ev;
}

double entropy_of(const RealVector& ev) {
  double s = 0.0;
  for (Index k = 0; k < ev.size(); ++k)
    if (ev(k) > 0.0) s -= ev(k) * std::log2(ev(k));
  return s;
}

}  // namespace

DensityOperator DensityOperator::normalized() const {
  const double tr = trace();
  if (!(tr > 0.0)) throw std::domain_error("cannot normalize an operator with zero trace");
  return {matrix / tr, layout};
}

void DensityOperator::validate(bool require_unit_trace) const {
  if (matrix.rows() != layout.dim()) throw std::invalid_argument("density operator layout mismatch");
  if (!is_hermitian(matrix)) throw std::domain_error("density operator is not Hermitian");
  const RealVector ev = eigvals_hermitian(hermitian_part(matrix));
  if (ev.size() && ev(ev.size() - 1) < -kNegativeTolerance)
    throw std::domain_error("density operator is not positive semidefinite");
  if (require_unit_trace && std::abs(trace() - 1.0) > 1e-10)
    throw std::domain_error("density operator trace differs from one");
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix ket_projector(const Vector& psi) { return psi * psi.adjoint(); }

Matrix psi_plus(Index d) {
  if (d < 1) throw std::invalid_argument("psi_plus: dimension must be positive");
  Matrix m = Matrix::Zero(d * d, d * d);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) m(a * d + a, b * d + b) = 1.0;
  return m;
}

double von_neumann_entropy(const Matrix& rho) { return entropy_of(clamped_spectrum(rho)); }

double relative_entropy(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows()) throw std::invalid_argument("relative_entropy: dimension mismatch");
  const RealVector pr = clamped_spectrum(rho);
  const EigenDecomposition es = eig_hermitian(hermitian_part(sigma));
  const double top = std::max(es.values.size() ? es.values(0) : 0.0, 0.0);
  const double cut = kSupportThreshold * std::max(top, 1e-300);
  const double rho_scale = std::max(pr.size() ? pr(0) : 0.0, 1e-300);

  // tr[rho log sigma] on the support of sigma; weight of rho outside it.
  double cross = 0.0;
  double outside = 0.0;
  const Matrix rv = rho * es.vectors;
  for (Index k = 0; k < es.values.size(); ++k) {
    const double w = es.vectors.col(k).dot(rv.col(k)).real();
    if (es.values(k) > cut) {
      cross += w * std::log2(es.values(k));
    } else {
      outside += w;
    }
  }
  if (outside > kSupportThreshold * rho_scale * static_cast<double>(rho.rows()))
    return std::numeric_limits<double>::infinity();

  double self = 0.0;
  for (Index k = 0; k < pr.size(); ++k)
    if (pr(k) > 0.0) self += pr(k) * std::log2(pr(k));
  return self - cross;
}

double classical_relative_entropy(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("distribution length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (q[k] <= 0.0) return std::numeric_limits<double>::infinity();
    s += p[k] * std::log2(p[k] / q[k]);
  }
  return s;
}

namespace {

void require_cover(const LegLayout& layout, const std::vector<std::vector<LegLabel>>& parts) {
  std::size_t count = 0;
  for (const auto& part : parts) {
    for (const auto& l : part) {
      if (!layout.contains(l))
        throw std::invalid_argument("partition names unknown leg " + to_string(l));
      ++count;
    }
  }
  if (count != layout.size()) throw std::invalid_argument("partition does not cover the layout exactly");
  for (std::size_t a = 0; a < parts.size(); ++a)
    for (std::size_t b = a + 1; b < parts.size(); ++b)
      for (const auto& l : parts[a])
        for (const auto& r : parts[b])
          if (l == r) throw std::invalid_argument("partition blocks overlap");
}

double marginal_entropy(const Matrix& rho, const LegLayout& layout,
                        const std::vector<LegLabel>& keep) {
  std::vector<LegLabel> traced;
  for (const auto& l : layout.labels())
    if (std::find(keep.begin(), keep.end(), l) == keep.end()) traced.push_back(l);
  return von_neumann_entropy(partial_trace(rho, layout, traced).matrix);
}

std::vector<LegLabel> join(std::vector<LegLabel> a, const std::vector<LegLabel>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

double mutual_information(const Matrix& rho, const LegLayout& layout,
                          const std::vector<LegLabel>& a, const std::vector<LegLabel>& b) {
  require_cover(layout, {a, b});
  return marginal_entropy(rho, layout, a) + marginal_entropy(rho, layout, b) -
         von_neumann_entropy(rho);
}

double conditional_mutual_information(const Matrix& rho, const LegLayout& layout,
                                      const std::vector<LegLabel>& f,
                                      const std::vector<LegLabel>& m,
                                      const std::vector<LegLabel>& h) {
  require_cover(layout, {f, m, h});
  return marginal_entropy(rho, layout, join(f, m)) + marginal_entropy(rho, layout, join(m, h)) -
         von_neumann_entropy(rho) - marginal_entropy(rho, layout, m);
}

Matrix apply_choi(const Matrix& choi, const Matrix& rho) {
  const Index din = rho.rows();
  if (din == 0 || choi.rows() % din != 0 || rho.cols() != din)
    throw std::invalid_argument("apply_choi: dimension mismatch");
  const Index dout = choi.rows() / din;
  Matrix out = Matrix::Zero(dout, dout);
  // out = sum_{ij} rho_{ij} * block_{ij} of the Choi matrix.
  for (Index i = 0; i < din; ++i)
    for (Index j = 0; j < din; ++j) out += rho(i, j) * choi.block(i * dout, j * dout, dout, dout);
  return out;
}

DensityOperator apply_choi(const Matrix& choi, const DensityOperator& input) {
  Matrix out = apply_choi(choi, input.matrix);
  if (out.rows() == input.layout.dim()) return {std::move(out), input.layout};
  const Index d = out.rows();
  return {std::move(out), LegLayout{Leg{0, Role::Aux, d}}};
}

Matrix vectorize(const Matrix& rho) {
  Matrix v(rho.rows() * rho.cols(), 1);
  for (Index i = 0; i < rho.rows(); ++i)
    for (Index j = 0; j < rho.cols(); ++j) v(i * rho.cols() + j, 0) = rho(i, j);
  return v;
}

Matrix unvectorize(const Matrix& v, Index d) {
  if (v.size() != d * d) throw std::invalid_argument("unvectorize: size mismatch");
  Matrix rho(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) rho(i, j) = v(i * d + j);
  return rho;
}

Matrix unitary_superoperator(const Matrix& u) { return kron(u, u.conjugate()); }

Matrix lindblad_generator(const Matrix& hamiltonian, const std::vector<Matrix>& jumps) {
  const Index d = hamiltonian.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Complex i(0.0, 1.0);
  Matrix gen = -i * (kron(hamiltonian, id) - kron(id, hamiltonian.transpose()));
  for (const auto& l : jumps) {
    const Matrix ldl = l.adjoint() * l;
    gen += kron(l, l.conjugate()) - 0.5 * kron(ldl, id) - 0.5 * kron(id, ldl.transpose());
  }
  return gen;
}

Matrix apply_superoperator(const Matrix& superop, const Matrix& rho) {
  return unvectorize(superop * vectorize(rho), rho.rows());
}

Matrix superoperator_to_choi(const Matrix& superop, Index d_in, Index d_out) {
  if (superop.rows() != d_out * d_out || superop.cols() != d_in * d_in)
    throw std::invalid_argument("superoperator_to_choi: dimension mismatch");
  Matrix choi = Matrix::Zero(d_in * d_out, d_in * d_out);
  for (Index i = 0; i < d_in; ++i) {
    for (Index j = 0; j < d_in; ++j) {
      const Matrix img = unvectorize(superop.col(i * d_in + j), d_out);
      choi.block(i * d_out, j * d_out, d_out, d_out) = img;
    }
  }
  return choi;
}

Matrix choi_from_kraus(const std::vector<Matrix>& kraus) {
  if (kraus.empty()) throw std::invalid_argument("choi_from_kraus: no Kraus operators");
  const Index din = kraus.front().cols();
  const Index dout = kraus.front().rows();
  Matrix choi = Matrix::Zero(din * dout, din * dout);
  for (const auto& k : kraus) {
    Vector v(din * dout);
    for (Index i = 0; i < din; ++i) v.segment(i * dout, dout) = k.col(i);
    choi += v * v.adjoint();
  }
  return choi;
}

}  // namespace proctensor
