#include "proctensor/instruments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "proctensor/process_tensor.hpp"
#include "proctensor/quantum_info.hpp"

namespace proctensor {

Matrix InstrumentFactor::sum() const {
  Matrix s = Matrix::Zero(layout.dim(), layout.dim());
  for (const auto& e : elements) s += e;
  return s;
}

Instrument::Instrument(std::string name, std::vector<InstrumentFactor> factors)
    : name_(std::move(name)), factors_(std::move(factors)) {
  std::vector<Leg> legs;
  for (auto& f : factors_) {
    if (f.elements.empty()) throw std::invalid_argument("instrument factor without elements");
    for (const auto& e : f.elements) {
      if (e.rows() != f.layout.dim() || e.cols() != f.layout.dim())
        throw std::invalid_argument("instrument element does not match its layout");
    }
    if (f.labels.empty()) {
      for (std::size_t k = 0; k < f.elements.size(); ++k) f.labels.push_back(std::to_string(k));
    }
    if (f.labels.size() != f.elements.size()) throw std::invalid_argument("label count mismatch");
    legs.insert(legs.end(), f.layout.legs().begin(), f.layout.legs().end());
  }
  layout_ = LegLayout(std::move(legs));
}

Instrument Instrument::single(std::string name, LegLayout layout, std::vector<Matrix> elements,
                              std::vector<std::string> labels) {
  return Instrument(std::move(name),
                    {InstrumentFactor{std::move(layout), std::move(elements), std::move(labels)}});
}

std::size_t Instrument::outcome_count() const {
  std::size_t n = 1;
  for (const auto& f : factors_) n *= f.size();
  return n;
}

std::vector<std::size_t> Instrument::digits(std::size_t outcome) const {
  std::vector<std::size_t> d(factors_.size());
  for (std::size_t k = factors_.size(); k-- > 0;) {
    d[k] = outcome % factors_[k].size();
    outcome /= factors_[k].size();
  }
  if (outcome != 0) throw std::out_of_range("outcome index out of range");
  return d;
}

std::size_t Instrument::outcome_index(const std::vector<std::size_t>& digits) const {
  if (digits.size() != factors_.size()) throw std::invalid_argument("digit count mismatch");
  std::size_t x = 0;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (digits[k] >= factors_[k].size()) throw std::out_of_range("digit out of range");
    x = x * factors_[k].size() + digits[k];
  }
  return x;
}

Matrix Instrument::element(std::size_t outcome) const {
  const auto d = digits(outcome);
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < factors_.size(); ++k) out = kron(out, factors_[k].elements[d[k]]);
  return out;
}

std::string Instrument::label(std::size_t outcome) const {
  const auto d = digits(outcome);
  std::string s;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (k) s += ",";
    s += factors_[k].labels[d[k]];
  }
  return s;
}

Matrix Instrument::deterministic_sum() const {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factors_) out = kron(out, f.sum());
  return out;
}

Instrument tensor(const Instrument& a, const Instrument& b, std::string name) {
  std::vector<InstrumentFactor> f = a.factors();
  f.insert(f.end(), b.factors().begin(), b.factors().end());
  if (name.empty()) name = a.name() + "*" + b.name();
  return Instrument(std::move(name), std::move(f));
}

Matrix DualFrame::dual(std::size_t outcome) const {
  std::vector<std::size_t> d(factors.size());
  for (std::size_t k = factors.size(); k-- > 0;) {
    d[k] = outcome % factors[k].size();
    outcome /= factors[k].size();
  }
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < factors.size(); ++k) out = kron(out, factors[k].elements[d[k]]);
  return out;
}

std::size_t DualFrame::outcome_count() const {
  std::size_t n = 1;
  for (const auto& f : factors) n *= f.size();
  return n;
}

namespace {

LegLayout step_pair(int t, Index d) { return LegLayout{Leg{t, Role::In, d}, Leg{t, Role::Out, d}}; }

}  // namespace

Instrument identity_instrument(int ell, Index d, int first_timestep) {
  if (ell < 1) throw std::invalid_argument("ell must be at least 1");
  std::vector<InstrumentFactor> f;
  for (int k = 0; k < ell; ++k)
    f.push_back({step_pair(first_timestep + k, d), {psi_plus(d)}, {"id"}});
  return Instrument("identity", std::move(f));
}

Instrument noisy_instrument(int ell, Index d, int first_timestep) {
  if (ell < 1) throw std::invalid_argument("ell must be at least 1");
  std::vector<InstrumentFactor> f;
  const Matrix e = Matrix::Identity(d * d, d * d) / static_cast<double>(d);
  for (int k = 0; k < ell; ++k) f.push_back({step_pair(first_timestep + k, d), {e}, {"noise"}});
  return Instrument("noisy", std::move(f));
}

std::vector<Matrix> tetrahedral_povm() {
  const double alpha[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  const double r = 1.0 / std::sqrt(3.0);
  std::vector<Matrix> out;
  for (const auto& a : alpha) {
    Matrix p = Matrix::Identity(2, 2) + r * (a[0] * pauli_x() + a[1] * pauli_y() + a[2] * pauli_z());
    out.push_back(0.25 * p);
  }
  return out;
}

std::vector<Matrix> causal_break_states() {
  Vector zero(2), one(2), plus_x(2), plus_y(2);
  zero << 1, 0;
  one << 0, 1;
  plus_x << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  plus_y << 1 / std::sqrt(2.0), Complex(0, 1 / std::sqrt(2.0));
  return {ket_projector(zero), ket_projector(one), ket_projector(plus_x), ket_projector(plus_y)};
}

Instrument causal_break_instrument(int ell, int first_timestep) {
  if (ell < 1) throw std::invalid_argument("ell must be at least 1");
  const auto povm = tetrahedral_povm();
  const auto states = causal_break_states();
  std::vector<Matrix> elems;
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < povm.size(); ++a) {
    for (std::size_t r = 0; r < states.size(); ++r) {
      elems.push_back(kron(povm[a].transpose(), states[r] / 4.0));
      labels.push_back("m" + std::to_string(a) + "p" + std::to_string(r));
    }
  }
  std::vector<InstrumentFactor> f;
  for (int k = 0; k < ell; ++k) f.push_back({step_pair(first_timestep + k, 2), elems, labels});
  return Instrument("causal-break", std::move(f));
}

Instrument unitary_instrument(const Matrix& u, int ell, int first_timestep) {
  if (u.rows() != u.cols() || !(u.adjoint() * u).isIdentity(1e-10))
    throw std::invalid_argument("unitary_instrument: matrix is not unitary");
  if (ell < 1) throw std::invalid_argument("ell must be at least 1");
  const Matrix choi = choi_from_kraus({u});
  std::vector<InstrumentFactor> f;
  for (int k = 0; k < ell; ++k) f.push_back({step_pair(first_timestep + k, u.rows()), {choi}, {"U"}});
  return Instrument("unitary", std::move(f));
}

Instrument trash_and_prepare(const Matrix& sigma, int timestep) {
  DensityOperator{sigma, LegLayout{Leg{timestep, Role::Out, sigma.rows()}}}.validate();
  const Index d = sigma.rows();
  return Instrument::single("trash-and-prepare", step_pair(timestep, d),
                            {kron(Matrix::Identity(d, d), sigma)}, {"trash"});
}

Instrument preparation(const Matrix& rho, int timestep) {
  return Instrument::single("preparation", LegLayout{Leg{timestep, Role::Out, rho.rows()}}, {rho},
                            {"prep"});
}

Instrument measurement(const std::vector<Matrix>& povm, int timestep) {
  if (povm.empty()) throw std::invalid_argument("measurement: empty POVM");
  std::vector<Matrix> elems;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < povm.size(); ++k) {
    elems.push_back(povm[k].transpose());
    labels.push_back("e" + std::to_string(k));
  }
  return Instrument::single("measurement", LegLayout{Leg{timestep, Role::In, povm[0].rows()}},
                            std::move(elems), std::move(labels));
}

Matrix gram_matrix(const std::vector<Matrix>& elements) {
  const Index n = static_cast<Index>(elements.size());
  Matrix g(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) g(a, b) = elements[a].cwiseProduct(elements[b]).sum();
  return g;
}

DualFrame dual_frame(const Instrument& inst) {
  DualFrame frame;
  for (const auto& f : inst.factors()) {
    const Matrix g = gram_matrix(f.elements);
    Eigen::FullPivLU<Matrix> lu(g);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible())
      throw std::domain_error("dual_frame: instrument elements are linearly dependent");
    const Matrix ginv = lu.inverse();
    InstrumentFactor d{f.layout, {}, f.labels};
    for (std::size_t x = 0; x < f.size(); ++x) {
      Matrix acc = Matrix::Zero(f.layout.dim(), f.layout.dim());
      for (std::size_t y = 0; y < f.size(); ++y) acc += ginv(static_cast<Index>(y), static_cast<Index>(x)) * f.elements[y];
      d.elements.push_back(std::move(acc));
    }
    frame.factors.push_back(std::move(d));
  }
  return frame;
}

double biorthogonality_residual(const Instrument& inst, const DualFrame& duals) {
  // The product structure makes the full residual a function of per-factor ones.
  if (duals.factors.size() != inst.factors().size()) throw std::invalid_argument("frame mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < duals.factors.size(); ++k) {
    const auto& o = inst.factors()[k].elements;
    const auto& d = duals.factors[k].elements;
    for (std::size_t a = 0; a < d.size(); ++a)
      for (std::size_t b = 0; b < o.size(); ++b) {
        const Complex v = d[a].cwiseProduct(o[b]).sum();
        worst = std::max(worst, std::abs(v - Complex(a == b ? 1.0 : 0.0)));
      }
  }
  return worst;
}

Matrix project_onto_span(const Matrix& a, const LegLayout& layout, const Instrument& inst,
                         const DualFrame& duals) {
  Matrix cur = a;
  for (std::size_t k = 0; k < inst.factors().size(); ++k) {
    const auto& f = inst.factors()[k];
    const auto& df = duals.factors[k];
    const LegLayout rest = layout.without(f.layout.labels());
    const LegLayout joined = f.layout.concat(rest);
    Matrix next = Matrix::Zero(cur.rows(), cur.cols());
    for (std::size_t x = 0; x < f.size(); ++x) {
      const LegOperator coeff = contract(cur, layout, df.elements[x], f.layout);
      next += permute_legs(kron(f.elements[x], coeff.matrix), joined, layout.labels()).matrix;
    }
    cur = std::move(next);
  }
  return cur;
}

UnbiasedReport unbiased_report(const Instrument& inst) {
  const Matrix oj = inst.deterministic_sum();
  UnbiasedReport r;
  r.scale = oj.trace().real() / static_cast<double>(oj.rows());
  r.residual = (oj - r.scale * Matrix::Identity(oj.rows(), oj.cols())).cwiseAbs().maxCoeff();
  r.unbiased = r.residual <= 1e-8;
  return r;
}

bool is_unbiased(const Instrument& inst) { return unbiased_report(inst).unbiased; }

bool InstrumentReport::causal() const {
  const bool levels_ok = std::all_of(hierarchy.begin(), hierarchy.end(),
                                     [&](double r) { return r <= 1e-8 * std::max(expected_trace, 1.0); });
  return levels_ok && std::abs(final_scalar - 1.0) <= 1e-8;
}

bool InstrumentReport::normalized() const {
  return std::abs(trace - expected_trace) <= 1e-8 * std::max(expected_trace, 1.0);
}

InstrumentReport validate_instrument(const Instrument& inst) {
  InstrumentReport r;
  r.min_element_eigenvalue = 0.0;
  bool first = true;
  for (const auto& f : inst.factors()) {
    for (const auto& e : f.elements) {
      double lo = -1.0;
      if (is_hermitian(e, 1e-10)) {
        const RealVector ev = eigvals_hermitian(hermitian_part(e));
        const double scale = std::max(std::abs(ev(0)), 1.0);
        lo = ev(ev.size() - 1) / scale;
      }
      r.min_element_eigenvalue = first ? lo : std::min(r.min_element_eigenvalue, lo);
      first = false;
    }
  }
  const Matrix oj = inst.deterministic_sum();
  r.trace = oj.trace().real();
  r.expected_trace = static_cast<double>(inst.layout().role_dim(Role::In));
  r.hierarchy = hierarchy_residuals(oj, inst.layout(), Role::Out, &r.final_scalar);
  return r;
}

Matrix haar_unitary(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix z(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) z(i, j) = Complex(n(rng), n(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    const Complex diag = r(k, k);
    const double mag = std::abs(diag);
    if (mag > 0) q.col(k) *= diag / mag;
  }
  return q;
}

Vector haar_state(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = Complex(n(rng), n(rng));
  return v / v.norm();
}

Matrix random_density(Index d, std::mt19937_64& rng, Index rank) {
  if (rank <= 0) rank = d;
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix g(d, rank);
  for (Index j = 0; j < rank; ++j)
    for (Index i = 0; i < d; ++i) g(i, j) = Complex(n(rng), n(rng));
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

std::vector<Matrix> random_kraus(Index d_in, Index d_out, std::size_t outcomes,
                                 std::mt19937_64& rng) {
  const Index big = d_out * static_cast<Index>(outcomes);
  if (big < d_in) throw std::invalid_argument("random_kraus: output space too small for an isometry");
  const Matrix u = haar_unitary(big, rng);
  const Matrix v = u.leftCols(d_in);
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < outcomes; ++k) out.push_back(v.middleRows(static_cast<Index>(k) * d_out, d_out));
  return out;
}

}  // namespace proctensor
