#include "proctensor/models.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "proctensor/parallel.hpp"

namespace proctensor {

namespace {

// Legs used for the (S, A) pair of the shallow pocket: S is the system as it
// leaves the process at t = 2, A holds the half of the Bell pair that was fed
// in at t = 0.
const Leg kPocketS{2, Role::In, 2};
const Leg kPocketA{0, Role::Out, 2};

LegLayout pocket_sa_layout() { return LegLayout{kPocketS, kPocketA}; }

double pauli_sign(Index k) { return k == 0 ? 1.0 : -1.0; }

}  // namespace

void ShallowPocketParams::validate() const {
  if (!(g > 0.0) || !(gamma > 0.0)) throw std::invalid_argument("shallow pocket: g and gamma must be positive");
  if (!(t1 >= 0.0) || !(tau >= 0.0)) throw std::invalid_argument("shallow pocket: times must be non-negative");
}

double ShallowPocketParams::decay(double s) const { return std::exp(-g * gamma * std::abs(s)); }

PocketSpec pocket_free() { return {PocketIntervention::Free, 0.95, Matrix()}; }
PocketSpec pocket_sigmax() { return {PocketIntervention::SigmaX, 0.95, Matrix()}; }
PocketSpec pocket_offset(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("offset weight p must lie in [0, 1]");
  return {PocketIntervention::Offset, p, Matrix()};
}
PocketSpec pocket_measure_plus() { return {PocketIntervention::MeasurePlus, 0.95, Matrix()}; }
PocketSpec pocket_trash(const Matrix& sigma) {
  Matrix s = sigma;
  if (s.size() == 0) {
    s = Matrix::Zero(2, 2);
    s(0, 0) = 1.0;
  }
  DensityOperator{s, LegLayout{kPocketS}}.validate();
  return {PocketIntervention::Trash, 0.95, s};
}

std::vector<Matrix> pocket_kraus(const PocketSpec& spec) {
  switch (spec.kind) {
    case PocketIntervention::Free:
      return {Matrix::Identity(2, 2)};
    case PocketIntervention::SigmaX:
      return {pauli_x()};
    case PocketIntervention::Offset:
      if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw std::invalid_argument("offset weight p must lie in [0, 1]");
      return {std::sqrt(spec.p) * pauli_x() + std::sqrt(1.0 - spec.p) * pauli_z()};
    case PocketIntervention::MeasurePlus:
      return {Matrix::Constant(2, 2, Complex(0.5))};
    case PocketIntervention::Trash: {
      const auto [vals, vecs] = eig_hermitian(spec.sigma);
      std::vector<Matrix> out;
      for (Index j = 0; j < vals.size(); ++j) {
        if (vals(j) <= 0.0) continue;
        for (Index k = 0; k < 2; ++k) {
          Matrix kraus = Matrix::Zero(2, 2);
          kraus.col(k) = std::sqrt(vals(j)) * vecs.col(j);
          out.push_back(kraus);
        }
      }
      return out;
    }
  }
  throw std::invalid_argument("unknown intervention");
}

DensityOperator sp_state(const ShallowPocketParams& params, const PocketSpec& spec) {
  params.validate();
  const auto kraus = pocket_kraus(spec);
  // Element (s a, s' b) of the dephased state: the Lorentzian average of the
  // pointer phase collected before (t1) and after (tau) the intervention.
  Matrix rho = Matrix::Zero(4, 4);
  for (Index s = 0; s < 2; ++s)
    for (Index a = 0; a < 2; ++a)
      for (Index s2 = 0; s2 < 2; ++s2)
        for (Index b = 0; b < 2; ++b) {
          Complex amp = 0.0;
          for (const auto& k : kraus) amp += k(s, a) * std::conj(k(s2, b));
          if (amp == Complex(0.0)) continue;
          const double lever = 0.5 * ((pauli_sign(s) - pauli_sign(s2)) * params.tau +
                                      (pauli_sign(a) - pauli_sign(b)) * params.t1);
          rho(s * 2 + a, s2 * 2 + b) = 0.5 * amp * params.decay(lever);
        }
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw std::domain_error("intervention annihilates the state");
  return {rho / tr, pocket_sa_layout()};
}

ProcessTensor sp_process_tensor(const ShallowPocketParams& params) {
  params.validate();
  // Closed form written on legs (1o, 0o, 2i, 1i); only the basis states with
  // all four legs equal to the pair pattern 0000, 0101, 1010, 1111 carry weight.
  const double t1 = params.t1;
  const double tau = params.tau;
  Matrix u = Matrix::Zero(16, 16);
  const Index idx[4] = {0, 5, 10, 15};
  for (Index i : idx) u(i, i) = 1.0;
  auto set = [&](Index a, Index b, double v) {
    u(a, b) = v;
    u(b, a) = v;
  };
  set(0, 5, params.decay(t1));
  set(0, 10, params.decay(tau));
  set(0, 15, params.decay(t1 + tau));
  set(5, 10, params.decay(t1 - tau));
  set(5, 15, params.decay(tau));
  set(10, 15, params.decay(t1));
  const LegLayout printed{Leg{1, Role::Out, 2}, Leg{0, Role::Out, 2}, Leg{2, Role::In, 2}, Leg{1, Role::In, 2}};
  const LegLayout ordered{Leg{0, Role::Out, 2}, Leg{1, Role::In, 2}, Leg{1, Role::Out, 2}, Leg{2, Role::In, 2}};
  return {permute_legs(u, printed, ordered.labels()).matrix, ordered};
}

DensityOperator sp_state_from_process(const ProcessTensor& upsilon, const PocketSpec& spec) {
  const LegLayout step{Leg{1, Role::In, 2}, Leg{1, Role::Out, 2}};
  const Matrix choi = choi_from_kraus(pocket_kraus(spec));
  const LegOperator rest = contract(upsilon.choi, upsilon.layout, choi, step);
  Matrix rho = permute_legs(rest.matrix, rest.layout, pocket_sa_layout().labels()).matrix;
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw std::domain_error("intervention annihilates the state");
  return {rho / tr, pocket_sa_layout()};
}

std::vector<PocketCurveRow> sp_curves(double g, double gamma, double t1, double t_max, double dt,
                                      double p, const Matrix& trash_state) {
  if (!(dt > 0.0) || !(t_max >= 0.0)) throw std::invalid_argument("sp_curves: need dt > 0 and t_max >= 0");
  const PocketSpec specs[4] = {pocket_sigmax(), pocket_offset(p), pocket_measure_plus(),
                               pocket_trash(trash_state)};
  const std::vector<LegLabel> s{kPocketS.label()};
  const std::vector<LegLabel> a{kPocketA.label()};
  auto mi = [&](const DensityOperator& rho) {
    return std::max(mutual_information(rho.matrix, rho.layout, s, a), 0.0);
  };

  const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
  std::vector<PocketCurveRow> rows(n);
  parallel_for(n, [&](std::size_t k) {
    const double t = static_cast<double>(k) * dt;
    PocketCurveRow& row = rows[k];
    row.t = t;
    ShallowPocketParams free{g, gamma, 0.0, t};
    row.free = mi(sp_state(free, pocket_free()));
    if (t < t1 - 1e-12) {
      row.sigmax = row.offset = row.measure = row.trash = row.free;
      return;
    }
    const ShallowPocketParams after{g, gamma, t1, t - t1};
    double* out[4] = {&row.sigmax, &row.offset, &row.measure, &row.trash};
    for (int j = 0; j < 4; ++j) *out[j] = mi(sp_state(after, specs[j]));
  });
  return rows;
}

void CaseStudyParams::validate() const {
  if (!(xi >= 0.0) || !(kappa >= 0.0)) throw std::invalid_argument("case study: xi and kappa must be non-negative");
  if (!(dt > 0.0)) throw std::invalid_argument("case study: dt must be positive");
  if (n_steps < 2) throw std::invalid_argument("case study: need at least two steps");
}

namespace {

enum class Branch { Hyperbolic, Trigonometric, Critical };

Branch branch_of(double xi, double kappa, double* root) {
  const double disc = kappa * kappa - 64.0 * xi * xi;
  const double scale = std::max(1.0, kappa * kappa);
  if (std::abs(disc) <= 1e-14 * scale) {
    *root = 0.0;
    return Branch::Critical;
  }
  *root = std::sqrt(std::abs(disc));
  return disc > 0.0 ? Branch::Hyperbolic : Branch::Trigonometric;
}

}  // namespace

double cs_coefficient_ct(double xi, double kappa, double t) {
  double r = 0.0;
  const Branch b = branch_of(xi, kappa, &r);
  const double damp = std::exp(-kappa * t / 4.0);
  switch (b) {
    case Branch::Hyperbolic:
      return damp * (kappa * std::sinh(t * r / 4.0) / r + std::cosh(t * r / 4.0));
    case Branch::Trigonometric:
      return damp * (kappa * std::sin(t * r / 4.0) / r + std::cos(t * r / 4.0));
    case Branch::Critical:
      return damp * (1.0 + kappa * t / 4.0);
  }
  return 0.0;
}

double cs_coefficient_ct_derivative(double xi, double kappa, double t) {
  double r = 0.0;
  const Branch b = branch_of(xi, kappa, &r);
  const double damp = std::exp(-kappa * t / 4.0);
  const double q = r / 4.0;
  switch (b) {
    case Branch::Hyperbolic:
      // d/dt [k sinh(qt)/r + cosh(qt)] - (k/4) [...]
      return damp * ((kappa * q / r - kappa / 4.0) * std::cosh(q * t) +
                     (q - kappa * kappa / (4.0 * r)) * std::sinh(q * t));
    case Branch::Trigonometric:
      return damp * ((kappa * q / r - kappa / 4.0) * std::cos(q * t) -
                     (q + kappa * kappa / (4.0 * r)) * std::sin(q * t));
    case Branch::Critical:
      return -damp * kappa * kappa * t / 16.0;
  }
  return 0.0;
}

CpDivisibility cs_cp_divisible(double xi, double kappa, double t_max, double step) {
  if (!(step > 0.0) || !(t_max >= 0.0)) throw std::invalid_argument("cs_cp_divisible: bad grid");
  CpDivisibility out;
  const auto n = static_cast<std::size_t>(std::floor(t_max / step + 1e-9)) + 1;
  double prev_c = cs_coefficient_ct(xi, kappa, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * step;
    const double c = cs_coefficient_ct(xi, kappa, t);
    const double dc = cs_coefficient_ct_derivative(xi, kappa, t);
    if (k > 0 && ((prev_c > 0.0 && c <= 0.0) || (prev_c < 0.0 && c >= 0.0))) out.zero_crossings.push_back(t);
    prev_c = c;
    // The rate -dc/(2c) is negative exactly when c and dc share a sign.
    if (c * dc > 1e-12 * c * c && out.divisible) {
      out.divisible = false;
      out.first_violation = t;
    }
  }
  return out;
}

double cs_n2(double xi, double kappa) {
  const double disc = 64.0 * xi * xi - kappa * kappa;
  if (!(disc > 0.0)) return 0.0;
  const double expo = kappa * M_PI / std::sqrt(disc);
  if (expo == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / std::expm1(expo);
}

Matrix cs_lindblad_superoperator(double xi, double kappa) {
  const Matrix h = xi * kron(pauli_x(), pauli_x());
  Matrix lower = Matrix::Zero(2, 2);
  lower(0, 1) = 1.0;
  const Matrix jump = std::sqrt(kappa) * kron(Matrix::Identity(2, 2), lower);
  return lindblad_generator(h, {jump});
}

Matrix cs_initial_state() {
  Matrix s = Matrix::Zero(4, 4);
  s(0, 0) = 1.0;
  return s;
}

DilatedDynamics cs_dynamics(const CaseStudyParams& params) {
  params.validate();
  DilatedDynamics dyn;
  dyn.sys_dim = 2;
  dyn.env_dim = 2;
  dyn.initial_state = cs_initial_state();
  const Matrix step = expm(cs_lindblad_superoperator(params.xi, params.kappa) * params.dt);
  dyn.propagators.assign(static_cast<std::size_t>(params.n_steps - 1), step);
  dyn.first_step_has_input = false;
  dyn.first_timestep = 1;
  return dyn;
}

ProcessTensor cs_process_tensor(const CaseStudyParams& params) {
  return build_process_tensor(cs_dynamics(params), params.n_steps, false);
}

std::vector<Regime> cs_regimes() { return {{"cp", 1.0, 10.0}, {"int", 1.0, 8.0}, {"snm", 1.0, 1.0}}; }

Regime cs_regime(const std::string& name) {
  for (const auto& r : cs_regimes())
    if (r.name == name) return r;
  throw std::invalid_argument("unknown regime '" + name + "' (expected cp, int or snm)");
}

std::vector<double> linspace_step(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("invalid range");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = lo + static_cast<double>(k) * step;
  return v;
}

std::vector<GridPoint> cs_grid_scan(const std::vector<double>& xis, const std::vector<double>& kappas,
                                    GridMetric metric, const CaseStudyParams& base) {
  std::vector<GridPoint> out(xis.size() * kappas.size());
  parallel_for(out.size(), [&](std::size_t k) {
    GridPoint& p = out[k];
    p.xi = xis[k / kappas.size()];
    p.kappa = kappas[k % kappas.size()];
    if (metric == GridMetric::N2) {
      p.value = cs_n2(p.xi, p.kappa);
    } else {
      CaseStudyParams params = base;
      params.xi = p.xi;
      params.kappa = p.kappa;
      p.value = non_markovianity(cs_process_tensor(params));
    }
  });
  return out;
}

BlockPartition cs_partition(const ProcessTensor& pt, int ell) {
  return BlockPartition::contiguous(pt.layout, 2, ell);
}

Instrument cs_memory_instrument(const std::string& name, int ell) {
  if (name == "identity") return identity_instrument(ell, 2, 2);
  if (name == "causal-break") return causal_break_instrument(ell, 2);
  if (name == "noisy") return noisy_instrument(ell, 2, 2);
  throw std::invalid_argument("unknown instrument '" + name + "' (expected identity, causal-break or noisy)");
}

MultiTimeObservable cs_observable(const Instrument& memory, int ell, int n_steps) {
  if (ell < 1 || ell > n_steps - 2) throw std::invalid_argument("cs_observable: ell out of range");
  const auto& mf = memory.factors();
  if (mf.size() != static_cast<std::size_t>(ell))
    throw std::invalid_argument("cs_observable: memory instrument must have one factor per step");
  for (int k = 0; k < ell; ++k) {
    const LegLayout expect{Leg{2 + k, Role::In, 2}, Leg{2 + k, Role::Out, 2}};
    if (!(mf[static_cast<std::size_t>(k)].layout == expect))
      throw std::invalid_argument("cs_observable: memory instrument must act on steps 2..ell+1");
  }

  Matrix zero = Matrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  Instrument j = preparation(zero, 1);
  j = tensor(j, memory);
  if (ell + 2 <= n_steps - 1) j = tensor(j, identity_instrument(n_steps - 2 - ell, 2, ell + 2));
  j = tensor(j, measurement(tetrahedral_povm(), n_steps), "observable");

  MultiTimeObservable c;
  c.instrument = j;
  c.coefficients.push_back({1.0});
  // Coefficients of the identity map in the memory factors: c_e = tr[D_e^T Psi+].
  const DualFrame duals = dual_frame(memory);
  const Matrix id = psi_plus(2);
  for (const auto& f : duals.factors) {
    std::vector<Complex> coef(f.size());
    for (std::size_t e = 0; e < f.size(); ++e) coef[e] = f.elements[e].cwiseProduct(id).sum();
    c.coefficients.push_back(std::move(coef));
  }
  for (int k = ell + 2; k <= n_steps - 1; ++k) c.coefficients.push_back({1.0});
  std::vector<Complex> povm(4, 0.0);
  povm[0] = 1.0;
  c.coefficients.push_back(std::move(povm));
  return c;
}

bool BoundRecord::cor2_holds(double tol) const {
  return std::all_of(cor2.begin(), cor2.end(), [&](const Cor2Result& r) { return r.max_distance <= r.rhs + tol; });
}

bool BoundRecord::diamond_holds(double tol) const {
  return !diamond || diamond->lower_bound <= diamond->rhs + tol;
}

BoundRecord cs_verify_bounds(const ProcessTensor& pt, const std::string& regime,
                             const std::string& instrument, int ell, Aggregation aggregation,
                             std::uint64_t seed, std::size_t samples) {
  const Instrument memory = cs_memory_instrument(instrument, ell);
  const BlockPartition part = cs_partition(pt, ell);
  const MemoryAnalysis analysis = analyze_memory(pt, part, memory);
  const int n_steps = pt.timesteps().back();

  BoundRecord rec;
  rec.regime = regime;
  rec.instrument = instrument;
  rec.ell = ell;
  rec.seed = seed;
  rec.theta_bits = analysis.big_theta(aggregation);
  rec.thm1 = verify_thm1(pt, analysis, cs_observable(memory, ell, n_steps), aggregation);
  for (int t = ell + 2; t <= n_steps; ++t) rec.cor2.push_back(verify_cor2(pt, analysis, t, aggregation));
  if (instrument == "causal-break") rec.diamond = estimate_diamond_gap(pt, analysis, samples, seed, aggregation);
  return rec;
}

}  // namespace proctensor
