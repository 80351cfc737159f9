#include "proctensor/memory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "proctensor/parallel.hpp"

namespace proctensor {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

bool has_label(const std::vector<LegLabel>& v, const LegLabel& l) {
  return std::find(v.begin(), v.end(), l) != v.end();
}

// sum_{m,n} op(m,n) * x.block(m*dd, n*dd, dd, dd): contraction of the leading
// subsystem (dimension op.rows()) of x with op^T.
Matrix contract_leading(const Matrix& x, const Matrix& op) {
  const Index dm = op.rows();
  const Index dd = x.rows() / dm;
  Matrix out = Matrix::Zero(dd, dd);
  for (Index n = 0; n < dm; ++n)
    for (Index m = 0; m < dm; ++m) {
      const Complex w = op(m, n);
      if (w != Complex(0.0)) out.noalias() += w * x.block(m * dd, n * dd, dd, dd);
    }
  return out;
}

std::vector<LegLabel> layout_order(const LegLayout& layout, const std::vector<LegLabel>& subset) {
  std::vector<LegLabel> out;
  for (const auto& l : layout.labels())
    if (has_label(subset, l)) out.push_back(l);
  return out;
}

}  // namespace

double bits_to_nats(double bits) { return bits * kLn2; }

BlockPartition BlockPartition::contiguous(const LegLayout& layout, int first_memory_timestep,
                                          int ell) {
  if (ell < 1) throw std::invalid_argument("memory length must be at least 1");
  BlockPartition p;
  p.ell = ell;
  for (const auto& leg : layout.legs()) {
    if (leg.t < first_memory_timestep)
      p.history.push_back(leg.label());
    else if (leg.t < first_memory_timestep + ell)
      p.memory.push_back(leg.label());
    else
      p.future.push_back(leg.label());
  }
  if (p.memory.empty()) throw std::invalid_argument("memory block selects no legs");
  return p;
}

double ConditionalProcessSet::total_trace() const {
  return std::accumulate(traces.begin(), traces.end(), 0.0);
}

double ConditionalProcessSet::weight(std::size_t x) const {
  const double tot = total_trace();
  return tot > 0.0 ? traces.at(x) / tot : 0.0;
}

Matrix ConditionalProcessSet::sum() const {
  Matrix s = Matrix::Zero(layout.dim(), layout.dim());
  for (const auto& op : operators) s += op;
  return s;
}

MultiTimeObservable MultiTimeObservable::indicator(Instrument instrument, std::size_t outcome) {
  MultiTimeObservable c;
  const auto digits = instrument.digits(outcome);
  for (std::size_t k = 0; k < digits.size(); ++k) {
    std::vector<Complex> coef(instrument.factors()[k].size(), 0.0);
    coef[digits[k]] = 1.0;
    c.coefficients.push_back(std::move(coef));
  }
  c.instrument = std::move(instrument);
  return c;
}

Complex MultiTimeObservable::coefficient(std::size_t outcome) const {
  const auto digits = instrument.digits(outcome);
  Complex c = 1.0;
  for (std::size_t k = 0; k < digits.size(); ++k) c *= coefficients.at(k).at(digits[k]);
  return c;
}

double MultiTimeObservable::norm() const {
  double n = 1.0;
  for (const auto& coef : coefficients) {
    double s = 0.0;
    for (const auto& c : coef) s += std::norm(c);
    n *= std::sqrt(s);
  }
  return n;
}

Matrix MultiTimeObservable::matrix() const {
  const auto& f = instrument.factors();
  if (coefficients.size() != f.size())
    throw std::invalid_argument("observable coefficients do not match the instrument factors");
  Matrix m = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (coefficients[k].size() != f[k].size())
      throw std::invalid_argument("observable coefficients do not match the instrument factors");
    Matrix part = Matrix::Zero(f[k].layout.dim(), f[k].layout.dim());
    for (std::size_t e = 0; e < f[k].size(); ++e) part += coefficients[k][e] * f[k].elements[e];
    m = kron(m, part);
  }
  return m;
}

ConditionalProcessSet condition(const ProcessTensor& pt, const BlockPartition& part,
                                const Instrument& inst) {
  const LegLayout& il = inst.layout();
  if (il.size() != part.memory.size())
    throw std::invalid_argument(
        "instrument legs must cover the memory block exactly (retained memory legs are not supported)");
  for (const auto& leg : il.legs()) {
    if (!has_label(part.memory, leg.label()))
      throw std::invalid_argument("instrument acts on leg " + to_string(leg.label()) +
                                  " outside the memory block");
    if (pt.layout[pt.layout.position(leg.label())].dim != leg.dim)
      throw std::invalid_argument("instrument leg dimension mismatch on " + to_string(leg.label()));
  }

  const LegLayout rest = pt.layout.without(il.labels());
  std::vector<LegLabel> order = il.labels();
  for (const auto& l : rest.labels()) order.push_back(l);
  Matrix x = permute_legs(pt.choi, pt.layout, order).matrix;

  std::vector<Matrix> current;
  current.push_back(std::move(x));
  for (const auto& f : inst.factors()) {
    std::vector<Matrix> next(current.size() * f.size());
    parallel_for(current.size(), [&](std::size_t p) {
      for (std::size_t e = 0; e < f.size(); ++e)
        next[p * f.size() + e] = contract_leading(current[p], f.elements[e]);
    });
    current = std::move(next);
  }

  ConditionalProcessSet cond;
  cond.layout = rest;
  cond.future = layout_order(rest, part.future);
  cond.history = layout_order(rest, part.history);
  if (cond.future.size() + cond.history.size() != rest.size())
    throw std::invalid_argument("partition does not cover the process legs");
  cond.traces.reserve(current.size());
  for (const auto& op : current) cond.traces.push_back(op.trace().real());
  cond.operators = std::move(current);
  return cond;
}

double theta(const ConditionalProcessSet& cond, std::size_t x) {
  const double tr = cond.traces.at(x);
  const double tot = cond.total_trace();
  if (!(tr > 1e-14 * std::max(tot, 1e-300))) return 0.0;
  if (cond.future.empty() || cond.history.empty()) return 0.0;
  const double mi =
      mutual_information(cond.operators[x] / tr, cond.layout, cond.future, cond.history);
  return std::max(mi, 0.0);
}

std::vector<double> thetas(const ConditionalProcessSet& cond) {
  std::vector<double> out(cond.size());
  parallel_for(cond.size(), [&](std::size_t x) { out[x] = theta(cond, x); });
  return out;
}

namespace {

double aggregate(const ConditionalProcessSet& cond, const std::vector<double>& th, Aggregation a) {
  double v = 0.0;
  for (std::size_t x = 0; x < th.size(); ++x) {
    if (a == Aggregation::Mean)
      v += cond.weight(x) * th[x];
    else if (cond.traces[x] > 0.0)
      v = std::max(v, th[x]);
  }
  return v;
}

}  // namespace

double big_theta(const ConditionalProcessSet& cond, Aggregation aggregation) {
  return aggregate(cond, thetas(cond), aggregation);
}

LegLabel pointer_leg() { return LegLabel{std::numeric_limits<int>::min(), Role::Aux}; }

namespace {

constexpr Index kMaxPointerDim = 4096;

DensityOperator block_pointer(const std::vector<Matrix>& blocks, const LegLayout& layout) {
  const Index n = static_cast<Index>(blocks.size());
  const Index d = layout.dim();
  if (n * d > kMaxPointerDim)
    throw std::length_error("pointer state would exceed the dimension limit");
  Matrix m = Matrix::Zero(n * d, n * d);
  double tr = 0.0;
  for (Index x = 0; x < n; ++x) {
    m.block(x * d, x * d, d, d) = blocks[static_cast<std::size_t>(x)];
    tr += blocks[static_cast<std::size_t>(x)].trace().real();
  }
  std::vector<Leg> legs{Leg{pointer_leg().t, Role::Aux, n}};
  legs.insert(legs.end(), layout.legs().begin(), layout.legs().end());
  return {m / tr, LegLayout(std::move(legs))};
}

}  // namespace

DensityOperator pointer_state(const ConditionalProcessSet& cond) {
  return block_pointer(cond.operators, cond.layout);
}

namespace {

Index output_dim_of(const LegLayout& layout) { return layout.role_dim(Role::Out); }

// Product term Upsilon_F (x) Y_H rearranged into the conditional layout.
Matrix product_term(const RecoveredProcess& rec, const LegLayout& fh, std::size_t x) {
  const Matrix z = kron(rec.future_states[x], rec.history_states[x]);
  const LegLayout joined = rec.future_layout.concat(rec.history_layout);
  if (joined == fh) return z;
  return permute_legs(z, joined, fh.labels()).matrix;
}

}  // namespace

RecoveredProcess recover(const ProcessTensor& pt, const ConditionalProcessSet& cond,
                         const Instrument& inst, const DualFrame& duals) {
  if (duals.factors.size() != inst.factors().size() || duals.outcome_count() != cond.size())
    throw std::invalid_argument("recover: dual frame does not match the instrument");
  RecoveredProcess rec;
  rec.future_layout = cond.layout.without(cond.history);
  rec.history_layout = cond.layout.without(cond.future);
  const double dof = static_cast<double>(output_dim_of(rec.future_layout));
  const double tot = cond.total_trace();

  rec.future_states.resize(cond.size());
  rec.history_states.resize(cond.size());
  parallel_for(cond.size(), [&](std::size_t x) {
    const Matrix& y = cond.operators[x];
    rec.history_states[x] = partial_trace(y, cond.layout, cond.future).matrix / dof;
    Matrix f = partial_trace(y, cond.layout, cond.history).matrix;
    const double tr = cond.traces[x];
    if (tr > 1e-14 * std::max(tot, 1e-300))
      rec.future_states[x] = f * (dof / tr);
    else
      rec.future_states[x] = Matrix::Zero(f.rows(), f.cols());
  });

  // sum_x D^(x) (x) Z^(x), folded one instrument factor at a time from the
  // least significant digit upwards.
  std::vector<Matrix> current(cond.size());
  parallel_for(cond.size(), [&](std::size_t x) { current[x] = product_term(rec, cond.layout, x); });
  for (std::size_t k = duals.factors.size(); k-- > 0;) {
    const auto& f = duals.factors[k];
    const std::size_t n = f.size();
    std::vector<Matrix> next(current.size() / n);
    parallel_for(next.size(), [&](std::size_t p) {
      Matrix acc = kron(f.elements[0], current[p * n]);
      for (std::size_t e = 1; e < n; ++e) acc += kron(f.elements[e], current[p * n + e]);
      next[p] = std::move(acc);
    });
    current = std::move(next);
  }
  const LegLayout joined = inst.layout().concat(cond.layout);
  Matrix lam = permute_legs(current.front(), joined, pt.layout.labels()).matrix;
  rec.symmetrization_residual = hermiticity_residual(lam);
  rec.restricted = ProcessTensor{hermitian_part(lam), pt.layout};
  return rec;
}

DensityOperator recovered_pointer_state(const ConditionalProcessSet& cond,
                                        const RecoveredProcess& rec) {
  std::vector<Matrix> blocks(cond.size());
  for (std::size_t x = 0; x < cond.size(); ++x) blocks[x] = product_term(rec, cond.layout, x);
  return block_pointer(blocks, cond.layout);
}

Complex expectation(const Matrix& process, const Matrix& c) {
  if (process.rows() != c.rows() || process.cols() != c.cols())
    throw std::invalid_argument("expectation: dimension mismatch");
  return process.cwiseProduct(c).sum();
}

Complex expectation(const ProcessTensor& pt, const Matrix& c, const LegLayout& c_layout) {
  if (c_layout == pt.layout) return expectation(pt.choi, c);
  if (c_layout.size() != pt.layout.size())
    throw std::invalid_argument("expectation: observable must act on every process leg");
  return expectation(pt.choi, permute_legs(c, c_layout, pt.layout.labels()).matrix);
}

Complex expectation(const ProcessTensor& pt, const MultiTimeObservable& c) {
  return expectation(pt, c.matrix(), c.instrument.layout());
}

std::vector<double> outcome_probabilities(const ProcessTensor& pt, const Instrument& inst) {
  BlockPartition all;
  all.memory = inst.layout().labels();
  all.ell = 0;
  if (all.memory.size() != pt.layout.size())
    throw std::invalid_argument("instrument must cover every process leg");
  const ConditionalProcessSet c = condition(pt, all, inst);
  std::vector<double> p(c.size());
  for (std::size_t x = 0; x < c.size(); ++x) p[x] = c.operators[x](0, 0).real();
  return p;
}

double instrument_relative_entropy(const ProcessTensor& pt, const ProcessTensor& gamma,
                                   const std::vector<Instrument>& family) {
  double best = 0.0;
  for (const auto& inst : family) {
    const double s =
        classical_relative_entropy(outcome_probabilities(pt, inst), outcome_probabilities(gamma, inst));
    best = std::max(best, s);
  }
  return best;
}

MemoryAnalysis analyze_memory(const ProcessTensor& pt, const BlockPartition& part,
                              const Instrument& inst, bool with_recovery) {
  MemoryAnalysis a;
  a.partition = part;
  a.instrument = inst;
  a.conditionals = condition(pt, part, inst);
  a.theta_values = thetas(a.conditionals);
  a.theta_mean_bits = aggregate(a.conditionals, a.theta_values, Aggregation::Mean);
  a.theta_max_bits = aggregate(a.conditionals, a.theta_values, Aggregation::Max);
  if (with_recovery) {
    try {
      a.duals = dual_frame(inst);
    } catch (const std::domain_error&) {
      a.duals.reset();
    }
    if (a.duals) a.recovered = recover(pt, a.conditionals, inst, *a.duals);
  }
  return a;
}

Thm1Result verify_thm1(const ProcessTensor& pt, const MemoryAnalysis& analysis,
                       const MultiTimeObservable& c, Aggregation aggregation) {
  if (!analysis.recovered || !analysis.duals)
    throw std::invalid_argument("verify_thm1: instrument has no dual frame, restricted process unavailable");
  Thm1Result r;
  const LegLayout& cl = c.instrument.layout();
  if (cl.size() != pt.layout.size())
    throw std::invalid_argument("verify_thm1: observable must act on every process leg");
  Matrix cm = c.matrix();
  if (!(cl == pt.layout)) cm = permute_legs(cm, cl, pt.layout.labels()).matrix;

  const Matrix proj = project_onto_span(cm, pt.layout, analysis.instrument, *analysis.duals);
  r.span_residual = (cm - proj).cwiseAbs().maxCoeff();
  if (r.span_residual > 1e-8 * std::max(1.0, cm.cwiseAbs().maxCoeff()))
    throw std::domain_error("verify_thm1: observable is not in the span of the memory instrument");

  r.expect_true = expectation(pt.choi, cm);
  r.expect_restricted = expectation(analysis.recovered->restricted.choi, cm);
  r.lhs = std::abs(r.expect_true - r.expect_restricted);
  r.theta_bits = analysis.big_theta(aggregation);
  const double th = std::max(bits_to_nats(r.theta_bits), 0.0);
  r.d_fh = analysis.d_fh();
  r.c_norm = c.norm();
  r.rhs = r.c_norm * std::sqrt(2.0 * static_cast<double>(r.d_fh) * th);
  r.rhs_plotted = std::pow(2.0, 4 - analysis.partition.ell) * std::sqrt(2.0 * th);

  // Unbiased variant: the deterministic sum of J, traced over M, must be
  // proportional to the identity on the future/history legs.
  Matrix oj = c.instrument.deterministic_sum();
  if (!(cl == pt.layout)) oj = permute_legs(oj, cl, pt.layout.labels()).matrix;
  const Matrix fh = partial_trace(oj, pt.layout, analysis.partition.memory).matrix;
  const double scale = fh.trace().real() / static_cast<double>(fh.rows());
  const bool unbiased =
      (fh - scale * Matrix::Identity(fh.rows(), fh.cols())).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, scale);
  r.rhs_unbiased = unbiased ? r.c_norm * std::sqrt(2.0 * th) : std::numeric_limits<double>::quiet_NaN();

  r.margin = r.rhs - r.lhs;
  r.margin_plotted = r.rhs_plotted - r.lhs;
  return r;
}

Thm1Result verify_thm1(const ProcessTensor& pt, const BlockPartition& part, const Instrument& inst,
                       const MultiTimeObservable& c, Aggregation aggregation) {
  return verify_thm1(pt, analyze_memory(pt, part, inst), c, aggregation);
}

namespace {

// Operator that lets the system evolve freely on every future/history
// timestep except the input leg of timestep t, which stays open.
LegOperator idle_operator(const LegLayout& fh, int t) {
  std::vector<Leg> legs;
  std::vector<Matrix> parts;
  const auto& all = fh.legs();
  for (std::size_t k = 0; k < all.size(); ++k) {
    const Leg& leg = all[k];
    const Index d = leg.dim;
    const bool paired = leg.role == Role::In && k + 1 < all.size() && all[k + 1].t == leg.t &&
                        all[k + 1].role == Role::Out;
    if (leg.t < t) {
      if (paired) {
        legs.push_back(leg);
        legs.push_back(all[k + 1]);
        parts.push_back(psi_plus(d));
        ++k;
      } else if (leg.role == Role::Out) {
        Matrix p = Matrix::Zero(d, d);
        p(0, 0) = 1.0;
        legs.push_back(leg);
        parts.push_back(p);
      } else {
        throw std::invalid_argument("idle history needs an output leg after input " + to_string(leg.label()));
      }
    } else if (leg.t == t && leg.role == Role::In) {
      continue;  // left open
    } else if (leg.role == Role::In) {
      legs.push_back(leg);
      parts.push_back(Matrix::Identity(d, d));
    } else {
      legs.push_back(leg);
      parts.push_back(Matrix::Identity(d, d) / static_cast<double>(d));
    }
  }
  return {kron_all(parts), LegLayout(std::move(legs))};
}

}  // namespace

Cor2Result verify_cor2(const ProcessTensor& pt, const MemoryAnalysis& analysis, int t,
                       Aggregation aggregation, std::optional<std::size_t> outcome) {
  if (!analysis.recovered) throw std::invalid_argument("verify_cor2: restricted process unavailable");
  if (!(analysis.recovered->restricted.layout == pt.layout))
    throw std::invalid_argument("verify_cor2: analysis was built for a different process");
  const LegLabel target{t, Role::In};
  if (!has_label(analysis.partition.future, target))
    throw std::invalid_argument("verify_cor2: timestep " + std::to_string(t) + " is not in the future block");

  const ConditionalProcessSet& ct = analysis.conditionals;
  const ConditionalProcessSet cr =
      condition(analysis.recovered->restricted, analysis.partition, analysis.instrument);
  const LegOperator idle = idle_operator(ct.layout, t);

  std::vector<std::size_t> which;
  if (outcome) {
    which.push_back(*outcome);
  } else {
    which.resize(ct.size());
    std::iota(which.begin(), which.end(), 0);
  }

  Cor2Result r;
  r.t = t;
  r.distances.assign(which.size(), 0.0);
  r.normalized_distances.assign(which.size(), 0.0);
  const double tot = ct.total_trace();
  parallel_for(which.size(), [&](std::size_t k) {
    const std::size_t x = which[k];
    const Matrix a = contract(ct.operators.at(x), ct.layout, idle.matrix, idle.layout).matrix;
    const Matrix b = contract(cr.operators.at(x), cr.layout, idle.matrix, idle.layout).matrix;
    r.distances[k] = trace_norm(hermitian_part(a - b));
    const double ta = a.trace().real();
    const double tb = b.trace().real();
    if (ta > 1e-12 * tot && tb > 1e-12 * tot)
      r.normalized_distances[k] = trace_norm(hermitian_part(a / ta - b / tb));
  });
  for (std::size_t k = 0; k < which.size(); ++k) {
    r.max_distance = std::max(r.max_distance, r.distances[k]);
    r.max_normalized_distance = std::max(r.max_normalized_distance, r.normalized_distances[k]);
  }
  const double th = std::max(bits_to_nats(analysis.big_theta(aggregation)), 0.0);
  r.rhs = std::sqrt(2.0 * static_cast<double>(analysis.d_fh()) * th);
  return r;
}

SampledComb sample_comb(const LegLayout& layout, std::mt19937_64& rng) {
  struct Step {
    Index din = 1;
    Index dout = 1;
  };
  std::vector<Step> steps;
  int last_t = std::numeric_limits<int>::min();
  for (const auto& leg : layout.legs()) {
    if (leg.role == Role::Aux) throw std::invalid_argument("sample_comb: auxiliary legs not allowed");
    if (steps.empty() || leg.t != last_t) {
      if (!steps.empty() && leg.t < last_t) throw std::invalid_argument("sample_comb: legs not in time order");
      steps.push_back({});
      last_t = leg.t;
    }
    if (leg.role == Role::In) {
      if (steps.back().dout != 1) throw std::invalid_argument("sample_comb: input after output in a timestep");
      steps.back().din = leg.dim;
    } else {
      steps.back().dout = leg.dim;
    }
  }

  // At most one causal break, placed on a step with both legs.
  std::vector<std::size_t> candidates;
  for (std::size_t s = 0; s + 1 < steps.size(); ++s)
    if (steps[s].din > 1 && steps[s].dout > 1) candidates.push_back(s);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size());
  const std::size_t chosen = pick(rng);
  const std::size_t break_step = chosen < candidates.size() ? candidates[chosen] : steps.size();

  const Index da_qubit = 2;
  Index da = 1;
  std::vector<Matrix> branches{Matrix::Ones(1, 1)};
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const bool last = s + 1 == steps.size();
    const Index di = steps[s].din;
    const Index dout = steps[s].dout;
    const Index da_next = last ? 1 : da_qubit;
    const Index in_dim = di * da;
    const Index out_dim = dout * da_next;

    std::vector<Matrix> kraus;
    if (!last) {
      if (out_dim < in_dim) throw std::invalid_argument("sample_comb: step cannot be an isometry");
      const Matrix v = haar_unitary(out_dim, rng).leftCols(in_dim);
      if (s == break_step) {
        // Projective measurement of the system followed by a fresh pure state.
        const Matrix basis = haar_unitary(dout, rng);
        for (Index m = 0; m < dout; ++m) {
          const Vector fresh = haar_state(dout, rng);
          const Matrix k_sys = fresh * basis.col(m).adjoint();
          kraus.push_back(kron(k_sys, Matrix::Identity(da_next, da_next)) * v);
        }
      } else {
        kraus.push_back(v);
      }
    } else {
      const Matrix basis = haar_unitary(in_dim, rng);
      const Vector fresh = haar_state(dout, rng);
      for (Index y = 0; y < in_dim; ++y) kraus.push_back(fresh * basis.col(y).adjoint());
    }

    std::vector<Matrix> next;
    next.reserve(branches.size() * kraus.size());
    for (const auto& w : branches) {
      const Index dl = w.rows();
      for (const auto& k : kraus) {
        Matrix nw = Matrix::Zero(dl * di * dout, da_next);
        for (Index l = 0; l < dl; ++l)
          for (Index i = 0; i < di; ++i)
            for (Index o = 0; o < dout; ++o)
              for (Index a2 = 0; a2 < da_next; ++a2) {
                Complex acc = 0.0;
                for (Index a = 0; a < da; ++a) acc += w(l, a) * k(o * da_next + a2, i * da + a);
                nw((l * di + i) * dout + o, a2) = acc;
              }
        next.push_back(std::move(nw));
      }
    }
    branches = std::move(next);
    da = da_next;
  }

  SampledComb comb;
  for (auto& w : branches) comb.branches.push_back(w.col(0));
  return comb;
}

std::vector<double> comb_probabilities(const Matrix& process, const SampledComb& comb) {
  const Index n = static_cast<Index>(comb.branches.size());
  Matrix w(process.rows(), n);
  for (Index b = 0; b < n; ++b) w.col(b) = comb.branches[static_cast<std::size_t>(b)];
  const Matrix y = process * w.conjugate();
  std::vector<double> p(static_cast<std::size_t>(n));
  for (Index b = 0; b < n; ++b) p[static_cast<std::size_t>(b)] = w.col(b).cwiseProduct(y.col(b)).sum().real();
  return p;
}

DiamondResult estimate_diamond_gap(const ProcessTensor& pt, const MemoryAnalysis& analysis,
                                   std::size_t n_samples, std::uint64_t seed,
                                   Aggregation aggregation) {
  if (!analysis.recovered) throw std::invalid_argument("estimate_diamond_gap: restricted process unavailable");
  for (const auto& f : analysis.instrument.factors()) {
    const Index full = f.layout.dim() * f.layout.dim();
    Eigen::FullPivLU<Matrix> lu(gram_matrix(f.elements));
    lu.setThreshold(1e-10);
    if (lu.rank() != full)
      throw std::invalid_argument("estimate_diamond_gap: memory instrument is not informationally complete");
  }
  const ProcessTensor a = canonical_order(pt);
  const ProcessTensor b = canonical_order(analysis.recovered->restricted);

  DiamondResult r;
  std::mt19937_64 rng(seed);
  double best = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const SampledComb comb = sample_comb(a.layout, rng);
    const auto p = comb_probabilities(a.choi, comb);
    const auto q = comb_probabilities(b.choi, comb);
    double l1 = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) l1 += std::abs(p[k] - q[k]);
    best = std::max(best, l1);
    r.running_max.push_back(best);
  }
  r.lower_bound = best;
  const double th = std::max(bits_to_nats(analysis.big_theta(aggregation)), 0.0);
  r.rhs = std::sqrt(2.0 * static_cast<double>(analysis.d_fh()) * th);
  return r;
}

}  // namespace proctensor
