#include "proctensor/process_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "proctensor/quantum_info.hpp"

namespace proctensor {

std::vector<int> ProcessTensor::timesteps() const {
  std::set<int> ts;
  for (const auto& leg : layout.legs()) ts.insert(leg.t);
  return {ts.begin(), ts.end()};
}

namespace {

// Applies `superop` to the trailing subsystem (dimension dse) of an operator
// whose leading part has dimension dl.
Matrix apply_on_trailing(const Matrix& x, Index dl, Index dse, const Matrix& superop) {
  const Index n2 = dse * dse;
  Matrix gathered(n2, dl * dl);
  for (Index l2 = 0; l2 < dl; ++l2)
    for (Index l1 = 0; l1 < dl; ++l1)
      for (Index b = 0; b < dse; ++b)
        for (Index a = 0; a < dse; ++a) gathered(a * dse + b, l1 * dl + l2) = x(l1 * dse + a, l2 * dse + b);
  const Matrix mixed = superop * gathered;
  Matrix out(x.rows(), x.cols());
  for (Index l2 = 0; l2 < dl; ++l2)
    for (Index l1 = 0; l1 < dl; ++l1)
      for (Index b = 0; b < dse; ++b)
        for (Index a = 0; a < dse; ++a) out(l1 * dse + a, l2 * dse + b) = mixed(a * dse + b, l1 * dl + l2);
  return out;
}

const LegLabel kSystem{std::numeric_limits<int>::min(), Role::Aux};
const LegLabel kEnvironment{std::numeric_limits<int>::min() + 1, Role::Aux};

int role_rank(Role r) {
  if (r == Role::Aux) throw std::invalid_argument("process tensors cannot carry auxiliary legs");
  return r == Role::In ? 0 : 1;
}

}  // namespace

ProcessTensor build_process_tensor(const DilatedDynamics& dyn, int n_steps,
                                   bool include_final_output) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
  const Index ds = dyn.sys_dim;
  const Index de = dyn.env_dim;
  if (ds < 1 || de < 1) throw std::invalid_argument("dimensions must be positive");
  if (dyn.initial_state.rows() != ds * de || dyn.initial_state.cols() != ds * de)
    throw std::invalid_argument("initial state does not match sys_dim * env_dim");
  if (static_cast<int>(dyn.propagators.size()) != n_steps - 1)
    throw std::invalid_argument("expected " + std::to_string(n_steps - 1) + " propagators, got " +
                                std::to_string(dyn.propagators.size()));
  for (const auto& p : dyn.propagators) {
    if (p.rows() != ds * ds * de * de || p.cols() != p.rows())
      throw std::invalid_argument("propagator dimension mismatch");
  }
  if (!dyn.first_step_has_input && n_steps == 1 && !include_final_output)
    throw std::invalid_argument("a single output-free step without an input leg is empty");

  std::vector<Leg> legs;
  // x lives on [legs..., S, E]
  Matrix x;
  const Leg env_leg{kEnvironment.t, Role::Aux, de};
  const Leg sys_leg{kSystem.t, Role::Aux, ds};

  auto attach_output = [&](int t) {
    // x on [legs, E] -> [legs, o_t, S, E]
    legs.push_back(Leg{t, Role::Out, ds});
    std::vector<Leg> before(legs.begin(), legs.end() - 1);
    before.push_back(env_leg);
    before.push_back(legs.back());
    before.push_back(sys_leg);
    const Matrix joined = kron(x, psi_plus(ds));
    std::vector<LegLabel> order;
    for (const auto& l : legs) order.push_back(l.label());
    order.push_back(kSystem);
    order.push_back(kEnvironment);
    x = permute_legs(joined, LegLayout(before), order).matrix;
  };

  auto trace_system = [&]() {
    // x on [legs, S, E] -> [legs, E]
    std::vector<Leg> cur = legs;
    cur.push_back(sys_leg);
    cur.push_back(env_leg);
    x = partial_trace(x, LegLayout(cur), {kSystem}).matrix;
  };

  const int t0 = dyn.first_timestep;
  x = dyn.initial_state;
  for (int step = 0; step < n_steps; ++step) {
    const int t = t0 + step;
    const bool has_output = step < n_steps - 1 || include_final_output;
    if (step == 0 && !dyn.first_step_has_input) {
      trace_system();
    } else {
      legs.push_back(Leg{t, Role::In, ds});  // the system wire becomes i_t
    }
    if (has_output) {
      attach_output(t);
    } else {
      // keep the [legs, S, E] shape only while more propagation follows
      std::vector<Leg> cur = legs;
      cur.push_back(env_leg);
      x = partial_trace(x, LegLayout(cur), {kEnvironment}).matrix;
      return {std::move(x), LegLayout(legs)};
    }
    if (step < n_steps - 1) {
      Index dl = 1;
      for (const auto& l : legs) dl *= l.dim;
      x = apply_on_trailing(x, dl, ds * de, dyn.propagators[static_cast<std::size_t>(step)]);
    }
  }
  // Final output leg present: discard the system and the environment.
  std::vector<Leg> cur = legs;
  cur.push_back(sys_leg);
  cur.push_back(env_leg);
  x = partial_trace(x, LegLayout(cur), {kSystem, kEnvironment}).matrix;
  return {std::move(x), LegLayout(legs)};
}

bool CausalityReport::psd() const {
  if (!psd_checked) return true;
  return min_eigenvalue >= -1e-8 * std::max(max_eigenvalue, 0.0);
}

bool CausalityReport::causal() const {
  return std::all_of(level_residuals.begin(), level_residuals.end(),
                     [&](double r) { return r <= residual_tolerance; });
}

bool CausalityReport::normalized() const {
  return std::abs(trace - expected_trace) <= 1e-8 * std::max(expected_trace, 1.0);
}

double CausalityReport::max_residual() const {
  double r = 0.0;
  for (double v : level_residuals) r = std::max(r, v);
  return r;
}

std::vector<double> hierarchy_residuals(const Matrix& m, const LegLayout& layout,
                                        Role traced_role, double* final_scalar) {
  if (m.rows() != layout.dim()) throw std::invalid_argument("hierarchy: layout mismatch");
  Matrix x = m;
  std::vector<Leg> legs = layout.legs();
  std::vector<double> residuals;
  while (!legs.empty()) {
    const Leg last = legs.back();
    LegLayout cur(legs);
    if (last.role == traced_role) {
      x = partial_trace(x, cur, {last.label()}).matrix;
    } else {
      Matrix z = partial_trace(x, cur, {last.label()}).matrix / static_cast<double>(last.dim);
      residuals.push_back(trace_norm(x - kron(z, Matrix::Identity(last.dim, last.dim))));
      x = std::move(z);
    }
    legs.pop_back();
  }
  if (final_scalar) *final_scalar = x(0, 0).real();
  return residuals;
}

CausalityReport validate_causality(const ProcessTensor& pt, bool check_psd) {
  const ProcessTensor canon = canonical_order(pt);
  CausalityReport report;
  report.trace = canon.trace();
  report.expected_trace = static_cast<double>(canon.output_dim());
  report.residual_tolerance = 1e-8 * std::max(std::abs(report.trace), 1.0);

  Matrix x = canon.choi;
  std::vector<Leg> legs = canon.layout.legs();
  while (!legs.empty()) {
    const Leg last = legs.back();
    LegLayout cur(legs);
    if (last.role == Role::In) {
      x = partial_trace(x, cur, {last.label()}).matrix;
    } else {
      Matrix z = partial_trace(x, cur, {last.label()}).matrix / static_cast<double>(last.dim);
      report.levels.push_back(last.label());
      report.level_residuals.push_back(
          trace_norm(x - kron(z, Matrix::Identity(last.dim, last.dim))));
      x = std::move(z);
    }
    legs.pop_back();
  }
  // What remains is the trace divided by the output dimensions; it must be one.
  report.levels.push_back(LegLabel{0, Role::Aux});
  report.level_residuals.push_back(std::abs(x(0, 0) - Complex(1.0)));

  if (check_psd) {
    report.psd_checked = true;
    if (!is_hermitian(canon.choi, 1e-8)) {
      report.min_eigenvalue = -std::numeric_limits<double>::infinity();
      report.max_eigenvalue = 0.0;
    } else {
      const RealVector ev = eigvals_hermitian(hermitian_part(canon.choi));
      report.max_eigenvalue = ev(0);
      report.min_eigenvalue = ev(ev.size() - 1);
    }
  }
  return report;
}

ProcessTensor canonical_order(const ProcessTensor& pt) {
  std::vector<Leg> legs = pt.layout.legs();
  std::stable_sort(legs.begin(), legs.end(), [](const Leg& a, const Leg& b) {
    if (a.t != b.t) return a.t < b.t;
    return role_rank(a.role) < role_rank(b.role);
  });
  for (const auto& l : legs) role_rank(l.role);
  LegLayout sorted(legs);
  if (sorted == pt.layout) return pt;
  return {permute_legs(pt.choi, pt.layout, sorted.labels()).matrix, sorted};
}

std::vector<std::vector<LegLabel>> markov_groups(const LegLayout& layout) {
  std::vector<std::vector<LegLabel>> groups;
  const auto& legs = layout.legs();
  for (std::size_t k = 0; k < legs.size(); ++k) {
    if (legs[k].role == Role::Out && k + 1 < legs.size() && legs[k + 1].role == Role::In) {
      groups.push_back({legs[k].label(), legs[k + 1].label()});
      ++k;
    } else {
      groups.push_back({legs[k].label()});
    }
  }
  return groups;
}

namespace {

Matrix group_marginal(const ProcessTensor& pt, const std::vector<LegLabel>& group) {
  std::vector<LegLabel> others;
  double out_dims = 1.0;
  for (const auto& leg : pt.layout.legs()) {
    if (std::find(group.begin(), group.end(), leg.label()) != group.end()) continue;
    others.push_back(leg.label());
    if (leg.role == Role::Out) out_dims *= static_cast<double>(leg.dim);
  }
  return partial_trace(pt.choi, pt.layout, others).matrix / out_dims;
}

}  // namespace

ProcessTensor markov_product(const ProcessTensor& pt) {
  const ProcessTensor canon = canonical_order(pt);
  Matrix prod = Matrix::Identity(1, 1);
  for (const auto& g : markov_groups(canon.layout)) prod = kron(prod, group_marginal(canon, g));
  return {std::move(prod), canon.layout};
}

double non_markovianity(const ProcessTensor& pt) {
  // With sigma the product of the marginals of rho, S(rho||sigma) reduces to
  // the sum of marginal entropies minus the joint entropy.
  const ProcessTensor canon = canonical_order(pt);
  const double tr = canon.trace();
  if (!(tr > 0.0)) throw std::domain_error("process tensor has non-positive trace");
  const Matrix rho = canon.choi / tr;
  double n = -von_neumann_entropy(rho);
  for (const auto& g : markov_groups(canon.layout)) {
    Matrix marg = group_marginal(canon, g);
    n += von_neumann_entropy(marg / marg.trace().real());
  }
  return std::max(n, 0.0);
}

}  // namespace proctensor
