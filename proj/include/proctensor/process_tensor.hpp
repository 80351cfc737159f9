#pragma once

#include <string>
#include <vector>

#include "proctensor/linalg.hpp"

namespace proctensor {

// Supernormalized Choi state of a multi-time process. Legs are kept in time
// order: for each timestep the input leg (what the process emits) precedes
// the output leg (what the experimenter feeds back in).
struct ProcessTensor {
  Matrix choi;
  LegLayout layout;

  double trace() const { return choi.trace().real(); }
  Index output_dim() const { return layout.role_dim(Role::Out); }
  Index input_dim() const { return layout.role_dim(Role::In); }
  std::vector<int> timesteps() const;
};

// System-environment dilation. Propagators are superoperators on S (x) E in
// row-major vectorization, one per interval between consecutive timesteps.
struct DilatedDynamics {
  Index sys_dim = 2;
  Index env_dim = 1;
  Matrix initial_state;
  std::vector<Matrix> propagators;
  // When false the first timestep only has an output leg: the initial system
  // state is discarded and replaced by whatever the experimenter prepares.
  bool first_step_has_input = false;
  int first_timestep = 1;
};

ProcessTensor build_process_tensor(const DilatedDynamics& dyn, int n_steps,
                                   bool include_final_output);

struct CausalityReport {
  std::vector<LegLabel> levels;        // leg whose removal was checked
  std::vector<double> level_residuals; // trace-norm residual per level
  double residual_tolerance = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double trace = 0.0;
  double expected_trace = 0.0;
  bool psd_checked = false;

  bool psd() const;
  bool causal() const;
  bool normalized() const;
  bool passed() const { return psd() && causal() && normalized(); }
  double max_residual() const;
};

// Backward trace hierarchy: removing a trailing input leg must leave
// 1 (x) (previous level) on the trailing output leg.
CausalityReport validate_causality(const ProcessTensor& pt, bool check_psd = true);

// Same hierarchy with the roles swapped, used for deterministic instruments.
// Residuals are returned per level; the final scalar must equal one.
std::vector<double> hierarchy_residuals(const Matrix& m, const LegLayout& layout,
                                        Role traced_role, double* final_scalar = nullptr);

// Groups of legs forming the single-interval marginals: a leading lone leg,
// then (o_j, i_{j+1}) pairs, then a trailing lone output.
std::vector<std::vector<LegLabel>> markov_groups(const LegLayout& layout);

ProcessTensor markov_product(const ProcessTensor& pt);

// Relative entropy (bits) between the normalized process and its Markov product.
double non_markovianity(const ProcessTensor& pt);

// Reorders legs into canonical time order (input before output per timestep).
ProcessTensor canonical_order(const ProcessTensor& pt);

}  // namespace proctensor
