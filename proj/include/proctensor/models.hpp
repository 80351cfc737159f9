#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proctensor/instruments.hpp"
#include "proctensor/linalg.hpp"
#include "proctensor/memory.hpp"
#include "proctensor/process_tensor.hpp"
#include "proctensor/quantum_info.hpp"

namespace proctensor {

// ---------------------------------------------------------------------------
// Shallow pocket: a qubit dephased by a Lorentzian pointer, with an ancilla A
// that starts maximally entangled with the system.

struct ShallowPocketParams {
  double g = 0.8;
  double gamma = 0.3;
  double t1 = 5.0;   // intervention time
  double tau = 0.0;  // time elapsed after the intervention

  void validate() const;
  // exp(-g gamma |s|), the dephasing factor accumulated over duration s.
  double decay(double s) const;
};

enum class PocketIntervention { Free, SigmaX, Offset, MeasurePlus, Trash };

struct PocketSpec {
  PocketIntervention kind = PocketIntervention::Free;
  double p = 0.95;  // offset weight on sigma_x
  Matrix sigma;     // state prepared by Trash (defaults to |0><0|)
};

PocketSpec pocket_free();
PocketSpec pocket_sigmax();
PocketSpec pocket_offset(double p = 0.95);
PocketSpec pocket_measure_plus();
PocketSpec pocket_trash(const Matrix& sigma = Matrix());

// Kraus operators of the intervention at t1 (Free is the identity).
std::vector<Matrix> pocket_kraus(const PocketSpec& spec);

// Normalized S (x) A state at time t1 + tau, legs ordered (S, A). With Free
// the state is taken at time t1 + tau as well.
DensityOperator sp_state(const ShallowPocketParams& params, const PocketSpec& spec);

// Two-step process tensor on legs (0,out)=A-side input, (1,in), (1,out),
// (2,in). Dimension 16.
ProcessTensor sp_process_tensor(const ShallowPocketParams& params);

// S (x) A state obtained by contracting the process tensor with the
// intervention, reordered to (S, A) and normalized.
DensityOperator sp_state_from_process(const ProcessTensor& upsilon, const PocketSpec& spec);

struct PocketCurveRow {
  double t = 0.0;
  double free = 0.0;
  double sigmax = 0.0;
  double offset = 0.0;
  double measure = 0.0;
  double trash = 0.0;
};

// Mutual information I(S:A) in bits on t = 0, dt, ..., t_max. Before t1 all
// intervened curves equal the free one; at t1 itself the intervention has
// just been applied.
std::vector<PocketCurveRow> sp_curves(double g, double gamma, double t1, double t_max, double dt,
                                      double p = 0.95, const Matrix& trash_state = Matrix());

// ---------------------------------------------------------------------------
// Case study: system qubit coupled to a cooled environment qubit,
// H = xi sx (x) sx, jump sqrt(kappa) sigma_minus on E.

struct CaseStudyParams {
  double xi = 1.0;
  double kappa = 1.0;
  double dt = 0.3;
  int n_steps = 6;

  void validate() const;
};

double cs_coefficient_ct(double xi, double kappa, double t);
double cs_coefficient_ct_derivative(double xi, double kappa, double t);

struct CpDivisibility {
  bool divisible = true;
  std::optional<double> first_violation;  // first grid time with a negative rate
  std::vector<double> zero_crossings;     // grid times where c_t changes sign
};

// Sign of -c'/(2c) on t = 0, step, ..., t_max.
CpDivisibility cs_cp_divisible(double xi, double kappa, double t_max = 5.0, double step = 1e-3);

double cs_n2(double xi, double kappa);

Matrix cs_lindblad_superoperator(double xi, double kappa);
Matrix cs_initial_state();  // system |0><0| (discarded), environment |0><0|
DilatedDynamics cs_dynamics(const CaseStudyParams& params);
ProcessTensor cs_process_tensor(const CaseStudyParams& params);

struct Regime {
  std::string name;
  double xi;
  double kappa;
};
// CP-divisible, intermediate and strongly non-Markovian points.
std::vector<Regime> cs_regimes();
Regime cs_regime(const std::string& name);

enum class GridMetric { N2, NonMarkovianity };

struct GridPoint {
  double xi = 0.0;
  double kappa = 0.0;
  double value = 0.0;
};

std::vector<double> linspace_step(double lo, double hi, double step);
std::vector<GridPoint> cs_grid_scan(const std::vector<double>& xis, const std::vector<double>& kappas,
                                    GridMetric metric, const CaseStudyParams& base = {});

// Memory block of length ell starting at timestep 2 of the six-step tensor.
BlockPartition cs_partition(const ProcessTensor& pt, int ell);
Instrument cs_memory_instrument(const std::string& name, int ell);

// Preparation of |0> at t=1, identity maps on every intermediate step and
// the first tetrahedral POVM outcome at the last input. The memory block is
// expressed through `memory` (coefficients from its dual frame).
MultiTimeObservable cs_observable(const Instrument& memory, int ell, int n_steps = 6);

// Every bound evaluated for one (regime, memory instrument, ell) choice.
struct BoundRecord {
  std::string regime;
  std::string instrument;
  int ell = 0;
  std::uint64_t seed = 0;
  double theta_bits = 0.0;
  Thm1Result thm1;
  std::vector<Cor2Result> cor2;          // one per future timestep
  std::optional<DiamondResult> diamond;  // informationally complete memory only

  bool thm1_holds(double tol = 1e-8) const { return thm1.margin_plotted >= -tol; }
  bool cor2_holds(double tol = 1e-8) const;
  bool diamond_holds(double tol = 1e-8) const;
  bool passed() const { return thm1_holds() && cor2_holds() && diamond_holds(); }
};

BoundRecord cs_verify_bounds(const ProcessTensor& pt, const std::string& regime,
                             const std::string& instrument, int ell, Aggregation aggregation,
                             std::uint64_t seed, std::size_t samples);

}  // namespace proctensor
