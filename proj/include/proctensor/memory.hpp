#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "proctensor/instruments.hpp"
#include "proctensor/linalg.hpp"
#include "proctensor/process_tensor.hpp"
#include "proctensor/quantum_info.hpp"

namespace proctensor {

enum class Aggregation { Mean, Max };

struct BlockPartition {
  std::vector<LegLabel> history;
  std::vector<LegLabel> memory;
  std::vector<LegLabel> future;
  int ell = 0;

  // Memory block = every leg with timestep in [first, first + ell); earlier
  // legs form the history and later ones the future.
  static BlockPartition contiguous(const LegLayout& layout, int first_memory_timestep, int ell);
};

struct ConditionalProcessSet {
  LegLayout layout;  // future and history legs, in process order
  std::vector<LegLabel> future;
  std::vector<LegLabel> history;
  std::vector<Matrix> operators;  // unnormalized conditional processes
  std::vector<double> traces;

  std::size_t size() const { return operators.size(); }
  double total_trace() const;
  double weight(std::size_t x) const;
  Matrix sum() const;
};

// C = sum_x c_x O^(x) with coefficients that factorize over the instrument's
// factors: c_x = prod_k coefficients[k][digit_k(x)].
struct MultiTimeObservable {
  Instrument instrument;
  std::vector<std::vector<Complex>> coefficients;

  // Picks out a single outcome of `instrument`.
  static MultiTimeObservable indicator(Instrument instrument, std::size_t outcome);

  Complex coefficient(std::size_t outcome) const;
  double norm() const;  // sqrt(sum_x |c_x|^2)
  Matrix matrix() const;
};

ConditionalProcessSet condition(const ProcessTensor& pt, const BlockPartition& part,
                                const Instrument& inst);

double theta(const ConditionalProcessSet& cond, std::size_t x);
std::vector<double> thetas(const ConditionalProcessSet& cond);
double big_theta(const ConditionalProcessSet& cond, Aggregation aggregation);

LegLabel pointer_leg();
// Classical pointer register first, then the future/history legs.
DensityOperator pointer_state(const ConditionalProcessSet& cond);

struct RecoveredProcess {
  LegLayout future_layout;
  LegLayout history_layout;
  std::vector<Matrix> future_states;   // trace D^o_F each
  std::vector<Matrix> history_states;  // carries the outcome weight
  ProcessTensor restricted;            // Hermitian, not positive in general
  double symmetrization_residual = 0.0;
};

RecoveredProcess recover(const ProcessTensor& pt, const ConditionalProcessSet& cond,
                         const Instrument& inst, const DualFrame& duals);

// Normalized recovered operator on (pointer, future/history legs).
DensityOperator recovered_pointer_state(const ConditionalProcessSet& cond,
                                        const RecoveredProcess& rec);

Complex expectation(const Matrix& process, const Matrix& c);  // tr[c^T process]
Complex expectation(const ProcessTensor& pt, const Matrix& c, const LegLayout& c_layout);
Complex expectation(const ProcessTensor& pt, const MultiTimeObservable& c);

// p_x = tr[O^(x)T pt] for every outcome of `inst` (which must cover all legs).
std::vector<double> outcome_probabilities(const ProcessTensor& pt, const Instrument& inst);

double instrument_relative_entropy(const ProcessTensor& pt, const ProcessTensor& gamma,
                                   const std::vector<Instrument>& family);

struct MemoryAnalysis {
  BlockPartition partition;
  Instrument instrument;
  ConditionalProcessSet conditionals;
  std::vector<double> theta_values;
  double theta_mean_bits = 0.0;
  double theta_max_bits = 0.0;
  std::optional<DualFrame> duals;
  std::optional<RecoveredProcess> recovered;

  double big_theta(Aggregation a) const { return a == Aggregation::Mean ? theta_mean_bits : theta_max_bits; }
  Index d_fh() const { return conditionals.layout.dim(); }
};

// Conditions, evaluates theta and, when the instrument's elements are
// linearly independent, builds duals and the restricted process.
MemoryAnalysis analyze_memory(const ProcessTensor& pt, const BlockPartition& part,
                              const Instrument& inst, bool with_recovery = true);

struct Thm1Result {
  Complex expect_true;
  Complex expect_restricted;
  double lhs = 0.0;
  double rhs = 0.0;          // |C| sqrt(2 D_FH Theta_nats)
  double rhs_plotted = 0.0;  // 2^(4-ell) sqrt(2 Theta_nats)
  double rhs_unbiased = 0.0; // ||c|| sqrt(2 Theta_nats); NaN unless J is unbiased on FH
  double margin = 0.0;
  double margin_plotted = 0.0;
  double theta_bits = 0.0;
  double c_norm = 0.0;
  double span_residual = 0.0;
  Index d_fh = 0;
};

Thm1Result verify_thm1(const ProcessTensor& pt, const MemoryAnalysis& analysis,
                       const MultiTimeObservable& c, Aggregation aggregation);
Thm1Result verify_thm1(const ProcessTensor& pt, const BlockPartition& part, const Instrument& inst,
                       const MultiTimeObservable& c, Aggregation aggregation);

struct Cor2Result {
  int t = 0;
  std::vector<double> distances;             // subnormalized conditional states
  std::vector<double> normalized_distances;  // states renormalized per outcome
  double max_distance = 0.0;
  double max_normalized_distance = 0.0;
  double rhs = 0.0;
};

// State at the input leg of timestep t after outcome x on the memory, with
// the system left alone everywhere else (a fixed |0> preparation feeds a
// history that starts on an output leg).
Cor2Result verify_cor2(const ProcessTensor& pt, const MemoryAnalysis& analysis, int t,
                       Aggregation aggregation,
                       std::optional<std::size_t> outcome = std::nullopt);

// Pure multi-time comb with a qubit ancilla, branched over its outcomes.
struct SampledComb {
  std::vector<Vector> branches;  // Choi vectors on the process layout
};
SampledComb sample_comb(const LegLayout& layout, std::mt19937_64& rng);
std::vector<double> comb_probabilities(const Matrix& process, const SampledComb& comb);

struct DiamondResult {
  double lower_bound = 0.0;
  double rhs = 0.0;
  std::vector<double> running_max;
};

DiamondResult estimate_diamond_gap(const ProcessTensor& pt, const MemoryAnalysis& analysis,
                                   std::size_t n_samples, std::uint64_t seed,
                                   Aggregation aggregation);

// Natural-log Theta used inside the recoverability bounds.
double bits_to_nats(double bits);

}  // namespace proctensor
