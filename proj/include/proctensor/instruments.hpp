#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "proctensor/linalg.hpp"

namespace proctensor {

// One tensor factor of an instrument: a set of outcome elements on a fixed
// group of legs.
struct InstrumentFactor {
  LegLayout layout;
  std::vector<Matrix> elements;
  std::vector<std::string> labels;

  std::size_t size() const { return elements.size(); }
  Matrix sum() const;
};

// Instrument built as a tensor product of factors. Outcome indices are
// mixed-radix with the first factor most significant, and elements are
// materialized on demand. Element legs are ordered input-first per timestep;
// transposes required by the Born rule are applied by consumers.
class Instrument {
 public:
  Instrument() = default;
  Instrument(std::string name, std::vector<InstrumentFactor> factors);

  static Instrument single(std::string name, LegLayout layout, std::vector<Matrix> elements,
                           std::vector<std::string> labels = {});

  const std::string& name() const { return name_; }
  const LegLayout& layout() const { return layout_; }
  const std::vector<InstrumentFactor>& factors() const { return factors_; }

  std::size_t outcome_count() const;
  std::vector<std::size_t> digits(std::size_t outcome) const;
  std::size_t outcome_index(const std::vector<std::size_t>& digits) const;
  Matrix element(std::size_t outcome) const;
  std::string label(std::size_t outcome) const;
  Matrix deterministic_sum() const;

 private:
  std::string name_;
  std::vector<InstrumentFactor> factors_;
  LegLayout layout_;
};

Instrument tensor(const Instrument& a, const Instrument& b, std::string name = {});

// Duals share the factor structure of the instrument they were built from.
struct DualFrame {
  std::vector<InstrumentFactor> factors;

  Matrix dual(std::size_t outcome) const;
  std::size_t outcome_count() const;
};

// Timestep labels run from `first_timestep`; each step contributes an
// (input, output) leg pair of dimension d.
Instrument identity_instrument(int ell, Index d = 2, int first_timestep = 1);
Instrument noisy_instrument(int ell, Index d = 2, int first_timestep = 1);
std::vector<Matrix> tetrahedral_povm();
std::vector<Matrix> causal_break_states();
Instrument causal_break_instrument(int ell, int first_timestep = 1);
Instrument unitary_instrument(const Matrix& u, int ell, int first_timestep = 1);
Instrument trash_and_prepare(const Matrix& sigma, int timestep = 1);
// Single-leg pieces: a state prepared into an output leg, and a POVM applied
// to an input leg (stored as transposed effects).
Instrument preparation(const Matrix& rho, int timestep);
Instrument measurement(const std::vector<Matrix>& povm, int timestep);

Matrix gram_matrix(const std::vector<Matrix>& elements);  // G_{x'x} = tr[O'^T O]
DualFrame dual_frame(const Instrument& inst);
double biorthogonality_residual(const Instrument& inst, const DualFrame& duals);

// A = sum_x tr[D^(x)T A] O^(x), applied factor by factor on the instrument's
// legs of an operator living on `layout` (which may contain further legs).
Matrix project_onto_span(const Matrix& a, const LegLayout& layout, const Instrument& inst,
                         const DualFrame& duals);

struct UnbiasedReport {
  bool unbiased = false;
  double scale = 0.0;     // c in O^J = c * 1
  double residual = 0.0;  // max|O^J - c 1|
};
UnbiasedReport unbiased_report(const Instrument& inst);
bool is_unbiased(const Instrument& inst);

struct InstrumentReport {
  double min_element_eigenvalue = 0.0;
  std::vector<double> hierarchy;  // complementary trace-hierarchy residuals
  double final_scalar = 0.0;
  double trace = 0.0;
  double expected_trace = 0.0;  // D^i

  bool psd() const { return min_element_eigenvalue >= -1e-10; }
  bool causal() const;
  bool normalized() const;
  bool passed() const { return psd() && causal() && normalized(); }
};
InstrumentReport validate_instrument(const Instrument& inst);

// Random objects used by property tests and the sampled estimators.
Matrix haar_unitary(Index d, std::mt19937_64& rng);
Vector haar_state(Index d, std::mt19937_64& rng);
Matrix random_density(Index d, std::mt19937_64& rng, Index rank = 0);
std::vector<Matrix> random_kraus(Index d_in, Index d_out, std::size_t outcomes,
                                 std::mt19937_64& rng);  // isometry split into blocks

}  // namespace proctensor
