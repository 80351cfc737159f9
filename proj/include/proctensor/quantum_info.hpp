#pragma once

#include <vector>

#include "proctensor/linalg.hpp"

namespace proctensor {

// Eigenvalues above this (relative to the largest) count as support.
inline constexpr double kSupportThreshold = 1e-12;
// Eigenvalues of a nominally positive operator below -kNegativeTolerance are
// treated as a genuine violation; anything between is clamped to zero.
inline constexpr double kNegativeTolerance = 1e-10;

struct DensityOperator {
  Matrix matrix;
  LegLayout layout;

  double trace() const { return matrix.trace().real(); }
  DensityOperator normalized() const;
  // Throws if not Hermitian/PSD, or (when `require_unit_trace`) not trace one.
  void validate(bool require_unit_trace = true) const;
};

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix ket_projector(const Vector& psi);

Matrix psi_plus(Index d);

double von_neumann_entropy(const Matrix& rho);
double relative_entropy(const Matrix& rho, const Matrix& sigma);
double classical_relative_entropy(const std::vector<double>& p, const std::vector<double>& q);

double mutual_information(const Matrix& rho, const LegLayout& layout,
                          const std::vector<LegLabel>& a, const std::vector<LegLabel>& b);
double conditional_mutual_information(const Matrix& rho, const LegLayout& layout,
                                      const std::vector<LegLabel>& f,
                                      const std::vector<LegLabel>& m,
                                      const std::vector<LegLabel>& h);

// out = tr_in[ choi (rho^T (x) 1_out) ] for a Choi matrix ordered (input, output).
Matrix apply_choi(const Matrix& choi, const Matrix& rho);
DensityOperator apply_choi(const Matrix& choi, const DensityOperator& input);

// Row-major vectorization: vec(A X B) = (A (x) B^T) vec(X).
Matrix vectorize(const Matrix& rho);
Matrix unvectorize(const Matrix& v, Index d);
Matrix unitary_superoperator(const Matrix& u);
Matrix lindblad_generator(const Matrix& hamiltonian, const std::vector<Matrix>& jumps);
Matrix apply_superoperator(const Matrix& superop, const Matrix& rho);
Matrix superoperator_to_choi(const Matrix& superop, Index d_in, Index d_out);
Matrix choi_from_kraus(const std::vector<Matrix>& kraus);

}  // namespace proctensor
