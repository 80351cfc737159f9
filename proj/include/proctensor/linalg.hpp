#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace proctensor {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Role of a leg as seen by the experimenter. `Out` legs carry a system the
// experimenter sends into the process, `In` legs carry what the process hands
// back. `Aux` marks bookkeeping legs (ancillas, pointer registers).
enum class Role { In, Out, Aux };

struct LegLabel {
  int t = 0;
  Role role = Role::In;

  friend bool operator==(const LegLabel&, const LegLabel&) = default;
};

struct Leg {
  int t = 0;
  Role role = Role::In;
  Index dim = 2;

  LegLabel label() const { return {t, role}; }
};

std::string to_string(Role role);
std::string to_string(const LegLabel& label);

// Ordered list of tensor legs. The leftmost leg is the slowest-varying index
// of the flattened operator.
class LegLayout {
 public:
  LegLayout() = default;
  explicit LegLayout(std::vector<Leg> legs);
  LegLayout(std::initializer_list<Leg> legs);

  const std::vector<Leg>& legs() const { return legs_; }
  std::size_t size() const { return legs_.size(); }
  bool empty() const { return legs_.empty(); }
  const Leg& operator[](std::size_t k) const { return legs_[k]; }

  Index dim() const;
  Index dim_of(const std::vector<LegLabel>& labels) const;
  Index role_dim(Role role) const;

  bool contains(const LegLabel& label) const;
  std::size_t position(const LegLabel& label) const;  // throws on unknown label
  std::vector<LegLabel> labels() const;

  LegLayout subset(const std::vector<LegLabel>& labels) const;  // in the given order
  LegLayout without(const std::vector<LegLabel>& labels) const; // keeps layout order
  LegLayout concat(const LegLayout& other) const;

  friend bool operator==(const LegLayout& a, const LegLayout& b);

 private:
  std::vector<Leg> legs_;
};

// A matrix together with the legs it acts on.
struct LegOperator {
  Matrix matrix;
  LegLayout layout;
};

// Flat offsets of every multi-index over `positions` (row-major in the given
// order) inside the flattened index space of `layout`.
std::vector<Index> subsystem_offsets(const LegLayout& layout,
                                     const std::vector<std::size_t>& positions);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_all(const std::vector<Matrix>& factors);

LegOperator partial_trace(const Matrix& m, const LegLayout& layout,
                          const std::vector<LegLabel>& traced);

LegOperator permute_legs(const Matrix& m, const LegLayout& layout,
                         const std::vector<LegLabel>& new_order);

// tr_X[(op^T (x) 1) m] where X are the legs of `op_layout`; the result lives on
// the remaining legs of `layout` in their original order.
LegOperator contract(const Matrix& m, const LegLayout& layout, const Matrix& op,
                     const LegLayout& op_layout);

// Re-express `op` (on a subset of `layout`'s legs, any order) as an operator
// on all of `layout`, padding missing legs with identities.
Matrix embed(const Matrix& op, const LegLayout& op_layout, const LegLayout& layout);

double hermiticity_residual(const Matrix& m);  // max|m - m^dagger|
bool is_hermitian(const Matrix& m, double rel_tol = 1e-10);
Matrix hermitian_part(const Matrix& m);

struct EigenDecomposition {
  RealVector values;  // descending
  Matrix vectors;     // columns match `values`
};

EigenDecomposition eig_hermitian(const Matrix& m);
RealVector eigvals_hermitian(const Matrix& m);  // descending, no vectors

Matrix expm(const Matrix& m);

double trace_norm(const Matrix& m);

Complex trace(const Matrix& m);

}  // namespace proctensor
