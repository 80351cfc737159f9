#include <doctest.h>

#include <random>

#include "proctensor/instruments.hpp"
#include "proctensor/quantum_info.hpp"
#include "test_util.hpp"

using namespace proctensor;
using testutil::max_abs_diff;

TEST_CASE("tetrahedral POVM") {
  const auto povm = tetrahedral_povm();
  Matrix sum = Matrix::Zero(2, 2);
  for (const auto& e : povm) {
    sum += e;
    CHECK(e.trace().real() == doctest::Approx(0.5));
    CHECK(eigvals_hermitian(e).minCoeff() > -1e-15);
  }
  CHECK(max_abs_diff(sum, Matrix::Identity(2, 2)) < 1e-15);
  // symmetric: pairwise overlaps tr[E_a E_b] = 1/12 for a != b
  CHECK((povm[0] * povm[1]).trace().real() == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("built-in instruments are valid") {
  for (const auto& inst : {identity_instrument(2), noisy_instrument(2), causal_break_instrument(2),
                           trash_and_prepare(Matrix::Identity(2, 2) / 2.0)}) {
    CAPTURE(inst.name());
    const auto rep = validate_instrument(inst);
    CHECK(rep.passed());
    CHECK(rep.trace == doctest::Approx(rep.expected_trace));
  }
  CHECK(causal_break_instrument(1).outcome_count() == 16);
  CHECK(causal_break_instrument(3).outcome_count() == 4096);
}

TEST_CASE("invalid instruments are reported") {
  const LegLayout l{Leg{1, Role::In, 2}, Leg{1, Role::Out, 2}};
  Matrix bad = psi_plus(2);
  bad(0, 0) = -1.0;
  CHECK_FALSE(validate_instrument(Instrument::single("bad", l, {bad})).psd());
  // a map that is not trace preserving
  CHECK_FALSE(validate_instrument(Instrument::single("lossy", l, {0.5 * psi_plus(2)})).passed());
  CHECK_THROWS(unitary_instrument(2.0 * Matrix::Identity(2, 2), 1));
}

TEST_CASE("mixed-radix outcome indexing") {
  const Instrument a = causal_break_instrument(2, 1);
  const Instrument b = tensor(a, measurement(tetrahedral_povm(), 3));
  CHECK(b.outcome_count() == 1024);
  const auto d = b.digits(37);
  CHECK(d == std::vector<std::size_t>{0, 9, 1});
  CHECK(b.outcome_index(d) == 37);
  CHECK(b.label(37) == "m0p0,m2p1,e1");
  CHECK(max_abs_diff(b.element(37), kron_all({a.factors()[0].elements[0], a.factors()[1].elements[9],
                                              tetrahedral_povm()[1].transpose()})) == 0.0);
  CHECK_THROWS(b.digits(1024));
}

TEST_CASE("dual frames are biorthogonal") {
  const Instrument cb = causal_break_instrument(2);
  const DualFrame d = dual_frame(cb);
  CHECK(biorthogonality_residual(cb, d) < 1e-10);
  for (std::size_t x : {0u, 17u, 255u})
    for (std::size_t y : {0u, 17u, 200u}) {
      const Complex ip = d.dual(x).cwiseProduct(cb.element(y)).sum();
      CHECK(std::abs(ip - (x == y ? 1.0 : 0.0)) < 1e-10);
    }
  CHECK(biorthogonality_residual(identity_instrument(1), dual_frame(identity_instrument(1))) < 1e-12);
}

TEST_CASE("dual frame rejects dependent elements") {
  const LegLayout l{Leg{1, Role::In, 2}, Leg{1, Role::Out, 2}};
  const Matrix e = psi_plus(2) / 2.0;
  CHECK_THROWS_AS(dual_frame(Instrument::single("dup", l, {e, e})), std::domain_error);
}

TEST_CASE("projection onto the span of an instrument") {
  std::mt19937_64 rng(41);
  const LegLayout l{Leg{0, Role::Out, 2}, Leg{1, Role::In, 2}, Leg{1, Role::Out, 2}};
  const Instrument id = identity_instrument(1, 2, 1);
  const DualFrame d = dual_frame(id);
  const Matrix rho = random_density(2, rng);
  // rho (x) Psi+ lies in the span on the instrument legs and is left alone
  const Matrix in_span = kron(rho, psi_plus(2));
  CHECK(max_abs_diff(project_onto_span(in_span, l, id, d), in_span) < 1e-12);
  // rho (x) 1 does not
  const Matrix outside = kron(rho, Matrix::Identity(4, 4));
  CHECK(max_abs_diff(project_onto_span(outside, l, id, d), outside) > 0.1);
  // informationally complete instruments span everything
  const Instrument cb = causal_break_instrument(1, 1);
  const Matrix any = testutil::random_matrix(8, 8, rng);
  CHECK(max_abs_diff(project_onto_span(any, l, cb, dual_frame(cb)), any) < 1e-10);
}

TEST_CASE("unbiasedness") {
  CHECK(is_unbiased(noisy_instrument(2)));
  CHECK(unbiased_report(noisy_instrument(1)).scale == doctest::Approx(0.5));
  CHECK_FALSE(is_unbiased(identity_instrument(1)));
  CHECK_FALSE(is_unbiased(causal_break_instrument(1)));
}

TEST_CASE("random helpers") {
  std::mt19937_64 rng(42);
  const Matrix u = haar_unitary(4, rng);
  CHECK(max_abs_diff(u.adjoint() * u, Matrix::Identity(4, 4)) < 1e-13);
  CHECK(haar_state(3, rng).norm() == doctest::Approx(1.0));
  const Matrix rho = random_density(3, rng, 1);
  CHECK(rho.trace().real() == doctest::Approx(1.0));
  CHECK(eigvals_hermitian(rho)(1) < 1e-12);
  const auto k = random_kraus(2, 3, 2, rng);
  Matrix s = Matrix::Zero(2, 2);
  for (const auto& m : k) s += m.adjoint() * m;
  CHECK(max_abs_diff(s, Matrix::Identity(2, 2)) < 1e-13);
}
