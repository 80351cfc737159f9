#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "proctensor/models.hpp"
#include "test_util.hpp"

using namespace proctensor;
using testutil::max_abs_diff;

namespace {

Matrix real4(const double (&v)[4][4], double scale) {
  Matrix m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = v[i][j] * scale;
  return m;
}

}  // namespace

TEST_CASE("shallow pocket states in closed form") {
  ShallowPocketParams prm{0.8, 0.3, 5.0, 2.0};
  const double t1 = prm.t1, tau = prm.tau;
  auto e = [&](double s) { return prm.decay(s); };

  SUBCASE("free evolution") {
    const double v[4][4] = {{1, 0, 0, e(t1 + tau)}, {0, 0, 0, 0}, {0, 0, 0, 0}, {e(t1 + tau), 0, 0, 1}};
    CHECK(max_abs_diff(sp_state(prm, pocket_free()).matrix, real4(v, 0.5)) < 1e-14);
  }
  SUBCASE("sigma_x echo") {
    const double v[4][4] = {{0, 0, 0, 0}, {0, 1, e(t1 - tau), 0}, {0, e(t1 - tau), 1, 0}, {0, 0, 0, 0}};
    CHECK(max_abs_diff(sp_state(prm, pocket_sigmax()).matrix, real4(v, 0.5)) < 1e-14);
  }
  SUBCASE("offset rotation") {
    const double p = 0.95, q = 1.0 - p, r = std::sqrt(p * q);
    // the (00,11) corners carry K_00 K_11^* = -(1-p)
    const double v[4][4] = {{q, r * e(t1), r * e(tau), -q * e(t1 + tau)},
                            {r * e(t1), p, p * e(t1 - tau), -r * e(tau)},
                            {r * e(tau), p * e(t1 - tau), p, -r * e(t1)},
                            {-q * e(t1 + tau), -r * e(tau), -r * e(t1), q}};
    CHECK(max_abs_diff(sp_state(prm, pocket_offset(p)).matrix, real4(v, 0.5)) < 1e-14);
  }
  SUBCASE("measurement of plus") {
    const double v[4][4] = {{1, e(t1), e(tau), e(t1 + tau)},
                            {e(t1), 1, e(t1 - tau), e(tau)},
                            {e(tau), e(t1 - tau), 1, e(t1)},
                            {e(t1 + tau), e(tau), e(t1), 1}};
    CHECK(max_abs_diff(sp_state(prm, pocket_measure_plus()).matrix, real4(v, 0.25)) < 1e-14);
  }
  SUBCASE("trash and prepare leaves a product state") {
    const DensityOperator rho = sp_state(prm, pocket_trash());
    CHECK(mutual_information(rho.matrix, rho.layout, {rho.layout[0].label()}, {rho.layout[1].label()}) < 1e-12);
  }
}

TEST_CASE("shallow pocket process tensor agrees with a classical-environment dilation") {
  for (double tau : {0.0, 1.3, 5.0, 8.2}) {
    const ShallowPocketParams prm{0.8, 0.3, 5.0, tau};
    const ProcessTensor a = sp_process_tensor(prm);
    const ProcessTensor b = oracle::pocket_dilation(prm.g, prm.gamma, prm.t1, tau);
    REQUIRE(a.layout == b.layout);
    CHECK(max_abs_diff(a.choi, b.choi) < 1e-12);
    CHECK(validate_causality(a).passed());
    for (const auto& spec : {pocket_free(), pocket_sigmax(), pocket_offset(), pocket_measure_plus(), pocket_trash()})
      CHECK(max_abs_diff(sp_state_from_process(a, spec).matrix, sp_state(prm, spec).matrix) < 1e-12);
  }
}

TEST_CASE("shallow pocket curves") {
  const auto rows = sp_curves(0.8, 0.3, 5.0, 12.0, 0.5);
  REQUIRE(rows.size() == 25);
  CHECK(rows[0].free == doctest::Approx(2.0));
  for (const auto& r : rows) {
    if (r.t < 5.0) CHECK(r.sigmax == r.free);
    if (r.t >= 5.0) CHECK(r.trash < 1e-10);
  }
  // full revival at t = 2 t1
  CHECK(rows[20].sigmax == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(rows[10].measure < 1e-10);
  CHECK_THROWS(sp_curves(0.8, 0.3, 5.0, 12.0, 0.0));
  CHECK_THROWS(pocket_offset(1.5));
}

TEST_CASE("case-study decay coefficient matches the reduced dynamics") {
  const Matrix h = kron(pauli_x(), pauli_x());
  Matrix lower = Matrix::Zero(2, 2);
  lower(0, 1) = 1.0;
  const Matrix zs = kron(pauli_z(), Matrix::Identity(2, 2));
  for (const auto& [xi, kappa] : std::vector<std::pair<double, double>>{{1, 1}, {1, 8}, {1, 10}, {0.5, 2.5}}) {
    const Matrix jump = std::sqrt(kappa) * kron(Matrix::Identity(2, 2), lower);
    Matrix rho = cs_initial_state();
    double t = 0.0;
    for (int k = 0; k < 8; ++k) {
      rho = oracle::evolve_rk4(rho, xi * h, {jump}, 0.25, 400);
      t += 0.25;
      CHECK((zs * rho).trace().real() == doctest::Approx(cs_coefficient_ct(xi, kappa, t)).epsilon(1e-8));
    }
  }
  CHECK(cs_coefficient_ct(1.0, 8.0, 0.3) == doctest::Approx(0.878099).epsilon(1e-6));
  CHECK(cs_coefficient_ct(1.0, 1.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("coefficient derivative matches finite differences") {
  for (const auto& [xi, kappa] : std::vector<std::pair<double, double>>{{1, 1}, {1, 8}, {1, 10}}) {
    for (double t : {0.2, 0.7, 1.9}) {
      const double h = 1e-5;
      const double fd = (cs_coefficient_ct(xi, kappa, t + h) - cs_coefficient_ct(xi, kappa, t - h)) / (2 * h);
      CHECK(cs_coefficient_ct_derivative(xi, kappa, t) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("divisibility transition at kappa = 8 xi") {
  CHECK(cs_cp_divisible(1.0, 10.0).divisible);
  CHECK(cs_cp_divisible(1.0, 8.0).divisible);
  const auto snm = cs_cp_divisible(1.0, 1.0);
  CHECK_FALSE(snm.divisible);
  REQUIRE(snm.first_violation);
  // first zero of c_t lies beyond the first negative rate
  REQUIRE_FALSE(snm.zero_crossings.empty());
  CHECK(*snm.first_violation < snm.zero_crossings.front() + 1e-3);
  CHECK_FALSE(cs_cp_divisible(1.0, 7.5, 10.0).divisible);
}

TEST_CASE("two-time non-Markovianity") {
  CHECK(cs_n2(1.0, 1.0) == doctest::Approx(1.0 / std::expm1(M_PI / std::sqrt(63.0))));
  CHECK(cs_n2(1.0, 8.0) == 0.0);
  CHECK(cs_n2(1.0, 10.0) == 0.0);
  CHECK(std::isinf(cs_n2(1.0, 0.0)));
}

TEST_CASE("case-study process tensor") {
  CaseStudyParams prm;
  prm.n_steps = 3;
  const ProcessTensor pt = cs_process_tensor(prm);
  CHECK(pt.layout.size() == 4);
  CHECK(pt.trace() == doctest::Approx(4.0));
  CHECK(validate_causality(pt).passed());

  // one trajectory through the dilation
  std::mt19937_64 rng(71);
  const Matrix rho = random_density(2, rng);
  const auto k1 = random_kraus(2, 2, 2, rng);
  const Matrix eff = ket_projector(haar_state(2, rng));
  const Instrument map =
      Instrument::single("map", LegLayout{Leg{2, Role::In, 2}, Leg{2, Role::Out, 2}}, {choi_from_kraus({k1[0]})});
  const Instrument two = tensor(tensor(preparation(rho, 1), map), measurement({eff}, 3));
  const double p = outcome_probabilities(pt, two)[0];
  CHECK(p == doctest::Approx(oracle::trajectory_probability(1.0, 1.0, 0.3, rho, {{k1[0]}}, eff)).epsilon(1e-7));
}

TEST_CASE("regimes and grids") {
  CHECK(cs_regime("int").kappa == 8.0);
  CHECK_THROWS_AS(cs_regime("weak"), std::invalid_argument);
  const auto xs = linspace_step(0.0, 2.0, 0.1);
  CHECK(xs.size() == 21);
  CHECK(xs.back() == doctest::Approx(2.0));
  const auto grid = cs_grid_scan({1.0}, {1.0, 10.0}, GridMetric::N2);
  REQUIRE(grid.size() == 2);
  CHECK(grid[0].value > 0.0);
  CHECK(grid[1].value == 0.0);
  CaseStudyParams small;
  small.n_steps = 3;
  const auto nm = cs_grid_scan({1.0}, {1.0, 10.0}, GridMetric::NonMarkovianity, small);
  CHECK(nm[0].value > nm[1].value);
  CHECK(nm[1].value > 0.0);
}

TEST_CASE("case-study observable and instruments") {
  for (int ell = 1; ell <= 2; ++ell) {
    const Instrument cb = cs_memory_instrument("causal-break", ell);
    CHECK(cb.outcome_count() == static_cast<std::size_t>(std::pow(16, ell)));
    CHECK(cb.layout()[0].label() == LegLabel{2, Role::In});
    const auto c = cs_observable(cb, ell);
    CHECK(c.instrument.layout().size() == 10);
  }
  CHECK_THROWS_AS(cs_memory_instrument("bogus", 1), std::invalid_argument);
}
