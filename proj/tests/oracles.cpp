#include "oracles.hpp"

#include <cmath>
#include <numeric>

#include "proctensor/quantum_info.hpp"

namespace oracle {

namespace {

std::vector<Index> unravel(Index k, const std::vector<Index>& dims) {
  std::vector<Index> idx(dims.size());
  for (std::size_t j = dims.size(); j-- > 0;) {
    idx[j] = k % dims[j];
    k /= dims[j];
  }
  return idx;
}

Index ravel(const std::vector<Index>& idx, const std::vector<Index>& dims) {
  Index k = 0;
  for (std::size_t j = 0; j < dims.size(); ++j) k = k * dims[j] + idx[j];
  return k;
}

}  // namespace

Matrix partial_trace(const Matrix& m, const std::vector<Index>& dims, const std::vector<bool>& keep) {
  std::vector<Index> kept;
  for (std::size_t j = 0; j < dims.size(); ++j)
    if (keep[j]) kept.push_back(dims[j]);
  const Index dk = std::accumulate(kept.begin(), kept.end(), Index{1}, std::multiplies<>());
  Matrix out = Matrix::Zero(dk, dk);
  for (Index r = 0; r < m.rows(); ++r) {
    const auto ri = unravel(r, dims);
    for (Index c = 0; c < m.cols(); ++c) {
      const auto ci = unravel(c, dims);
      bool diag = true;
      std::vector<Index> rk, ck;
      for (std::size_t j = 0; j < dims.size(); ++j) {
        if (keep[j]) {
          rk.push_back(ri[j]);
          ck.push_back(ci[j]);
        } else if (ri[j] != ci[j]) {
          diag = false;
          break;
        }
      }
      if (diag) out(ravel(rk, kept), ravel(ck, kept)) += m(r, c);
    }
  }
  return out;
}

Matrix permute(const Matrix& m, const std::vector<Index>& dims, const std::vector<int>& perm) {
  std::vector<Index> nd(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) nd[k] = dims[static_cast<std::size_t>(perm[k])];
  Matrix out(m.rows(), m.cols());
  for (Index r = 0; r < m.rows(); ++r) {
    const auto ri = unravel(r, dims);
    std::vector<Index> nr(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) nr[k] = ri[static_cast<std::size_t>(perm[k])];
    for (Index c = 0; c < m.cols(); ++c) {
      const auto ci = unravel(c, dims);
      std::vector<Index> nc(perm.size());
      for (std::size_t k = 0; k < perm.size(); ++k) nc[k] = ci[static_cast<std::size_t>(perm[k])];
      out(ravel(nr, nd), ravel(nc, nd)) = m(r, c);
    }
  }
  return out;
}

Matrix evolve_rk4(const Matrix& rho, const Matrix& h, const std::vector<Matrix>& jumps, double t,
                  int substeps) {
  const proctensor::Complex i(0.0, 1.0);
  auto rhs = [&](const Matrix& x) {
    Matrix d = -i * (h * x - x * h);
    for (const auto& l : jumps) {
      const Matrix ll = l.adjoint() * l;
      d += l * x * l.adjoint() - 0.5 * (ll * x + x * ll);
    }
    return d;
  };
  const double step = t / substeps;
  Matrix x = rho;
  for (int k = 0; k < substeps; ++k) {
    const Matrix k1 = rhs(x);
    const Matrix k2 = rhs(x + 0.5 * step * k1);
    const Matrix k3 = rhs(x + 0.5 * step * k2);
    const Matrix k4 = rhs(x + step * k3);
    x += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

double trajectory_probability(double xi, double kappa, double dt, const Matrix& prep,
                              const std::vector<std::vector<Matrix>>& maps, const Matrix& effect,
                              int substeps) {
  Matrix sx(2, 2);
  sx << 0, 1, 1, 0;
  Matrix lower = Matrix::Zero(2, 2);
  lower(0, 1) = 1.0;
  const Matrix id = Matrix::Identity(2, 2);
  Matrix h(4, 4);
  Matrix jump(4, 4);
  for (Index a = 0; a < 4; ++a)
    for (Index b = 0; b < 4; ++b) {
      h(a, b) = xi * sx(a / 2, b / 2) * sx(a % 2, b % 2);
      jump(a, b) = std::sqrt(kappa) * id(a / 2, b / 2) * lower(a % 2, b % 2);
    }
  Matrix env = Matrix::Zero(2, 2);
  env(0, 0) = 1.0;
  // rho_SE = prep (x) |0><0|_E, written out element by element
  Matrix rho(4, 4);
  for (Index a = 0; a < 4; ++a)
    for (Index b = 0; b < 4; ++b) rho(a, b) = prep(a / 2, b / 2) * env(a % 2, b % 2);

  auto on_system = [&](const Matrix& k) {
    Matrix big(4, 4);
    for (Index a = 0; a < 4; ++a)
      for (Index b = 0; b < 4; ++b) big(a, b) = k(a / 2, b / 2) * id(a % 2, b % 2);
    return big;
  };

  rho = evolve_rk4(rho, h, {jump}, dt, substeps);
  for (const auto& kraus : maps) {
    Matrix next = Matrix::Zero(4, 4);
    for (const auto& k : kraus) {
      const Matrix big = on_system(k);
      next += big * rho * big.adjoint();
    }
    rho = evolve_rk4(next, h, {jump}, dt, substeps);
  }
  return (on_system(effect) * rho).trace().real();
}

proctensor::ProcessTensor pocket_dilation(double g, double gamma, double t1, double tau) {
  using proctensor::Complex;
  auto decay = [&](double s) { return std::exp(-g * gamma * std::abs(s)); };
  // Phases psi in {0, +theta, -theta} with E[e^{2i psi}] = b and E[e^{4i psi}] = b^2,
  // and an independent chi = +-omega with E[e^{2i chi}] = c.
  const bool t1_longer = t1 >= tau;
  const double b = t1_longer ? decay(tau) : decay(t1);
  const double c = t1_longer ? decay(t1) / decay(tau) : decay(tau - t1);
  const double q = 2.0 * (1.0 - b) / (3.0 - b);
  const double theta = 0.5 * std::acos((b - 1.0) / 2.0);
  const double omega = 0.5 * std::acos(c);

  struct Env {
    double weight;
    double phi_first;
    double phi_second;
  };
  std::vector<Env> envs;
  const double psis[3] = {0.0, theta, -theta};
  const double wpsi[3] = {1.0 - q, q / 2.0, q / 2.0};
  for (int a = 0; a < 3; ++a)
    for (int s = -1; s <= 1; s += 2) {
      const double chi = s * omega;
      const double shorter = psis[a];
      const double longer = psis[a] + chi;
      envs.push_back({0.5 * wpsi[a], t1_longer ? longer : shorter, t1_longer ? shorter : longer});
    }

  const Index de = static_cast<Index>(envs.size());
  Matrix init = Matrix::Zero(2 * de, 2 * de);
  for (Index e = 0; e < de; ++e) init(e, e) = envs[static_cast<std::size_t>(e)].weight;  // S = |0>

  auto propagator = [&](bool first) {
    Matrix u = Matrix::Zero(2 * de, 2 * de);
    for (Index e = 0; e < de; ++e) {
      const double phi = first ? envs[static_cast<std::size_t>(e)].phi_first : envs[static_cast<std::size_t>(e)].phi_second;
      u(0 * de + e, 0 * de + e) = std::exp(Complex(0.0, phi));
      u(1 * de + e, 1 * de + e) = std::exp(Complex(0.0, -phi));
    }
    return proctensor::unitary_superoperator(u);
  };

  proctensor::DilatedDynamics dyn;
  dyn.sys_dim = 2;
  dyn.env_dim = de;
  dyn.initial_state = init;
  dyn.propagators = {propagator(true), propagator(false)};
  dyn.first_step_has_input = false;
  dyn.first_timestep = 0;
  return proctensor::build_process_tensor(dyn, 3, false);
}

}  // namespace oracle
