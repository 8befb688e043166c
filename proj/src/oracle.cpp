#include "noisyeq/oracle.hpp"

#include <cmath>
#include <random>

#include "noisyeq/error.hpp"

namespace noisyeq::oracle {
namespace {

void require_width(int n, int limit, const char* what) {
  if (n > limit) {
    throw InputError(std::string(what) + " is limited to " + std::to_string(limit) + " qubits");
  }
}

Matrix shifted_channel_step(const Matrix& rho, const std::vector<Matrix>& kraus,
                            const std::vector<int>& qubits, int n) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus) {
    Matrix left = rho;
    apply_operator(left, k, qubits, n);
    Matrix both = left.adjoint();
    apply_operator(both, k, qubits, n);
    out += both.adjoint();
  }
  return out;
}

// Runs `c` on qubits offset..offset+c.n-1 of an n-qubit density matrix.
Matrix evolve_density(const Circuit& c, Matrix rho, int n, int offset) {
  for (const auto& ins : c.instructions()) {
    std::vector<int> q = ins.qubits;
    for (int& x : q) x += offset;
    if (ins.is_gate()) {
      rho = shifted_channel_step(rho, {ins.matrix().matrix()}, q, n);
    } else {
      rho = shifted_channel_step(rho, c.channel_of(ins).kraus, q, n);
    }
  }
  return rho;
}

}  // namespace

void apply_operator(Matrix& m, const Matrix& op, const std::vector<int>& qubits, int n) {
  const std::size_t k = qubits.size();
  const Eigen::Index dk = Eigen::Index{1} << k;
  if (op.rows() != dk || op.cols() != dk) throw InputError("operator size does not match its qubits");
  std::vector<Eigen::Index> bit(k);
  Eigen::Index mask = 0;
  for (std::size_t i = 0; i < k; ++i) {
    bit[i] = Eigen::Index{1} << (n - 1 - qubits[i]);
    mask |= bit[i];
  }
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(dk));
  Matrix block(dk, m.cols());
  for (Eigen::Index base = 0; base < m.rows(); ++base) {
    if (base & mask) continue;
    for (Eigen::Index s = 0; s < dk; ++s) {
      Eigen::Index r = base;
      for (std::size_t i = 0; i < k; ++i) {
        if ((s >> (k - 1 - i)) & 1) r |= bit[i];
      }
      rows[static_cast<std::size_t>(s)] = r;
      block.row(s) = m.row(r);
    }
    const Matrix out = op * block;
    for (Eigen::Index s = 0; s < dk; ++s) m.row(rows[static_cast<std::size_t>(s)]) = out.row(s);
  }
}

Matrix circuit_unitary(const Circuit& c) {
  const int n = c.num_qubits();
  require_width(n, kMaxUnitaryQubits, "circuit_unitary");
  if (!c.is_ideal()) throw InputError("circuit_unitary needs an ideal circuit");
  const Eigen::Index d = Eigen::Index{1} << n;
  Matrix u = Matrix::Identity(d, d);
  for (const auto& ins : c.instructions()) apply_operator(u, ins.matrix().matrix(), ins.qubits, n);
  return u;
}

Vector apply_circuit(const Circuit& c, const Vector& state) {
  Matrix m = state;
  if (m.rows() != (Eigen::Index{1} << c.num_qubits())) throw InputError("state has the wrong dimension");
  if (!c.is_ideal()) throw InputError("apply_circuit needs an ideal circuit");
  for (const auto& ins : c.instructions()) apply_operator(m, ins.matrix().matrix(), ins.qubits, c.num_qubits());
  return m.col(0);
}

std::vector<Matrix> enumerate_kraus(const Circuit& noisy) {
  const int n = noisy.num_qubits();
  require_width(n, kMaxKrausQubits, "enumerate_kraus");
  if (noisy.kraus_term_count() > kMaxKrausTerms) {
    throw InputError("enumerate_kraus is limited to 2^16 Kraus terms");
  }
  const Eigen::Index d = Eigen::Index{1} << n;
  std::vector<Matrix> ops{Matrix::Identity(d, d)};
  for (const auto& ins : noisy.instructions()) {
    if (ins.is_gate()) {
      const Matrix g = ins.matrix().matrix();
      for (auto& e : ops) apply_operator(e, g, ins.qubits, n);
      continue;
    }
    // Later noises vary fastest, so the result is in lexicographic choice order.
    std::vector<Matrix> next;
    for (const auto& e : ops) {
      for (const auto& k : noisy.channel_of(ins).kraus) {
        Matrix x = e;
        apply_operator(x, k, ins.qubits, n);
        next.push_back(std::move(x));
      }
    }
    ops = std::move(next);
  }
  return ops;
}

Matrix apply_channel(const Circuit& noisy, const Matrix& rho) {
  const Eigen::Index d = Eigen::Index{1} << noisy.num_qubits();
  if (rho.rows() != d || rho.cols() != d) throw InputError("density matrix has the wrong dimension");
  return evolve_density(noisy, rho, noisy.num_qubits(), 0);
}

DenseFidelity jamiolkowski_routes(const Circuit& ideal, const Circuit& noisy) {
  if (ideal.num_qubits() != noisy.num_qubits()) throw InputError("qubit count mismatch");
  const int n = ideal.num_qubits();
  const Eigen::Index d = Eigen::Index{1} << n;
  const Matrix u_dag = circuit_unitary(ideal).adjoint();

  DenseFidelity out;
  double sum = 0.0;
  for (const auto& e : enumerate_kraus(noisy)) sum += std::norm((u_dag * e).trace());
  out.trace_route = sum / static_cast<double>(d * d);

  if (n <= kMaxChoiQubits) {
    // |Ψ> = Σ_i |i>|i> / √d over (reference, system); the circuit acts on the system half.
    Vector psi = Vector::Zero(d * d);
    for (Eigen::Index i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
    const Matrix rho_e = evolve_density(noisy, psi * psi.adjoint(), 2 * n, n);
    Matrix psi_u = psi;
    for (const auto& ins : ideal.instructions()) {
      std::vector<int> q = ins.qubits;
      for (int& x : q) x += n;
      apply_operator(psi_u, ins.matrix().matrix(), q, 2 * n);
    }
    out.choi_route = (psi_u.adjoint() * rho_e * psi_u)(0, 0).real();
  }
  return out;
}

double jamiolkowski_fidelity_dense(const Circuit& ideal, const Circuit& noisy) {
  const DenseFidelity f = jamiolkowski_routes(ideal, noisy);
  if (f.choi_route && std::abs(*f.choi_route - f.trace_route) > 1e-10) {
    throw InternalCheckError("trace route " + std::to_string(f.trace_route) + " and Choi route " +
                             std::to_string(*f.choi_route) + " disagree");
  }
  return f.trace_route;
}

HaarEstimate haar_average_fidelity(const Circuit& ideal, const Circuit& noisy, std::size_t samples,
                                   std::uint64_t seed) {
  if (samples == 0) throw InputError("haar_average_fidelity needs at least one sample");
  if (ideal.num_qubits() != noisy.num_qubits()) throw InputError("qubit count mismatch");
  const int n = ideal.num_qubits();
  require_width(n, kMaxHaarQubits, "haar_average_fidelity");
  const Eigen::Index d = Eigen::Index{1} << n;
  const Matrix u = circuit_unitary(ideal);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Vector psi(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      psi(i) = Complex(re, im);
    }
    psi.normalize();
    const Matrix rho = apply_channel(noisy, psi * psi.adjoint());
    const Vector phi = u * psi;
    const double f = (phi.adjoint() * rho * phi)(0, 0).real();
    sum += f;
    sum_sq += f * f;
  }
  const double m = static_cast<double>(samples);
  HaarEstimate h;
  h.mean = sum / m;
  const double var = samples > 1 ? std::max(0.0, (sum_sq - m * h.mean * h.mean) / (m - 1.0)) : 0.0;
  h.std_error = std::sqrt(var / m);
  return h;
}

}  // namespace noisyeq::oracle
