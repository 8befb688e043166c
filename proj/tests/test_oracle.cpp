#include <gtest/gtest.h>

#include <random>

#include "noisyeq/error.hpp"
#include "noisyeq/fidelity.hpp"
#include "noisyeq/oracle.hpp"
#include "support/support.hpp"

using namespace noisyeq;
using namespace noisyeq::oracle;

namespace {

Circuit fig2(double p) {
  return insert_noise(gen_qft(2), {{1, 1, "bit_flip", p}, {2, 0, "phase_flip", p}});
}

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Oracle, Qft2Unitary) {
  // Entries i^{jk}/2: the DFT on two qubits with the output order fixed by the SWAP.
  Matrix f(4, 4);
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) f(j, k) = std::pow(Complex(0, 1), j * k) / 2.0;
  }
  EXPECT_LT(max_diff(circuit_unitary(gen_qft(2)), f), 1e-15);
  EXPECT_EQ(circuit_unitary(Circuit(3)), Matrix::Identity(8, 8));
}

TEST(Oracle, HadamardOnState) {
  Circuit c(1);
  c.add_gate("h", {0});
  Vector psi(2);
  psi << Complex(0.6, 0.0), Complex(0.0, 0.8);
  const Vector out = apply_circuit(c, psi);
  EXPECT_NEAR(std::abs(out(0) - (psi(0) + psi(1)) / std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out(1) - (psi(0) - psi(1)) / std::sqrt(2.0)), 0.0, 1e-15);
}

TEST(Oracle, QubitZeroIsMostSignificant) {
  Circuit c(3);
  c.add_gate("x", {0});
  EXPECT_EQ(circuit_unitary(c)(4, 0), Complex(1.0));
}

TEST(Oracle, EnumerateKraus) {
  const double p = 0.9;
  const auto ops = enumerate_kraus(fig2(p));
  ASSERT_EQ(ops.size(), 4u);
  const Matrix u = circuit_unitary(gen_qft(2));
  EXPECT_LT(max_diff(ops[0], p * u), 1e-15);  // both identities
  EXPECT_EQ(enumerate_kraus(gen_qft(2)).size(), 1u);
  EXPECT_LT(max_diff(enumerate_kraus(gen_qft(2))[0], u), 1e-15);

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const Circuit ideal = testsupport::random_circuit(3, 10, rng);
    const Circuit noisy = testsupport::random_noisy(ideal, 3, "depolarizing", 0.7, rng);
    Matrix sum = Matrix::Zero(8, 8);
    for (const auto& e : enumerate_kraus(noisy)) sum += e.adjoint() * e;
    EXPECT_LT(max_diff(sum, Matrix::Identity(8, 8)), 1e-9);
  }
}

TEST(Oracle, JamiolkowskiRoutes) {
  for (double p : {0.3, 0.9}) {
    const DenseFidelity f = jamiolkowski_routes(gen_qft(2), fig2(p));
    EXPECT_NEAR(f.trace_route, p * p, 1e-12);
    ASSERT_TRUE(f.choi_route.has_value());
    EXPECT_NEAR(*f.choi_route, p * p, 1e-12);
  }
  EXPECT_NEAR(jamiolkowski_fidelity_dense(gen_qft(4), gen_qft(4)), 1.0, 1e-12);
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Circuit ideal = testsupport::random_circuit(2 + trial % 3, 10, rng);
    const Circuit noisy = testsupport::random_noisy(ideal, 2, trial % 2 ? "depolarizing" : "bit_phase_flip", 0.75, rng);
    const DenseFidelity f = jamiolkowski_routes(ideal, noisy);
    EXPECT_NEAR(f.trace_route, *f.choi_route, 1e-10);
  }
  // Above the Choi limit only the trace route runs.
  EXPECT_FALSE(jamiolkowski_routes(gen_bv(6), gen_bv(6)).choi_route.has_value());
}

TEST(Oracle, Limits) {
  EXPECT_THROW(circuit_unitary(Circuit(11)), InputError);
  EXPECT_THROW(circuit_unitary(fig2(0.9)), InputError);
  EXPECT_THROW(enumerate_kraus(Circuit(9)), InputError);
  const Circuit ideal = gen_qft(3);
  EXPECT_THROW(enumerate_kraus(insert_noise(ideal, random_noise_spec(ideal, 9, "depolarizing", 0.9, 1))), InputError);
  EXPECT_THROW(haar_average_fidelity(gen_qft(2), gen_qft(2), 0, 1), InputError);
  EXPECT_THROW(haar_average_fidelity(gen_qft(7), gen_qft(7), 10, 1), InputError);
}

TEST(Haar, NoiselessIsExactlyOne) {
  const HaarEstimate h = haar_average_fidelity(gen_qft(3), gen_qft(3), 200, 5);
  EXPECT_NEAR(h.mean, 1.0, 1e-12);
}

TEST(Haar, Fig2MatchesIdentity) {
  const double p = 0.9;
  const HaarEstimate h = haar_average_fidelity(gen_qft(2), fig2(p), 10000, 7);
  const double expected = average_fidelity(p * p, 4.0);
  EXPECT_NEAR(expected, 0.848, 1e-12);
  EXPECT_LT(std::abs(h.mean - expected), 3 * h.std_error);
}

TEST(Haar, SeededAndConverging) {
  const Circuit noisy = fig2(0.8);
  const HaarEstimate a = haar_average_fidelity(gen_qft(2), noisy, 500, 9);
  const HaarEstimate b = haar_average_fidelity(gen_qft(2), noisy, 500, 9);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  const double target = average_fidelity(0.64, 4.0);
  const HaarEstimate small = haar_average_fidelity(gen_qft(2), noisy, 100, 10);
  const HaarEstimate big = haar_average_fidelity(gen_qft(2), noisy, 20000, 10);
  EXPECT_LT(big.std_error, small.std_error);
  EXPECT_LT(std::abs(big.mean - target), 4 * big.std_error);
}

TEST(Properties, Chaining) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const Circuit u1 = testsupport::random_circuit(2, 6, rng);
    const Circuit u2 = testsupport::random_circuit(2, 6, rng);
    const Circuit e1 = testsupport::random_noisy(u1, 2, "depolarizing", 0.7, rng);
    const Circuit e2 = testsupport::random_noisy(u2, 1 + trial % 2, trial % 2 ? "bit_flip" : "bit_phase_flip", 0.6, rng);
    const double lhs = cj_metric(jamiolkowski_fidelity_dense(concatenate(u1, u2), concatenate(e1, e2)));
    const double rhs = cj_metric(jamiolkowski_fidelity_dense(u1, e1)) + cj_metric(jamiolkowski_fidelity_dense(u2, e2));
    EXPECT_LE(lhs, rhs + 1e-9);
  }
}
