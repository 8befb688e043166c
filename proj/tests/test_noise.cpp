#include <gtest/gtest.h>

#include <random>

#include "noisyeq/error.hpp"
#include "noisyeq/noise.hpp"

using namespace noisyeq;

namespace {

Matrix pauli(const char* n) { return builtin(n).matrix(); }

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Noise, BitFlipKraus) {
  const double p = 0.95;
  const NoiseChannel ch = make_channel(ChannelKind::bit_flip, p);
  ASSERT_EQ(ch.kraus.size(), 2u);
  EXPECT_LT(max_diff(ch.kraus[0], std::sqrt(p) * Matrix::Identity(2, 2)), 1e-15);
  EXPECT_LT(max_diff(ch.kraus[1], std::sqrt(1 - p) * pauli("x")), 1e-15);
}

TEST(Noise, DepolarizingAtOneKeepsOnlyIdentity) {
  const NoiseChannel ch = make_channel("depolarizing", 1.0);
  ASSERT_EQ(ch.kraus.size(), 1u);
  EXPECT_EQ(ch.kraus[0], Matrix::Identity(2, 2));
}

TEST(Noise, DepolarizingNormalized) {
  const NoiseChannel ch = make_channel(ChannelKind::depolarizing, 0.999);
  EXPECT_EQ(ch.kraus.size(), 4u);
  EXPECT_TRUE(ch.is_normalized(1e-12));
}

TEST(Noise, KrausCounts) {
  for (auto k : {ChannelKind::bit_flip, ChannelKind::phase_flip, ChannelKind::bit_phase_flip}) {
    EXPECT_EQ(make_channel(k, 0.3).kraus.size(), 2u);
    EXPECT_EQ(make_channel(k, 0.0).kraus.size(), 1u);
  }
  EXPECT_EQ(make_channel(ChannelKind::depolarizing, 0.3).kraus.size(), 4u);
  EXPECT_EQ(make_channel(ChannelKind::depolarizing, 0.0).kraus.size(), 3u);
}

TEST(Noise, MatrixRepOfFlips) {
  const double p = 0.8;
  const Matrix ii = Matrix::Identity(4, 4);
  const Matrix bit = p * ii + (1 - p) * kron(pauli("x"), pauli("x"));
  const Matrix phase = p * ii + (1 - p) * kron(pauli("z"), pauli("z"));
  EXPECT_LT(max_diff(matrix_rep(make_channel("bit_flip", p)), bit), 1e-15);
  EXPECT_LT(max_diff(matrix_rep(make_channel("phase_flip", p)), phase), 1e-15);
}

TEST(Noise, MatrixRepOfSingleTerm) {
  NoiseChannel ch;
  ch.kraus = {builtin("s").matrix()};
  const Matrix s = builtin("s").matrix();
  EXPECT_EQ(matrix_rep(ch), kron(s, s.conjugate()));
}

TEST(Noise, MatrixRepPreservesTrace) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (auto kind : {ChannelKind::bit_flip, ChannelKind::phase_flip, ChannelKind::bit_phase_flip,
                    ChannelKind::depolarizing}) {
    const Matrix m = matrix_rep(make_channel(kind, 0.37));
    for (int trial = 0; trial < 20; ++trial) {
      Matrix a(2, 2);
      for (int i = 0; i < 4; ++i) a(i / 2, i % 2) = Complex(g(rng), g(rng));
      Matrix rho = a * a.adjoint();
      rho /= rho.trace();
      Eigen::VectorXcd v(4);
      for (int i = 0; i < 4; ++i) v(i) = rho(i / 2, i % 2);  // row-major vectorisation
      const Eigen::VectorXcd w = m * v;
      EXPECT_NEAR(std::abs(w(0) + w(3) - Complex(1.0)), 0.0, 1e-10);
    }
  }
}

TEST(Noise, Errors) {
  EXPECT_THROW(make_channel("amplitude_damping", 0.5), InputError);
  EXPECT_THROW(make_channel("bit_flip", 1.5), InputError);
  EXPECT_THROW(make_channel("bit_flip", -0.1), InputError);
  EXPECT_THROW(parse_channel_kind("flip"), InputError);
}

TEST(Noise, KrausWeight) {
  const NoiseChannel ch = make_channel("depolarizing", 0.7);
  EXPECT_NEAR(kraus_weight(ch.kraus[0]), 0.7, 1e-15);
  EXPECT_NEAR(kraus_weight(ch.kraus[1]), 0.1, 1e-15);
}
