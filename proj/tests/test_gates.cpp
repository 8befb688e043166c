#include <gtest/gtest.h>

#include <cmath>

#include "noisyeq/error.hpp"
#include "noisyeq/gates.hpp"

using namespace noisyeq;

namespace {

const char* kAll[] = {"i", "x", "y", "z", "h", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "cx", "cz", "cs", "swap"};

GateMatrix make(const char* name) {
  const double theta[] = {0.37};
  return builtin(name, builtin_param_count(name) ? std::span<const double>(theta) : std::span<const double>());
}

Matrix diag2(Complex a, Complex b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST(Gates, Hadamard) {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix h(2, 2);
  h << r, r, r, -r;
  EXPECT_TRUE(builtin("H").matrix().isApprox(h, 1e-15));
  EXPECT_NEAR(std::abs(builtin("h")(1, 1) + r), 0.0, 1e-15);
}

TEST(Gates, ControlledS) {
  Matrix cs = Matrix::Identity(4, 4);
  cs(3, 3) = Complex(0, 1);
  EXPECT_EQ(builtin("CS").matrix(), cs);
}

TEST(Gates, ZeroAngleRotationIsIdentity) {
  const double zero[] = {0.0};
  EXPECT_EQ(builtin("RZ", zero).matrix(), Matrix::Identity(2, 2));
}

TEST(Gates, CxUsesFirstQubitAsMostSignificant) {
  const GateMatrix cx = builtin("cx");
  EXPECT_EQ(cx(2, 3), Complex(1.0));
  EXPECT_EQ(cx(3, 2), Complex(1.0));
  EXPECT_EQ(cx(1, 1), Complex(1.0));
}

TEST(Gates, AdjointExamples) {
  EXPECT_TRUE(adjoint(builtin("h")).matrix().isApprox(builtin("h").matrix(), 1e-15));
  EXPECT_EQ(adjoint(builtin("s")).matrix(), diag2(1.0, Complex(0, -1)));
  const double a[] = {0.7};
  const Matrix prod = adjoint(builtin("rz", a)).matrix() * builtin("rz", a).matrix();
  EXPECT_LT((prod - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gates, ConjugateExamples) {
  EXPECT_EQ(conjugate(builtin("x")).matrix(), builtin("x").matrix());
  EXPECT_EQ(conjugate(builtin("s")).matrix(), diag2(1.0, Complex(0, -1)));
  EXPECT_EQ(conjugate(builtin("y")).matrix(), -builtin("y").matrix());
}

TEST(Gates, EveryBuiltinIsUnitaryAndConsistent) {
  for (const char* name : kAll) {
    SCOPED_TRACE(name);
    const GateMatrix g = make(name);
    EXPECT_EQ(g.dim(), Eigen::Index{1} << builtin_arity(name));
    EXPECT_TRUE(g.is_unitary(1e-12));
    const Matrix prod = adjoint(g).matrix() * g.matrix();
    EXPECT_LT((prod - Matrix::Identity(g.dim(), g.dim())).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(conjugate(conjugate(g)), g);
    EXPECT_EQ(adjoint(g).matrix(), Matrix(conjugate(g).matrix().transpose()));
  }
}

TEST(Gates, NamesAreCaseInsensitive) {
  EXPECT_EQ(builtin("SWAP"), builtin("swap"));
  EXPECT_EQ(builtin("Sdg"), builtin("sdg"));
}

TEST(Gates, Errors) {
  EXPECT_THROW(builtin("toffoli"), InputError);
  EXPECT_THROW(builtin("rx"), InputError);
  const double a[] = {1.0};
  EXPECT_THROW(builtin("h", a), InputError);
  EXPECT_THROW(GateMatrix(Matrix::Identity(3, 3)), InputError);
  EXPECT_THROW(GateMatrix(Matrix::Identity(2, 4)), InputError);
  EXPECT_EQ(builtin_arity("nope"), -1);
  EXPECT_EQ(builtin_param_count("nope"), -1);
}

TEST(Gates, KronPutsFirstFactorOnHighBits) {
  const Matrix xz = kron(builtin("x").matrix(), builtin("z").matrix());
  EXPECT_EQ(xz(2, 0), Complex(1.0));
  EXPECT_EQ(xz(3, 1), Complex(-1.0));
}
