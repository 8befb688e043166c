#pragma once

#include <complex>
#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace noisyeq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Dense 2^k x 2^k unitary acting on k qubits.
///
/// Rows and columns follow qubit-major bit order: the first qubit an
/// instruction lists is the most significant bit of the row/column index.
class GateMatrix {
 public:
  GateMatrix() = default;
  /// Throws InputError when the matrix is not square with a power-of-two side.
  explicit GateMatrix(Matrix entries);

  int arity() const noexcept { return arity_; }
  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  Complex operator()(Eigen::Index row, Eigen::Index col) const { return entries_(row, col); }

  bool is_unitary(double tol = 1e-12) const;

  friend bool operator==(const GateMatrix& a, const GateMatrix& b) {
    return a.entries_ == b.entries_;
  }

 private:
  int arity_ = 0;
  Matrix entries_;
};

/// Number of angle parameters the named builtin takes, or -1 if unknown.
int builtin_param_count(std::string_view name);

/// Number of qubits the named builtin acts on, or -1 if unknown.
int builtin_arity(std::string_view name);

/// Standard matrix for a builtin gate. Names are case-insensitive:
/// I X Y Z H S Sdg T Tdg RX RY RZ CX CZ CS SWAP. Rotations take one angle in radians.
GateMatrix builtin(std::string_view name, std::span<const double> params = {});

GateMatrix adjoint(const GateMatrix& g);
GateMatrix conjugate(const GateMatrix& g);

/// a ⊗ b, with `a` on the more significant qubits.
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace noisyeq
