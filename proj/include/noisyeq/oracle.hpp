#pragma once

// Dense reference implementations used to cross-check the TDD engine.
// Everything here is exponential in the qubit count and guarded by hard
// size limits. Qubit 0 is the most significant bit of a basis index.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "noisyeq/circuit.hpp"
#include "noisyeq/gates.hpp"

namespace noisyeq::oracle {

using Vector = Eigen::VectorXcd;

inline constexpr int kMaxUnitaryQubits = 10;
inline constexpr int kMaxKrausQubits = 8;
inline constexpr std::uint64_t kMaxKrausTerms = std::uint64_t{1} << 16;
inline constexpr int kMaxChoiQubits = 5;
inline constexpr int kMaxHaarQubits = 6;

/// Left-multiplies the rows of `m` (2^n rows) by `op` acting on `qubits`.
void apply_operator(Matrix& m, const Matrix& op, const std::vector<int>& qubits, int n);

/// 2^n x 2^n unitary of an ideal circuit. Throws InputError on noise or n > 10.
Matrix circuit_unitary(const Circuit& c);
/// The circuit applied to a state vector.
Vector apply_circuit(const Circuit& c, const Vector& state);

/// Every Kraus operator E_i of a noisy circuit, choices in lexicographic order.
/// Throws InputError when n > 8 or there are more than 2^16 terms.
std::vector<Matrix> enumerate_kraus(const Circuit& noisy);

/// ρ ↦ 𝓔(ρ) for the noisy circuit, on a 2^n x 2^n density matrix.
Matrix apply_channel(const Circuit& noisy, const Matrix& rho);

struct DenseFidelity {
  double trace_route = 0.0;
  std::optional<double> choi_route;  // only for n ≤ 5
};

/// Both fidelity routes without the agreement check.
DenseFidelity jamiolkowski_routes(const Circuit& ideal, const Circuit& noisy);

/// (1/d²) Σ_i |tr(U† E_i)|², cross-checked against ⟨Ψ_U|ρ_𝓔|Ψ_U⟩ when n ≤ 5.
/// Throws InternalCheckError when the two disagree by more than 1e-10.
double jamiolkowski_fidelity_dense(const Circuit& ideal, const Circuit& noisy);

struct HaarEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo mean of ⟨ψ|U† 𝓔(|ψ⟩⟨ψ|) U|ψ⟩ over Haar-random |ψ⟩.
/// Throws InputError when samples is 0 or n > 6.
HaarEstimate haar_average_fidelity(const Circuit& ideal, const Circuit& noisy, std::size_t samples,
                                   std::uint64_t seed);

}  // namespace noisyeq::oracle
