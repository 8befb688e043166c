#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "noisyeq/gates.hpp"
#include "noisyeq/noise.hpp"

namespace noisyeq {

enum class InstructionKind { gate, noise };

/// One circuit step: a builtin gate (optionally conjugated and/or transposed)
/// or a placeholder for a noise channel.
struct Instruction {
  InstructionKind kind = InstructionKind::gate;
  std::string gate;            // lowercase builtin name
  std::vector<double> params;  // rotation angles
  bool conj = false;           // entry-wise conjugate applied
  bool transposed = false;     // transpose applied after `conj`
  std::size_t channel = 0;     // index into Circuit::channels() for noise
  std::vector<int> qubits;

  bool is_gate() const noexcept { return kind == InstructionKind::gate; }
  bool is_noise() const noexcept { return kind == InstructionKind::noise; }
  /// Gate matrix with modifiers applied. Only valid for gate instructions.
  GateMatrix matrix() const;
  /// Name with modifier suffix as used in the text format ("cs^dg", "y^c").
  std::string display_name() const;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

/// Ordered instruction list over `num_qubits` qubits plus the channel table
/// that noise placeholders index into.
class Circuit {
 public:
  /// Throws InputError when num_qubits < 1.
  explicit Circuit(int num_qubits);

  int num_qubits() const noexcept { return num_qubits_; }
  const std::vector<Instruction>& instructions() const noexcept { return instructions_; }
  const std::vector<NoiseChannel>& channels() const noexcept { return channels_; }
  const NoiseChannel& channel_of(const Instruction& ins) const { return channels_.at(ins.channel); }

  Circuit& add_gate(std::string_view name, std::vector<int> qubits, std::vector<double> params = {});
  Circuit& add_noise(const NoiseChannel& channel, int qubit);
  /// Appends a validated instruction; for noise, `channel` must already be registered.
  Circuit& append(Instruction ins);
  std::size_t add_channel(const NoiseChannel& channel);

  bool is_ideal() const noexcept;
  std::size_t noise_count() const noexcept;
  std::size_t gate_count() const noexcept;
  /// Π over placeholders of the number of Kraus operators; saturates at UINT64_MAX.
  std::uint64_t kraus_term_count() const noexcept;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  void check_qubits(const std::vector<int>& qubits) const;

  int num_qubits_;
  std::vector<Instruction> instructions_;
  std::vector<NoiseChannel> channels_;
};

// --- text format ------------------------------------------------------------

/// Parses the line format:
///
///     qubits <n>
///     <gate> <q...> [<angle>]
///     noise <channel> <q> <p>
///
/// Blank lines and `#` comments are ignored. Throws ParseError.
Circuit parse_circuit(std::string_view text);
std::string to_text(const Circuit& c);

// --- transforms -------------------------------------------------------------

/// U†: reversed order, each gate adjointed. Throws InputError on noisy input.
Circuit adjoint_circuit(const Circuit& c);
/// U*: each gate conjugated entry-wise, order kept. Throws InputError on noisy input.
Circuit conjugate_circuit(const Circuit& c);
/// `first` followed by `second`. Qubit counts must match.
Circuit concatenate(const Circuit& first, const Circuit& second);
/// Same circuit on `num_qubits + extra` qubits; new qubits stay untouched.
Circuit with_ancillas(const Circuit& c, int extra);
/// The circuit with every noise placeholder removed.
Circuit strip_noise(const Circuit& c);

// --- generators -------------------------------------------------------------

/// Quantum Fourier transform with final qubit-reversal SWAPs. Controlled
/// phases of π/2 use CS; smaller ones use an RZ/CX/RZ/CX/RZ decomposition,
/// exact up to a global phase.
Circuit gen_qft(int n);
/// Bernstein-Vazirani: H layer, CX(i, n-1) for each set secret bit, H layer.
/// `secret` has n-1 characters from {0,1}; qubit n-1 is the oracle ancilla.
Circuit gen_bv(int n, std::string_view secret);
/// gen_bv with the all-ones secret.
Circuit gen_bv(int n);

// --- noise insertion --------------------------------------------------------

/// One noise to insert. `after` counts the ideal instructions that precede
/// the noise, so 0 places it at the very start and len(c) at the very end.
struct NoisePlacement {
  std::size_t after = 0;
  int qubit = 0;
  std::string channel;
  double p = 1.0;
};

/// Throws InputError on bad position, qubit, channel name or p.
Circuit insert_noise(const Circuit& ideal, const std::vector<NoisePlacement>& spec);

/// JSON: array of {"after": int, "qubit": int, "channel": string, "p": float}.
std::vector<NoisePlacement> parse_noise_spec(std::string_view json_text);

/// `count` placements at uniformly random positions and qubits; sorted by position.
std::vector<NoisePlacement> random_noise_spec(const Circuit& ideal, std::size_t count,
                                              std::string_view channel, double p,
                                              std::uint64_t seed);

}  // namespace noisyeq
