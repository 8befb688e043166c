#include "noisyeq/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "noisyeq/error.hpp"

namespace noisyeq {
namespace {

bool one_of(std::string_view name, std::initializer_list<std::string_view> names) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string_view swap_dagger_name(std::string_view name) {
  if (name == "s") return "sdg";
  if (name == "sdg") return "s";
  if (name == "t") return "tdg";
  if (name == "tdg") return "t";
  return {};
}

Instruction adjoint_of(Instruction ins) {
  if (ins.conj || ins.transposed) {
    ins.conj = !ins.conj;
    ins.transposed = !ins.transposed;
  } else if (one_of(ins.gate, {"i", "x", "y", "z", "h", "cx", "cz", "swap"})) {
    // Hermitian
  } else if (auto flipped = swap_dagger_name(ins.gate); !flipped.empty()) {
    ins.gate = flipped;
  } else if (one_of(ins.gate, {"rx", "ry", "rz"})) {
    ins.params[0] = -ins.params[0];
  } else {
    ins.conj = ins.transposed = true;
  }
  return ins;
}

Instruction conjugate_of(Instruction ins) {
  if (ins.conj || ins.transposed) {
    ins.conj = !ins.conj;
  } else if (one_of(ins.gate, {"i", "x", "z", "h", "cx", "cz", "swap", "ry"})) {
    // real
  } else if (auto flipped = swap_dagger_name(ins.gate); !flipped.empty()) {
    ins.gate = flipped;
  } else if (one_of(ins.gate, {"rx", "rz"})) {
    ins.params[0] = -ins.params[0];
  } else {
    ins.conj = true;
  }
  return ins;
}

void require_ideal(const Circuit& c, const char* what) {
  if (!c.is_ideal()) throw InputError(std::string(what) + " requires a circuit without noise");
}

}  // namespace

GateMatrix Instruction::matrix() const {
  if (!is_gate()) throw InputError("noise placeholder has no gate matrix");
  Matrix m = builtin(gate, params).matrix();
  if (conj) m = m.conjugate().eval();
  if (transposed) m = m.transpose().eval();
  return GateMatrix(std::move(m));
}

std::string Instruction::display_name() const {
  if (conj && transposed) return gate + "^dg";
  if (conj) return gate + "^c";
  if (transposed) return gate + "^t";
  return gate;
}

Circuit::Circuit(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1) throw InputError("a circuit needs at least one qubit");
}

void Circuit::check_qubits(const std::vector<int>& qubits) const {
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i] < 0 || qubits[i] >= num_qubits_) {
      throw InputError("qubit index " + std::to_string(qubits[i]) + " out of range [0, " +
                       std::to_string(num_qubits_) + ")");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (qubits[i] == qubits[j]) {
        throw InputError("qubit " + std::to_string(qubits[i]) + " repeated in one instruction");
      }
    }
  }
}

Circuit& Circuit::append(Instruction ins) {
  check_qubits(ins.qubits);
  if (ins.is_gate()) {
    const int arity = builtin_arity(ins.gate);
    if (arity < 0) throw InputError("unknown gate '" + ins.gate + "'");
    if (static_cast<int>(ins.qubits.size()) != arity) {
      throw InputError("gate '" + ins.gate + "' acts on " + std::to_string(arity) +
                       " qubit(s), got " + std::to_string(ins.qubits.size()));
    }
    if (static_cast<int>(ins.params.size()) != builtin_param_count(ins.gate)) {
      throw InputError("wrong parameter count for gate '" + ins.gate + "'");
    }
  } else {
    if (ins.channel >= channels_.size()) throw InputError("unresolved noise channel reference");
    if (static_cast<int>(ins.qubits.size()) != channels_[ins.channel].arity) {
      throw InputError("noise channel arity does not match its qubit list");
    }
  }
  instructions_.push_back(std::move(ins));
  return *this;
}

Circuit& Circuit::add_gate(std::string_view name, std::vector<int> qubits,
                           std::vector<double> params) {
  Instruction ins;
  ins.kind = InstructionKind::gate;
  ins.gate.assign(name);
  std::transform(ins.gate.begin(), ins.gate.end(), ins.gate.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  ins.qubits = std::move(qubits);
  ins.params = std::move(params);
  return append(std::move(ins));
}

std::size_t Circuit::add_channel(const NoiseChannel& channel) {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i] == channel) return i;
  }
  channels_.push_back(channel);
  return channels_.size() - 1;
}

Circuit& Circuit::add_noise(const NoiseChannel& channel, int qubit) {
  Instruction ins;
  ins.kind = InstructionKind::noise;
  ins.channel = add_channel(channel);
  ins.qubits = {qubit};
  return append(std::move(ins));
}

bool Circuit::is_ideal() const noexcept { return noise_count() == 0; }

std::size_t Circuit::noise_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      instructions_.begin(), instructions_.end(), [](const Instruction& i) { return i.is_noise(); }));
}

std::size_t Circuit::gate_count() const noexcept { return instructions_.size() - noise_count(); }

std::uint64_t Circuit::kraus_term_count() const noexcept {
  std::uint64_t total = 1;
  for (const auto& ins : instructions_) {
    if (!ins.is_noise()) continue;
    const std::uint64_t n = channels_[ins.channel].kraus.size();
    if (total > std::numeric_limits<std::uint64_t>::max() / n) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= n;
  }
  return total;
}

Circuit adjoint_circuit(const Circuit& c) {
  require_ideal(c, "adjoint_circuit");
  Circuit out(c.num_qubits());
  const auto& ins = c.instructions();
  for (auto it = ins.rbegin(); it != ins.rend(); ++it) out.append(adjoint_of(*it));
  return out;
}

Circuit conjugate_circuit(const Circuit& c) {
  require_ideal(c, "conjugate_circuit");
  Circuit out(c.num_qubits());
  for (const auto& ins : c.instructions()) out.append(conjugate_of(ins));
  return out;
}

Circuit concatenate(const Circuit& first, const Circuit& second) {
  if (first.num_qubits() != second.num_qubits()) {
    throw InputError("cannot concatenate circuits with different qubit counts");
  }
  Circuit out = first;
  for (const auto& ins : second.instructions()) {
    if (ins.is_noise()) {
      out.add_noise(second.channel_of(ins), ins.qubits[0]);
    } else {
      out.append(ins);
    }
  }
  return out;
}

Circuit with_ancillas(const Circuit& c, int extra) {
  if (extra < 0) throw InputError("ancilla count must be non-negative");
  Circuit out(c.num_qubits() + extra);
  for (const auto& ch : c.channels()) out.add_channel(ch);
  for (const auto& ins : c.instructions()) out.append(ins);
  return out;
}

Circuit strip_noise(const Circuit& c) {
  Circuit out(c.num_qubits());
  for (const auto& ins : c.instructions()) {
    if (ins.is_gate()) out.append(ins);
  }
  return out;
}

Circuit gen_qft(int n) {
  if (n < 1) throw InputError("qft needs at least one qubit");
  Circuit c(n);
  for (int i = 0; i < n; ++i) {
    c.add_gate("h", {i});
    for (int j = i + 1; j < n; ++j) {
      const double theta = M_PI / std::ldexp(1.0, j - i);
      if (j - i == 1) {
        c.add_gate("cs", {j, i});
      } else {
        c.add_gate("rz", {j}, {theta / 2});
        c.add_gate("cx", {j, i});
        c.add_gate("rz", {i}, {-theta / 2});
        c.add_gate("cx", {j, i});
        c.add_gate("rz", {i}, {theta / 2});
      }
    }
  }
  for (int i = 0; i < n / 2; ++i) c.add_gate("swap", {i, n - 1 - i});
  return c;
}

Circuit gen_bv(int n, std::string_view secret) {
  if (n < 1) throw InputError("bv needs at least one qubit");
  if (secret.size() != static_cast<std::size_t>(n - 1)) {
    throw InputError("bv secret must have n-1 bits");
  }
  if (secret.find_first_not_of("01") != std::string_view::npos) {
    throw InputError("bv secret must be a bitstring");
  }
  Circuit c(n);
  for (int q = 0; q < n; ++q) c.add_gate("h", {q});
  for (int q = 0; q + 1 < n; ++q) {
    if (secret[static_cast<std::size_t>(q)] == '1') c.add_gate("cx", {q, n - 1});
  }
  for (int q = 0; q < n; ++q) c.add_gate("h", {q});
  return c;
}

Circuit gen_bv(int n) {
  if (n < 1) throw InputError("bv needs at least one qubit");
  return gen_bv(n, std::string(static_cast<std::size_t>(n - 1), '1'));
}

Circuit insert_noise(const Circuit& ideal, const std::vector<NoisePlacement>& spec) {
  require_ideal(ideal, "insert_noise");
  const auto len = ideal.instructions().size();

  std::vector<std::pair<NoisePlacement, NoiseChannel>> resolved;
  resolved.reserve(spec.size());
  for (const auto& place : spec) {
    if (place.after > len) {
      throw InputError("noise position " + std::to_string(place.after) + " out of range [0, " +
                       std::to_string(len) + "]");
    }
    if (place.qubit < 0 || place.qubit >= ideal.num_qubits()) {
      throw InputError("noise qubit " + std::to_string(place.qubit) + " out of range");
    }
    resolved.emplace_back(place, make_channel(place.channel, place.p));
  }
  std::stable_sort(resolved.begin(), resolved.end(),
                   [](const auto& a, const auto& b) { return a.first.after < b.first.after; });

  Circuit out(ideal.num_qubits());
  auto next = resolved.begin();
  for (std::size_t k = 0; k <= len; ++k) {
    for (; next != resolved.end() && next->first.after == k; ++next) {
      out.add_noise(next->second, next->first.qubit);
    }
    if (k < len) out.append(ideal.instructions()[k]);
  }
  return out;
}

std::vector<NoisePlacement> random_noise_spec(const Circuit& ideal, std::size_t count,
                                              std::string_view channel, double p,
                                              std::uint64_t seed) {
  parse_channel_kind(channel);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pos(0, ideal.instructions().size());
  std::uniform_int_distribution<int> qubit(0, ideal.num_qubits() - 1);
  std::vector<NoisePlacement> spec;
  for (std::size_t i = 0; i < count; ++i) {
    NoisePlacement np;
    np.after = pos(rng);
    np.qubit = qubit(rng);
    np.channel.assign(channel);
    np.p = p;
    spec.push_back(std::move(np));
  }
  std::stable_sort(spec.begin(), spec.end(),
                   [](const auto& a, const auto& b) { return a.after < b.after; });
  return spec;
}

}  // namespace noisyeq
