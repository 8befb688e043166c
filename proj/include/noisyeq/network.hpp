#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisyeq/circuit.hpp"
#include "noisyeq/gates.hpp"
#include "noisyeq/tdd.hpp"

namespace noisyeq {

enum class TensorKind { gate, noise };

/// A gate-shaped tensor: `labels` holds one output label per wire followed by
/// one input label per wire, and `data` is the 2^k x 2^k operator stored
/// row-major (rows are outputs).
struct NetTensor {
  TensorKind kind = TensorKind::gate;
  std::string name;
  std::vector<int> wires;
  std::vector<std::string> labels;
  std::vector<Complex> data;
  /// Index of the source circuit's noise placeholder this tensor realises, or -1.
  int noise_slot = -1;

  std::size_t arity() const noexcept { return wires.size(); }
  Matrix matrix() const;
};

/// Tensors joined by shared labels; each label appears on at most two tensors.
/// While open, `inputs`/`outputs` hold the boundary label of every wire.
struct TensorNetwork {
  int num_wires = 0;
  std::vector<NetTensor> tensors;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  /// Constant factor from wire loops that carry no tensor.
  Complex scale{1.0, 0.0};

  bool is_closed() const noexcept { return inputs.empty() && outputs.empty(); }
  std::vector<std::string> open_indices() const;
  std::size_t count(TensorKind kind) const;
};

/// Appends operators wire by wire, creating a fresh label for every new
/// wire segment. Labels are `<prefix><wire>_<segment>`.
class NetworkBuilder {
 public:
  NetworkBuilder(int num_wires, std::string prefix = "q");
  /// Continue after `base`, starting from its output labels.
  NetworkBuilder(TensorNetwork base, std::string prefix);

  void append(const Matrix& op, std::vector<int> wires, TensorKind kind, std::string name,
              int noise_slot = -1);
  /// Appends every gate of an ideal circuit with its wires shifted by `offset`.
  void append_circuit(const Circuit& ideal, int offset = 0);

  TensorNetwork take() { return std::move(net_); }

 private:
  std::string fresh(int wire);

  TensorNetwork net_;
  std::string prefix_;
  std::vector<int> segment_;
};

/// Connects each wire's output back to its input. A wire without tensors
/// becomes a free loop and multiplies `scale` by 2.
void close_trace(TensorNetwork& net);

/// One tensor per instruction. Noise placeholders are replaced by the Kraus
/// operator `kraus_choice[k]` of the k-th placeholder. Throws InputError when
/// the choice list does not match the placeholders.
TensorNetwork circuit_to_network(const Circuit& c,
                                 std::optional<std::vector<std::size_t>> kraus_choice = std::nullopt);

/// Overwrites the operator of every tensor realising noise placeholder `slot`.
void set_noise_operator(TensorNetwork& net, int slot, const Matrix& op);

/// `instance` followed by ideal† with the trace closed; contracts to tr(U† E_i).
TensorNetwork build_trace_miter(const Circuit& ideal, const TensorNetwork& instance);

/// 2n-wire network whose contraction is tr((U† ⊗ Uᵀ) M_E) = Σ_i |tr(U† E_i)|².
TensorNetwork build_doubled_miter(const Circuit& ideal, const Circuit& noisy);

struct OptimizeOptions {
  bool eliminate_swaps = true;
  bool cancel_inverses = true;
  double tolerance = 1e-12;
};

/// Removes SWAP tensors by rerouting labels and cancels directly connected
/// gate pairs whose product is the identity. Noise tensors are never touched.
/// The contracted value is unchanged.
TensorNetwork optimize(TensorNetwork net, const OptimizeOptions& options = {});

/// Sums out labels that occur twice on the same tensor (dense partial trace).
void trace_self_loops(TensorNetwork& net);

/// Greedy min-fill elimination order over the labels shared by two tensors,
/// ties broken by lexicographic label order.
std::vector<std::string> contraction_order(const TensorNetwork& net);

/// Precomputed pairwise merge schedule for a network structure. Reusable for
/// any network with the same labels (e.g. different Kraus operators).
struct ContractionPlan {
  struct Step {
    std::size_t a, b;
    std::vector<tdd::Level> summed;
  };
  tdd::IndexOrder order;
  std::vector<std::vector<tdd::Level>> tensor_levels;
  std::vector<Step> steps;  // step i writes slot tensors.size() + i
  std::vector<std::size_t> results;
  std::vector<tdd::Level> open_levels;
};

/// `elimination` must cover every shared label. Requires no self loops.
ContractionPlan plan_contraction(const TensorNetwork& net,
                                 const std::vector<std::string>& elimination);

tdd::Tdd execute_plan(const ContractionPlan& plan, const TensorNetwork& net, tdd::Session& session);

/// Order, plan and contract in one go. Open labels stay as result indices.
tdd::Tdd contract_network(TensorNetwork net, tdd::Session& session);

/// Full contraction of a closed network.
Complex trace_value(const TensorNetwork& net, tdd::Session& session);

}  // namespace noisyeq
