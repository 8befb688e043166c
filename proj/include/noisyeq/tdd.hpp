#pragma once

// Tensor decision diagrams over binary indices.
//
// A TDD is an edge-weighted DAG. Every index has a level in a global order
// fixed before any diagram is built; non-terminal nodes branch on one level
// and their successors sit at strictly larger levels. Nodes are kept
// reduced and normalized (the larger-magnitude outgoing weight is exactly 1,
// the low edge wins ties) and are hash-consed through a unique table, so
// equal tensors over the same order share one root node. Scalars live in
// edge weights; the single terminal node stands for the value 1.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace noisyeq::tdd {

using Complex = std::complex<double>;
using Level = std::int32_t;
using NodeId = std::uint32_t;

inline constexpr NodeId kTerminal = 0;
inline constexpr Level kTerminalLevel = std::numeric_limits<Level>::max();

struct Edge {
  Complex weight{0.0, 0.0};
  NodeId node = kTerminal;

  bool is_zero() const noexcept { return weight == Complex{}; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Global total order over index labels. Position in the list is the level.
class IndexOrder {
 public:
  IndexOrder() = default;
  /// Throws InputError on duplicate labels.
  explicit IndexOrder(std::vector<std::string> labels);

  /// Throws InputError if the label is not part of the order.
  Level level_of(std::string_view label) const;
  bool contains(std::string_view label) const { return index_.count(std::string(label)) != 0; }
  const std::string& label(Level level) const { return labels_.at(static_cast<std::size_t>(level)); }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Level> index_;
};

struct SessionConfig {
  /// Live-node count above which the next top-level operation sweeps
  /// unreachable nodes (and clears the computed tables).
  std::size_t gc_threshold = std::size_t{1} << 20;
};

struct SessionStats {
  std::uint64_t add_hits = 0;
  std::uint64_t add_misses = 0;
  std::uint64_t contract_hits = 0;
  std::uint64_t contract_misses = 0;
  std::uint64_t gc_runs = 0;
};

/// Owns the node store, unique table and computed tables. Single-threaded;
/// diagrams from one session must not be mixed with another.
class Session {
 public:
  explicit Session(SessionConfig config = {});
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // Edge-level primitives. Edges returned here are only guaranteed to stay
  // valid until the next garbage collection unless wrapped in a Tdd.
  Edge make_node(Level level, Edge low, Edge high);
  Edge add(Edge a, Edge b);
  /// Product of `a` and `b` summed over `summed` (ascending, unique levels).
  Edge contract(Edge a, Edge b, std::span<const Level> summed);

  Level level(NodeId n) const noexcept { return nodes_[n].level; }
  Edge low(NodeId n) const noexcept { return nodes_[n].low; }
  Edge high(NodeId n) const noexcept { return nodes_[n].high; }

  /// Non-terminal nodes reachable from `root`.
  std::size_t count_nodes(Edge root) const;
  /// Nodes currently held in the unique table.
  std::size_t live_nodes() const noexcept { return unique_.size(); }

  void clear_computed_table();
  std::size_t computed_table_size() const noexcept { return add_table_.size() + cont_table_.size(); }
  void collect_garbage();
  void maybe_collect_garbage();

  /// Largest diagram (in nodes) recorded through note_size().
  std::size_t peak_nodes() const noexcept { return peak_nodes_; }
  void note_size(std::size_t nodes) noexcept {
    if (nodes > peak_nodes_) peak_nodes_ = nodes;
  }
  void reset_peak() noexcept { peak_nodes_ = 0; }

  const SessionStats& stats() const noexcept { return stats_; }

  void retain(NodeId n) noexcept;
  void release(NodeId n) noexcept;

 private:
  struct Node {
    Level level = kTerminalLevel;
    Edge low;
    Edge high;
    std::uint32_t refs = 0;
    mutable std::uint32_t stamp = 0;
  };

  struct UniqueKey {
    Level level;
    NodeId low, high;
    std::int64_t lr, li, hr, hi;
    friend bool operator==(const UniqueKey&, const UniqueKey&) = default;
  };
  struct AddKey {
    NodeId a, b;
    std::int64_t re, im;
    friend bool operator==(const AddKey&, const AddKey&) = default;
  };
  struct ContKey {
    NodeId a, b;
    std::uint32_t sumset;
    friend bool operator==(const ContKey&, const ContKey&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const UniqueKey& k) const noexcept;
    std::size_t operator()(const AddKey& k) const noexcept;
    std::size_t operator()(const ContKey& k) const noexcept;
  };

  struct SumSet {
    std::uint32_t id;
    std::vector<Level> levels;
    int count_less(Level x) const noexcept;
    bool contains(Level x) const noexcept;
  };

  Edge cofactor(NodeId n, Level x, int bit) const noexcept;
  Edge add_rec(Edge a, Edge b);
  Edge cont_rec(NodeId a, NodeId b, const SumSet& s);
  const SumSet& intern(std::span<const Level> summed);

  SessionConfig config_;
  std::vector<Node> nodes_;
  std::vector<NodeId> free_;
  std::unordered_map<UniqueKey, NodeId, KeyHash> unique_;
  std::unordered_map<AddKey, Edge, KeyHash> add_table_;
  std::unordered_map<ContKey, Edge, KeyHash> cont_table_;
  std::map<std::vector<Level>, SumSet> sumsets_;
  std::size_t peak_nodes_ = 0;
  mutable std::uint32_t stamp_ = 0;
  SessionStats stats_;
};

/// Owning handle to a diagram: a root edge plus the (sorted) levels of the
/// indices the tensor is defined over. Keeps its root alive across GC.
class Tdd {
 public:
  Tdd() = default;
  Tdd(Session& session, Edge root, std::vector<Level> indices);
  Tdd(const Tdd& other);
  Tdd(Tdd&& other) noexcept;
  Tdd& operator=(Tdd other) noexcept;
  ~Tdd();

  Session* session() const noexcept { return session_; }
  Edge root() const noexcept { return root_; }
  const std::vector<Level>& indices() const noexcept { return indices_; }
  bool is_scalar() const noexcept { return indices_.empty(); }

  friend void swap(Tdd& a, Tdd& b) noexcept;

 private:
  Session* session_ = nullptr;
  Edge root_;
  std::vector<Level> indices_;
};

/// Builds a diagram from a dense tensor stored row-major over `levels`
/// (first listed index most significant). Throws InputError on size mismatch
/// or repeated levels.
Tdd from_tensor(Session& s, std::span<const Complex> entries, std::span<const Level> levels);
/// Same, with labels resolved through `order`. Throws InputError on unknown labels.
Tdd from_tensor(Session& s, std::span<const Complex> entries, std::span<const std::string> labels,
                const IndexOrder& order);

/// Element-wise sum; indices missing from one side are broadcast.
Tdd add(const Tdd& a, const Tdd& b);
/// Σ over `shared` of a·b. `shared` must be indices of both operands.
Tdd contract(const Tdd& a, const Tdd& b, std::span<const Level> shared);
Tdd scale(const Tdd& t, Complex factor);

/// Root weight of a diagram with no indices. Throws InputError otherwise.
Complex scalar(const Tdd& t);
std::size_t node_count(const Tdd& t);
/// Entry at the assignment `bits`, aligned with t.indices().
Complex evaluate(const Tdd& t, std::span<const int> bits);
/// Row-major dense tensor over t.indices().
std::vector<Complex> to_dense(const Tdd& t);
/// Structural invariant violations (ordering, reduction, normalization); empty when valid.
std::vector<std::string> validate(const Tdd& t);
/// Graphviz rendering for debugging.
std::string to_dot(const Tdd& t, const IndexOrder* order = nullptr);

}  // namespace noisyeq::tdd
