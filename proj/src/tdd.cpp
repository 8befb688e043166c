#include "noisyeq/tdd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "noisyeq/error.hpp"

namespace noisyeq::tdd {
namespace {

// Table keys round weights to 12 decimal digits; stored weights stay exact.
constexpr double kKeyScale = 1e12;
// Relative magnitude below which a weight is treated as an exact zero.
constexpr double kZeroTol = 1e-13;
// Relative slack when deciding which outgoing weight is the larger one.
constexpr double kTieTol = 1e-12;

std::int64_t key_of(double x) noexcept { return std::llround(x * kKeyScale); }

inline std::size_t mix(std::size_t h, std::uint64_t v) noexcept {
  v *= 0x9E3779B97F4A7C15ULL;
  v ^= v >> 32;
  return h ^ (static_cast<std::size_t>(v) + 0x9E3779B9U + (h << 6) + (h >> 2));
}

constexpr Edge kZero{};
constexpr Edge kOne{Complex{1.0, 0.0}, kTerminal};

}  // namespace

// --- IndexOrder -------------------------------------------------------------

IndexOrder::IndexOrder(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], static_cast<Level>(i)).second) {
      throw InputError("duplicate index label '" + labels_[i] + "' in order");
    }
  }
}

Level IndexOrder::level_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) throw InputError("index label '" + std::string(label) + "' not in order");
  return it->second;
}

// --- hashing ----------------------------------------------------------------

std::size_t Session::KeyHash::operator()(const UniqueKey& k) const noexcept {
  std::size_t h = static_cast<std::size_t>(k.level);
  h = mix(h, k.low);
  h = mix(h, k.high);
  h = mix(h, static_cast<std::uint64_t>(k.lr));
  h = mix(h, static_cast<std::uint64_t>(k.li));
  h = mix(h, static_cast<std::uint64_t>(k.hr));
  return mix(h, static_cast<std::uint64_t>(k.hi));
}

std::size_t Session::KeyHash::operator()(const AddKey& k) const noexcept {
  std::size_t h = mix(k.a, k.b);
  h = mix(h, static_cast<std::uint64_t>(k.re));
  return mix(h, static_cast<std::uint64_t>(k.im));
}

std::size_t Session::KeyHash::operator()(const ContKey& k) const noexcept {
  return mix(mix(k.a, k.b), k.sumset);
}

int Session::SumSet::count_less(Level x) const noexcept {
  return static_cast<int>(std::lower_bound(levels.begin(), levels.end(), x) - levels.begin());
}

bool Session::SumSet::contains(Level x) const noexcept {
  return std::binary_search(levels.begin(), levels.end(), x);
}

// --- Session ----------------------------------------------------------------

Session::Session(SessionConfig config) : config_(config) {
  nodes_.emplace_back();  // terminal
  nodes_[kTerminal].refs = 1;
  unique_.reserve(1 << 12);
}

void Session::retain(NodeId n) noexcept {
  if (n != kTerminal) ++nodes_[n].refs;
}

void Session::release(NodeId n) noexcept {
  if (n != kTerminal && nodes_[n].refs > 0) --nodes_[n].refs;
}

Edge Session::make_node(Level level, Edge low, Edge high) {
  if (low.is_zero()) low = kZero;
  if (high.is_zero()) high = kZero;
  if (low.is_zero() && high.is_zero()) return kZero;

  const double ml = std::abs(low.weight);
  const double mh = std::abs(high.weight);
  const Complex norm = (mh > ml * (1 + kTieTol)) ? high.weight : low.weight;
  low.weight /= norm;
  high.weight /= norm;
  if (std::abs(low.weight) < kZeroTol) low = kZero;
  if (std::abs(high.weight) < kZeroTol) high = kZero;

  UniqueKey key{level,
                low.node,
                high.node,
                key_of(low.weight.real()),
                key_of(low.weight.imag()),
                key_of(high.weight.real()),
                key_of(high.weight.imag())};

  // Identical successors: the node does not depend on this index.
  if (key.low == key.high && key.lr == key.hr && key.li == key.hi) {
    return Edge{norm * low.weight, low.node};
  }

  if (auto it = unique_.find(key); it != unique_.end()) return Edge{norm, it->second};

  NodeId id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else {
    id = static_cast<NodeId>(nodes_.size());
    nodes_.emplace_back();
  }
  Node& n = nodes_[id];
  n.level = level;
  n.low = low;
  n.high = high;
  n.refs = 0;
  unique_.emplace(key, id);
  return Edge{norm, id};
}

Edge Session::cofactor(NodeId n, Level x, int bit) const noexcept {
  const Node& node = nodes_[n];
  if (node.level != x) return Edge{Complex{1.0, 0.0}, n};
  return bit == 0 ? node.low : node.high;
}

Edge Session::add(Edge a, Edge b) { return add_rec(a, b); }

Edge Session::add_rec(Edge a, Edge b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.node == b.node) {
    const Complex w = a.weight + b.weight;
    if (std::abs(w) <= kZeroTol * std::max(std::abs(a.weight), std::abs(b.weight))) return kZero;
    return Edge{w, a.node};
  }

  const double ma = std::abs(a.weight);
  const double mb = std::abs(b.weight);
  if (mb > ma || (mb == ma && b.node < a.node)) std::swap(a, b);
  const Complex ratio = b.weight / a.weight;

  const AddKey key{a.node, b.node, key_of(ratio.real()), key_of(ratio.imag())};
  if (auto it = add_table_.find(key); it != add_table_.end()) {
    ++stats_.add_hits;
    return Edge{a.weight * it->second.weight, it->second.node};
  }
  ++stats_.add_misses;

  const Level x = std::min(level(a.node), level(b.node));
  Edge parts[2];
  for (int bit = 0; bit < 2; ++bit) {
    const Edge ca = cofactor(a.node, x, bit);
    Edge cb = cofactor(b.node, x, bit);
    cb.weight *= ratio;
    parts[bit] = add_rec(ca, cb);
  }
  const Edge r = make_node(x, parts[0], parts[1]);
  add_table_.emplace(key, r);
  return Edge{a.weight * r.weight, r.node};
}

const Session::SumSet& Session::intern(std::span<const Level> summed) {
  std::vector<Level> levels(summed.begin(), summed.end());
  auto it = sumsets_.find(levels);
  if (it == sumsets_.end()) {
    const auto id = static_cast<std::uint32_t>(sumsets_.size());
    it = sumsets_.emplace(levels, SumSet{id, levels}).first;
  }
  return it->second;
}

Edge Session::contract(Edge a, Edge b, std::span<const Level> summed) {
  if (a.is_zero() || b.is_zero()) return kZero;
  const SumSet& s = intern(summed);
  const Edge r = cont_rec(a.node, b.node, s);
  if (r.is_zero()) return kZero;
  const Level top = std::min(level(a.node), level(b.node));
  const double factor = std::ldexp(1.0, s.count_less(top));
  return Edge{a.weight * b.weight * r.weight * factor, r.node};
}

// Contraction of two unit-weight nodes summed over every summed level at or
// below their common top level; skipped summed levels contribute a factor 2
// each and are accounted for by the caller.
Edge Session::cont_rec(NodeId a, NodeId b, const SumSet& s) {
  if (a == kTerminal && b == kTerminal) return kOne;
  if (a > b) std::swap(a, b);

  const ContKey key{a, b, s.id};
  if (auto it = cont_table_.find(key); it != cont_table_.end()) {
    ++stats_.contract_hits;
    return it->second;
  }
  ++stats_.contract_misses;

  const Level x = std::min(level(a), level(b));
  const int below_x = s.count_less(x + 1);
  Edge parts[2];
  for (int bit = 0; bit < 2; ++bit) {
    const Edge ca = cofactor(a, x, bit);
    const Edge cb = cofactor(b, x, bit);
    if (ca.is_zero() || cb.is_zero()) continue;
    const Edge sub = cont_rec(ca.node, cb.node, s);
    if (sub.is_zero()) continue;
    const Level y = std::min(level(ca.node), level(cb.node));
    const double factor = std::ldexp(1.0, s.count_less(y) - below_x);
    parts[bit] = Edge{ca.weight * cb.weight * sub.weight * factor, sub.node};
  }

  const Edge r = s.contains(x) ? add_rec(parts[0], parts[1]) : make_node(x, parts[0], parts[1]);
  cont_table_.emplace(key, r);
  return r;
}

std::size_t Session::count_nodes(Edge root) const {
  if (root.node == kTerminal) return 0;
  ++stamp_;
  std::size_t count = 0;
  std::vector<NodeId> stack{root.node};
  nodes_[root.node].stamp = stamp_;
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    ++count;
    for (NodeId child : {nodes_[n].low.node, nodes_[n].high.node}) {
      if (child != kTerminal && nodes_[child].stamp != stamp_) {
        nodes_[child].stamp = stamp_;
        stack.push_back(child);
      }
    }
  }
  return count;
}

void Session::clear_computed_table() {
  add_table_.clear();
  cont_table_.clear();
}

void Session::collect_garbage() {
  ++stats_.gc_runs;
  clear_computed_table();

  ++stamp_;
  std::vector<NodeId> stack;
  for (NodeId n = 1; n < nodes_.size(); ++n) {
    if (nodes_[n].refs > 0 && nodes_[n].level != kTerminalLevel && nodes_[n].stamp != stamp_) {
      nodes_[n].stamp = stamp_;
      stack.push_back(n);
    }
  }
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    for (NodeId child : {nodes_[n].low.node, nodes_[n].high.node}) {
      if (child != kTerminal && nodes_[child].stamp != stamp_) {
        nodes_[child].stamp = stamp_;
        stack.push_back(child);
      }
    }
  }

  for (auto it = unique_.begin(); it != unique_.end();) {
    const NodeId n = it->second;
    if (nodes_[n].stamp != stamp_) {
      nodes_[n] = Node{};
      free_.push_back(n);
      it = unique_.erase(it);
    } else {
      ++it;
    }
  }

  if (unique_.size() > config_.gc_threshold / 2) config_.gc_threshold *= 2;
}

void Session::maybe_collect_garbage() {
  if (unique_.size() > config_.gc_threshold) collect_garbage();
}

// --- Tdd handle -------------------------------------------------------------

Tdd::Tdd(Session& session, Edge root, std::vector<Level> indices)
    : session_(&session), root_(root), indices_(std::move(indices)) {
  session_->retain(root_.node);
}

Tdd::Tdd(const Tdd& other)
    : session_(other.session_), root_(other.root_), indices_(other.indices_) {
  if (session_) session_->retain(root_.node);
}

Tdd::Tdd(Tdd&& other) noexcept
    : session_(std::exchange(other.session_, nullptr)),
      root_(other.root_),
      indices_(std::move(other.indices_)) {}

Tdd& Tdd::operator=(Tdd other) noexcept {
  swap(*this, other);
  return *this;
}

Tdd::~Tdd() {
  if (session_) session_->release(root_.node);
}

void swap(Tdd& a, Tdd& b) noexcept {
  using std::swap;
  swap(a.session_, b.session_);
  swap(a.root_, b.root_);
  swap(a.indices_, b.indices_);
}

// --- free functions ---------------------------------------------------------

namespace {

Session& session_of(const Tdd& t) {
  if (t.session() == nullptr) throw InputError("empty Tdd handle");
  return *t.session();
}

Session& common_session(const Tdd& a, const Tdd& b) {
  Session& s = session_of(a);
  if (&s != b.session()) throw InputError("Tdd operands belong to different sessions");
  return s;
}

}  // namespace

Tdd from_tensor(Session& s, std::span<const Complex> entries, std::span<const Level> levels) {
  const std::size_t k = levels.size();
  if (k >= 63 || entries.size() != (std::size_t{1} << k)) {
    throw InputError("tensor entry count does not match 2^(number of indices)");
  }
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return levels[a] < levels[b]; });
  for (std::size_t i = 1; i < k; ++i) {
    if (levels[perm[i]] == levels[perm[i - 1]]) throw InputError("repeated index in tensor");
  }

  s.maybe_collect_garbage();

  auto build = [&](auto&& self, std::size_t depth, std::size_t offset) -> Edge {
    if (depth == k) {
      const Complex v = entries[offset];
      return v == Complex{} ? Edge{} : Edge{v, kTerminal};
    }
    const std::size_t pos = perm[depth];
    const std::size_t stride = std::size_t{1} << (k - 1 - pos);
    const Edge lo = self(self, depth + 1, offset);
    const Edge hi = self(self, depth + 1, offset + stride);
    return s.make_node(levels[pos], lo, hi);
  };

  std::vector<Level> sorted(levels.begin(), levels.end());
  std::sort(sorted.begin(), sorted.end());
  Tdd out(s, build(build, 0, 0), std::move(sorted));
  s.note_size(s.count_nodes(out.root()));
  return out;
}

Tdd from_tensor(Session& s, std::span<const Complex> entries, std::span<const std::string> labels,
                const IndexOrder& order) {
  std::vector<Level> levels;
  levels.reserve(labels.size());
  for (const auto& l : labels) levels.push_back(order.level_of(l));
  return from_tensor(s, entries, levels);
}

Tdd add(const Tdd& a, const Tdd& b) {
  Session& s = common_session(a, b);
  s.maybe_collect_garbage();
  std::vector<Level> indices;
  std::set_union(a.indices().begin(), a.indices().end(), b.indices().begin(), b.indices().end(),
                 std::back_inserter(indices));
  Tdd out(s, s.add(a.root(), b.root()), std::move(indices));
  s.note_size(s.count_nodes(out.root()));
  return out;
}

Tdd contract(const Tdd& a, const Tdd& b, std::span<const Level> shared) {
  Session& s = common_session(a, b);
  std::vector<Level> summed(shared.begin(), shared.end());
  std::sort(summed.begin(), summed.end());
  summed.erase(std::unique(summed.begin(), summed.end()), summed.end());
  for (Level l : summed) {
    if (!std::binary_search(a.indices().begin(), a.indices().end(), l) ||
        !std::binary_search(b.indices().begin(), b.indices().end(), l)) {
      throw InputError("contracted index is not shared by both operands");
    }
  }
  s.maybe_collect_garbage();

  std::vector<Level> all;
  std::set_union(a.indices().begin(), a.indices().end(), b.indices().begin(), b.indices().end(),
                 std::back_inserter(all));
  std::vector<Level> remaining;
  std::set_difference(all.begin(), all.end(), summed.begin(), summed.end(),
                      std::back_inserter(remaining));

  Tdd out(s, s.contract(a.root(), b.root(), summed), std::move(remaining));
  s.note_size(s.count_nodes(out.root()));
  return out;
}

Tdd scale(const Tdd& t, Complex factor) {
  Session& s = session_of(t);
  Edge e = t.root();
  e.weight *= factor;
  if (std::abs(e.weight) == 0.0) e = Edge{};
  return Tdd(s, e, t.indices());
}

Complex scalar(const Tdd& t) {
  if (!t.is_scalar()) throw InputError("scalar() on a Tdd that still has open indices");
  return t.root().weight;
}

std::size_t node_count(const Tdd& t) { return session_of(t).count_nodes(t.root()); }

Complex evaluate(const Tdd& t, std::span<const int> bits) {
  const Session& s = session_of(t);
  if (bits.size() != t.indices().size()) throw InputError("assignment size mismatch");
  Edge e = t.root();
  Complex value = e.weight;
  while (e.node != kTerminal && value != Complex{}) {
    const Level l = s.level(e.node);
    const auto pos = std::lower_bound(t.indices().begin(), t.indices().end(), l) - t.indices().begin();
    if (static_cast<std::size_t>(pos) >= bits.size() || t.indices()[static_cast<std::size_t>(pos)] != l) {
      throw InputError("diagram depends on an index outside its index set");
    }
    e = bits[static_cast<std::size_t>(pos)] ? s.high(e.node) : s.low(e.node);
    value *= e.weight;
  }
  return value;
}

std::vector<Complex> to_dense(const Tdd& t) {
  const std::size_t k = t.indices().size();
  std::vector<Complex> out(std::size_t{1} << k);
  std::vector<int> bits(k);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    for (std::size_t j = 0; j < k; ++j) bits[j] = static_cast<int>((idx >> (k - 1 - j)) & 1U);
    out[idx] = evaluate(t, bits);
  }
  return out;
}

std::vector<std::string> validate(const Tdd& t) {
  const Session& s = session_of(t);
  std::vector<std::string> problems;
  std::vector<NodeId> stack;
  std::vector<NodeId> seen;
  if (t.root().node != kTerminal) stack.push_back(t.root().node);
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (std::find(seen.begin(), seen.end(), n) != seen.end()) continue;
    seen.push_back(n);
    const Edge lo = s.low(n);
    const Edge hi = s.high(n);
    const std::string where = "node " + std::to_string(n) + ": ";
    for (const Edge& e : {lo, hi}) {
      if (e.node != kTerminal && s.level(e.node) <= s.level(n)) problems.push_back(where + "unordered successor");
      if (e.is_zero() && e.node != kTerminal) problems.push_back(where + "zero edge to non-terminal");
      if (e.node != kTerminal) stack.push_back(e.node);
    }
    if (lo.is_zero() && hi.is_zero()) problems.push_back(where + "both successors zero");
    if (lo.node == hi.node && std::abs(lo.weight - hi.weight) < 1e-12) {
      problems.push_back(where + "redundant node");
    }
    const double ml = std::abs(lo.weight);
    const double mh = std::abs(hi.weight);
    const Complex big = (mh > ml * (1 + kTieTol)) ? hi.weight : lo.weight;
    if (std::abs(big - Complex{1.0, 0.0}) > 1e-12) problems.push_back(where + "not normalized");
    if (std::max(ml, mh) > 1 + 1e-9) problems.push_back(where + "weight exceeds 1");
  }
  return problems;
}

std::string to_dot(const Tdd& t, const IndexOrder* order) {
  const Session& s = session_of(t);
  std::ostringstream os;
  os << "digraph tdd {\n  root [shape=point];\n  n0 [shape=box,label=\"1\"];\n";
  os << "  root -> n" << t.root().node << " [label=\"" << t.root().weight << "\"];\n";
  std::vector<NodeId> stack;
  std::vector<NodeId> seen;
  if (t.root().node != kTerminal) stack.push_back(t.root().node);
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (std::find(seen.begin(), seen.end(), n) != seen.end()) continue;
    seen.push_back(n);
    const Level l = s.level(n);
    os << "  n" << n << " [label=\"" << (order ? order->label(l) : std::to_string(l)) << "\"];\n";
    const Edge lo = s.low(n);
    const Edge hi = s.high(n);
    if (!lo.is_zero()) os << "  n" << n << " -> n" << lo.node << " [style=dashed,label=\"" << lo.weight << "\"];\n";
    if (!hi.is_zero()) os << "  n" << n << " -> n" << hi.node << " [label=\"" << hi.weight << "\"];\n";
    for (const Edge& e : {lo, hi}) {
      if (!e.is_zero() && e.node != kTerminal) stack.push_back(e.node);
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace noisyeq::tdd
