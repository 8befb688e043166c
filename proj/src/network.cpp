#include "noisyeq/network.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "noisyeq/error.hpp"

namespace noisyeq {
namespace {

std::vector<Complex> row_major(const Matrix& m) {
  std::vector<Complex> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
    }
  }
  return out;
}

void rename_label(TensorNetwork& net, const std::string& from, const std::string& to) {
  for (auto& t : net.tensors) std::replace(t.labels.begin(), t.labels.end(), from, to);
  std::replace(net.inputs.begin(), net.inputs.end(), from, to);
  std::replace(net.outputs.begin(), net.outputs.end(), from, to);
}

// Removes an identity wire δ(x, y) from the network.
void apply_delta(TensorNetwork& net, const std::string& x, const std::string& y) {
  if (x == y) {
    net.scale *= 2.0;
  } else {
    rename_label(net, y, x);
  }
}

}  // namespace

Matrix NetTensor::matrix() const {
  const auto dim = Eigen::Index{1} << arity();
  if (labels.size() != 2 * arity() || data.size() != static_cast<std::size_t>(dim * dim)) {
    throw InputError("tensor '" + name + "' is not operator-shaped");
  }
  Matrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = data[static_cast<std::size_t>(r * dim + c)];
  }
  return m;
}

std::vector<std::string> TensorNetwork::open_indices() const {
  std::map<std::string, int> counts;
  for (const auto& t : tensors) {
    for (const auto& l : t.labels) ++counts[l];
  }
  for (const auto& l : inputs) counts.try_emplace(l, 0);
  for (const auto& l : outputs) counts.try_emplace(l, 0);
  std::vector<std::string> out;
  for (const auto& [label, n] : counts) {
    if (n < 2) out.push_back(label);
  }
  return out;
}

std::size_t TensorNetwork::count(TensorKind kind) const {
  return static_cast<std::size_t>(std::count_if(tensors.begin(), tensors.end(),
                                                [&](const NetTensor& t) { return t.kind == kind; }));
}

// --- builder ----------------------------------------------------------------

NetworkBuilder::NetworkBuilder(int num_wires, std::string prefix)
    : prefix_(std::move(prefix)), segment_(static_cast<std::size_t>(num_wires), 0) {
  if (num_wires < 1) throw InputError("a network needs at least one wire");
  net_.num_wires = num_wires;
  for (int w = 0; w < num_wires; ++w) net_.inputs.push_back(fresh(w));
  net_.outputs = net_.inputs;
}

NetworkBuilder::NetworkBuilder(TensorNetwork base, std::string prefix)
    : net_(std::move(base)),
      prefix_(std::move(prefix)),
      segment_(static_cast<std::size_t>(net_.num_wires), 0) {
  if (net_.is_closed()) throw InputError("cannot extend a closed network");
}

std::string NetworkBuilder::fresh(int wire) {
  return prefix_ + std::to_string(wire) + "_" + std::to_string(segment_[static_cast<std::size_t>(wire)]++);
}

void NetworkBuilder::append(const Matrix& op, std::vector<int> wires, TensorKind kind,
                            std::string name, int noise_slot) {
  const auto dim = Eigen::Index{1} << wires.size();
  if (op.rows() != dim || op.cols() != dim) throw InputError("operator size does not match its wires");
  NetTensor t;
  t.kind = kind;
  t.name = std::move(name);
  t.noise_slot = noise_slot;
  for (int w : wires) {
    if (w < 0 || w >= net_.num_wires) throw InputError("wire index out of range");
    t.labels.push_back(fresh(w));
  }
  for (int w : wires) t.labels.push_back(net_.outputs[static_cast<std::size_t>(w)]);
  for (std::size_t i = 0; i < wires.size(); ++i) {
    net_.outputs[static_cast<std::size_t>(wires[i])] = t.labels[i];
  }
  t.wires = std::move(wires);
  t.data = row_major(op);
  net_.tensors.push_back(std::move(t));
}

void NetworkBuilder::append_circuit(const Circuit& ideal, int offset) {
  for (const auto& ins : ideal.instructions()) {
    if (!ins.is_gate()) throw InputError("append_circuit expects an ideal circuit");
    std::vector<int> wires = ins.qubits;
    for (int& w : wires) w += offset;
    append(ins.matrix().matrix(), std::move(wires), TensorKind::gate, ins.display_name());
  }
}

void close_trace(TensorNetwork& net) {
  if (net.is_closed()) return;
  const auto inputs = net.inputs;
  const auto outputs = net.outputs;
  net.inputs.clear();
  net.outputs.clear();
  for (std::size_t w = 0; w < inputs.size(); ++w) {
    if (inputs[w] == outputs[w]) {
      net.scale *= 2.0;
    } else {
      rename_label(net, outputs[w], inputs[w]);
    }
  }
}

// --- circuit networks -------------------------------------------------------

TensorNetwork circuit_to_network(const Circuit& c, std::optional<std::vector<std::size_t>> kraus_choice) {
  const std::size_t m = c.noise_count();
  if (m > 0 && !kraus_choice) throw InputError("noisy circuit needs a Kraus choice per noise");
  if (kraus_choice && kraus_choice->size() != m) {
    throw InputError("expected " + std::to_string(m) + " Kraus choices, got " +
                     std::to_string(kraus_choice->size()));
  }

  NetworkBuilder b(c.num_qubits());
  int slot = 0;
  for (const auto& ins : c.instructions()) {
    if (ins.is_gate()) {
      b.append(ins.matrix().matrix(), ins.qubits, TensorKind::gate, ins.display_name());
      continue;
    }
    const auto& ch = c.channel_of(ins);
    const std::size_t j = (*kraus_choice)[static_cast<std::size_t>(slot)];
    if (j >= ch.kraus.size()) {
      throw InputError("Kraus choice " + std::to_string(j) + " out of range for " + ch.label());
    }
    b.append(ch.kraus[j], ins.qubits, TensorKind::noise, ch.label() + "[" + std::to_string(j) + "]",
             slot);
    ++slot;
  }
  return b.take();
}

void set_noise_operator(TensorNetwork& net, int slot, const Matrix& op) {
  for (auto& t : net.tensors) {
    if (t.noise_slot != slot) continue;
    const auto dim = Eigen::Index{1} << t.arity();
    if (op.rows() != dim || op.cols() != dim) throw InputError("noise operator has the wrong size");
    t.data = row_major(op);
  }
}

TensorNetwork build_trace_miter(const Circuit& ideal, const TensorNetwork& instance) {
  if (ideal.num_qubits() != instance.num_wires) {
    throw InputError("ideal and noisy circuits have different qubit counts");
  }
  NetworkBuilder b(instance, "u");
  b.append_circuit(adjoint_circuit(ideal));
  TensorNetwork net = b.take();
  close_trace(net);
  return net;
}

TensorNetwork build_doubled_miter(const Circuit& ideal, const Circuit& noisy) {
  if (ideal.num_qubits() != noisy.num_qubits()) {
    throw InputError("ideal and noisy circuits have different qubit counts");
  }
  const int n = ideal.num_qubits();
  NetworkBuilder b(2 * n);
  int slot = 0;
  for (const auto& ins : noisy.instructions()) {
    if (ins.is_gate()) {
      const Matrix m = ins.matrix().matrix();
      std::vector<int> primed = ins.qubits;
      for (int& q : primed) q += n;
      b.append(m, ins.qubits, TensorKind::gate, ins.display_name());
      b.append(m.conjugate(), std::move(primed), TensorKind::gate, ins.display_name() + "*");
      continue;
    }
    const auto& ch = noisy.channel_of(ins);
    b.append(matrix_rep(ch), {ins.qubits[0], ins.qubits[0] + n}, TensorKind::noise,
             "M_" + ch.label(), slot++);
  }
  b.append_circuit(adjoint_circuit(ideal), 0);
  b.append_circuit(adjoint_circuit(conjugate_circuit(ideal)), n);
  TensorNetwork net = b.take();
  close_trace(net);
  return net;
}

// --- local optimisation -----------------------------------------------------

TensorNetwork optimize(TensorNetwork net, const OptimizeOptions& options) {
  if (options.eliminate_swaps) {
    std::vector<NetTensor> swaps;
    std::vector<NetTensor> kept;
    for (auto& t : net.tensors) {
      (t.kind == TensorKind::gate && t.name == "swap" ? swaps : kept).push_back(std::move(t));
    }
    net.tensors = std::move(kept);
    // SWAP = δ(out_a, in_b) δ(out_b, in_a); labels are renamed as deltas are removed.
    for (std::size_t i = 0; i < swaps.size(); ++i) {
      const std::string out_a = swaps[i].labels[0];
      const std::string out_b = swaps[i].labels[1];
      const std::string in_a = swaps[i].labels[2];
      const std::string in_b = swaps[i].labels[3];
      apply_delta(net, out_a, in_b);
      // `in_b` may have been renamed to `out_a` (or the reverse) along with
      // every later SWAP that still references it.
      auto resolve = [&](const std::string& l) { return l == in_b ? out_a : l; };
      const std::string second_x = resolve(out_b);
      const std::string second_y = resolve(in_a);
      for (std::size_t j = i + 1; j < swaps.size(); ++j) {
        std::replace(swaps[j].labels.begin(), swaps[j].labels.end(), in_b, out_a);
      }
      apply_delta(net, second_x, second_y);
      for (std::size_t j = i + 1; j < swaps.size(); ++j) {
        std::replace(swaps[j].labels.begin(), swaps[j].labels.end(), second_y, second_x);
      }
    }
  }

  if (!options.cancel_inverses) return net;

  bool changed = true;
  while (changed) {
    changed = false;
    std::unordered_map<std::string, std::vector<std::size_t>> users;
    for (std::size_t i = 0; i < net.tensors.size(); ++i) {
      for (const auto& l : net.tensors[i].labels) users[l].push_back(i);
    }
    for (std::size_t ia = 0; ia < net.tensors.size() && !changed; ++ia) {
      const NetTensor& a = net.tensors[ia];
      if (a.kind != TensorKind::gate || a.labels.size() != 2 * a.arity()) continue;
      const std::size_t k = a.arity();
      for (std::size_t ib : users[a.labels[0]]) {
        if (ib == ia) continue;
        const NetTensor& b = net.tensors[ib];
        if (b.kind != TensorKind::gate || b.arity() != k || b.labels.size() != 2 * k) continue;
        bool adjacent = true;
        for (std::size_t w = 0; w < k; ++w) adjacent = adjacent && b.labels[k + w] == a.labels[w];
        if (!adjacent) continue;
        const auto dim = Eigen::Index{1} << k;
        const Matrix prod = b.matrix() * a.matrix();
        if ((prod - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > options.tolerance) continue;

        std::vector<std::pair<std::string, std::string>> deltas;
        for (std::size_t w = 0; w < k; ++w) deltas.emplace_back(a.labels[k + w], b.labels[w]);
        net.tensors.erase(net.tensors.begin() + static_cast<std::ptrdiff_t>(std::max(ia, ib)));
        net.tensors.erase(net.tensors.begin() + static_cast<std::ptrdiff_t>(std::min(ia, ib)));
        for (std::size_t d = 0; d < deltas.size(); ++d) {
          auto [x, y] = deltas[d];
          apply_delta(net, x, y);
          for (std::size_t e = d + 1; e < deltas.size(); ++e) {
            if (deltas[e].first == y) deltas[e].first = x;
            if (deltas[e].second == y) deltas[e].second = x;
          }
        }
        changed = true;
        break;
      }
    }
  }
  return net;
}

void trace_self_loops(TensorNetwork& net) {
  for (auto& t : net.tensors) {
    for (bool found = true; found;) {
      found = false;
      const std::size_t k = t.labels.size();
      for (std::size_t i = 0; i < k && !found; ++i) {
        for (std::size_t j = i + 1; j < k && !found; ++j) {
          if (t.labels[i] != t.labels[j]) continue;
          found = true;
          std::vector<Complex> reduced(std::size_t{1} << (k - 2));
          for (std::size_t idx = 0; idx < t.data.size(); ++idx) {
            const auto bi = (idx >> (k - 1 - i)) & 1U;
            const auto bj = (idx >> (k - 1 - j)) & 1U;
            if (bi != bj) continue;
            std::size_t out = 0;
            for (std::size_t p = 0; p < k; ++p) {
              if (p == i || p == j) continue;
              out = (out << 1) | ((idx >> (k - 1 - p)) & 1U);
            }
            reduced[out] += t.data[idx];
          }
          t.data = std::move(reduced);
          t.labels.erase(t.labels.begin() + static_cast<std::ptrdiff_t>(j));
          t.labels.erase(t.labels.begin() + static_cast<std::ptrdiff_t>(i));
          t.wires.clear();
        }
      }
    }
  }
}

// --- contraction ------------------------------------------------------------

std::vector<std::string> contraction_order(const TensorNetwork& net) {
  std::map<std::string, std::vector<std::size_t>> owners;
  for (std::size_t i = 0; i < net.tensors.size(); ++i) {
    for (const auto& l : net.tensors[i].labels) {
      auto& o = owners[l];
      if (std::find(o.begin(), o.end(), i) == o.end()) o.push_back(i);
    }
  }
  std::vector<std::string> names;
  std::unordered_map<std::string, int> id;
  for (const auto& [label, _] : owners) {
    id.emplace(label, static_cast<int>(names.size()));
    names.push_back(label);
  }
  const std::size_t v = names.size();
  std::vector<std::uint8_t> adj(v * v, 0);
  std::vector<std::vector<int>> nbrs(v);
  auto connect = [&](int a, int b) {
    if (a == b || adj[static_cast<std::size_t>(a) * v + static_cast<std::size_t>(b)]) return;
    adj[static_cast<std::size_t>(a) * v + static_cast<std::size_t>(b)] = 1;
    adj[static_cast<std::size_t>(b) * v + static_cast<std::size_t>(a)] = 1;
    nbrs[static_cast<std::size_t>(a)].push_back(b);
    nbrs[static_cast<std::size_t>(b)].push_back(a);
  };
  for (const auto& t : net.tensors) {
    for (std::size_t i = 0; i < t.labels.size(); ++i) {
      for (std::size_t j = i + 1; j < t.labels.size(); ++j) connect(id[t.labels[i]], id[t.labels[j]]);
    }
  }

  std::vector<char> candidate(v, 0);
  for (const auto& [label, o] : owners) {
    if (o.size() == 2) candidate[static_cast<std::size_t>(id[label])] = 1;
  }

  auto fill_of = [&](int x) {
    const auto& nb = nbrs[static_cast<std::size_t>(x)];
    long fill = 0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        if (!adj[static_cast<std::size_t>(nb[i]) * v + static_cast<std::size_t>(nb[j])]) ++fill;
      }
    }
    return fill;
  };
  std::vector<long> fill(v, 0);
  for (std::size_t x = 0; x < v; ++x) {
    if (candidate[x]) fill[x] = fill_of(static_cast<int>(x));
  }

  std::vector<std::string> order;
  std::vector<char> touched(v, 0);
  for (;;) {
    int best = -1;
    for (std::size_t x = 0; x < v; ++x) {
      if (candidate[x] && (best < 0 || fill[x] < fill[static_cast<std::size_t>(best)])) {
        best = static_cast<int>(x);
      }
    }
    if (best < 0) break;
    const auto b = static_cast<std::size_t>(best);
    candidate[b] = 0;
    order.push_back(names[b]);

    const std::vector<int> nb = nbrs[b];
    for (int u : nb) {
      auto& list = nbrs[static_cast<std::size_t>(u)];
      list.erase(std::find(list.begin(), list.end(), best));
      adj[static_cast<std::size_t>(u) * v + b] = 0;
      adj[b * v + static_cast<std::size_t>(u)] = 0;
    }
    nbrs[b].clear();
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) connect(nb[i], nb[j]);
    }

    std::vector<int> affected;
    for (int u : nb) {
      if (!touched[static_cast<std::size_t>(u)]) {
        touched[static_cast<std::size_t>(u)] = 1;
        affected.push_back(u);
      }
      for (int w : nbrs[static_cast<std::size_t>(u)]) {
        if (!touched[static_cast<std::size_t>(w)]) {
          touched[static_cast<std::size_t>(w)] = 1;
          affected.push_back(w);
        }
      }
    }
    for (int u : affected) {
      touched[static_cast<std::size_t>(u)] = 0;
      if (candidate[static_cast<std::size_t>(u)]) fill[static_cast<std::size_t>(u)] = fill_of(u);
    }
  }
  return order;
}

ContractionPlan plan_contraction(const TensorNetwork& net, const std::vector<std::string>& elimination) {
  std::map<std::string, int> counts;
  for (const auto& t : net.tensors) {
    std::vector<std::string> seen;
    for (const auto& l : t.labels) {
      if (std::find(seen.begin(), seen.end(), l) != seen.end()) {
        throw InputError("label '" + l + "' repeats on one tensor; trace self loops first");
      }
      seen.push_back(l);
      ++counts[l];
    }
  }

  std::vector<std::string> labels = elimination;
  std::vector<std::string> open;
  for (const auto& [label, n] : counts) {
    if (n > 2) throw InputError("label '" + label + "' is shared by more than two tensors");
    if (n == 1) open.push_back(label);
  }
  labels.insert(labels.end(), open.begin(), open.end());

  ContractionPlan plan;
  plan.order = tdd::IndexOrder(labels);
  for (const auto& [label, n] : counts) plan.order.level_of(label);  // every label must be ordered
  for (const auto& l : open) plan.open_levels.push_back(plan.order.level_of(l));

  std::vector<std::vector<tdd::Level>> slot_levels;
  std::unordered_map<tdd::Level, std::vector<std::size_t>> holders;
  for (std::size_t i = 0; i < net.tensors.size(); ++i) {
    std::vector<tdd::Level> lv;
    for (const auto& l : net.tensors[i].labels) lv.push_back(plan.order.level_of(l));
    plan.tensor_levels.push_back(lv);
    std::sort(lv.begin(), lv.end());
    for (auto l : lv) holders[l].push_back(i);
    slot_levels.push_back(std::move(lv));
  }
  std::vector<char> alive(slot_levels.size(), 1);

  for (const auto& label : elimination) {
    const tdd::Level l = plan.order.level_of(label);
    auto& h = holders[l];
    if (h.size() != 2) continue;  // already summed together with an earlier label
    const std::size_t a = h[0];
    const std::size_t b = h[1];
    std::vector<tdd::Level> summed;
    std::set_intersection(slot_levels[a].begin(), slot_levels[a].end(), slot_levels[b].begin(),
                          slot_levels[b].end(), std::back_inserter(summed));
    std::vector<tdd::Level> merged;
    std::set_symmetric_difference(slot_levels[a].begin(), slot_levels[a].end(),
                                  slot_levels[b].begin(), slot_levels[b].end(),
                                  std::back_inserter(merged));
    const std::size_t slot = slot_levels.size();
    for (auto s : summed) holders[s].clear();
    for (auto m : merged) {
      for (auto& x : holders[m]) {
        if (x == a || x == b) x = slot;
      }
    }
    plan.steps.push_back({a, b, std::move(summed)});
    slot_levels.push_back(std::move(merged));
    alive[a] = alive[b] = 0;
    alive.push_back(1);
  }
  for (const auto& [level, h] : holders) {
    if (h.size() == 2) throw InputError("elimination order misses label '" + plan.order.label(level) + "'");
  }
  for (std::size_t s = 0; s < alive.size(); ++s) {
    if (alive[s]) plan.results.push_back(s);
  }
  return plan;
}

tdd::Tdd execute_plan(const ContractionPlan& plan, const TensorNetwork& net, tdd::Session& session) {
  if (plan.tensor_levels.size() != net.tensors.size()) {
    throw InputError("contraction plan does not match the network");
  }
  std::vector<tdd::Tdd> slots(net.tensors.size() + plan.steps.size());
  for (std::size_t i = 0; i < net.tensors.size(); ++i) {
    slots[i] = tdd::from_tensor(session, net.tensors[i].data, plan.tensor_levels[i]);
  }
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    slots[net.tensors.size() + i] = tdd::contract(slots[step.a], slots[step.b], step.summed);
    slots[step.a] = tdd::Tdd();
    slots[step.b] = tdd::Tdd();
  }

  tdd::Tdd result(session, tdd::Edge{net.scale, tdd::kTerminal}, {});
  for (std::size_t r : plan.results) result = tdd::contract(result, slots[r], {});
  return result;
}

tdd::Tdd contract_network(TensorNetwork net, tdd::Session& session) {
  trace_self_loops(net);
  const auto order = contraction_order(net);
  const auto plan = plan_contraction(net, order);
  return execute_plan(plan, net, session);
}

Complex trace_value(const TensorNetwork& net, tdd::Session& session) {
  if (!net.is_closed()) throw InputError("trace_value needs a closed network");
  return tdd::scalar(contract_network(net, session));
}

}  // namespace noisyeq
