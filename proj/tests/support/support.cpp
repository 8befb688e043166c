#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "noisyeq/gates.hpp"

namespace testsupport {
namespace {

const std::vector<std::string> kGates = {"i", "x",  "y",  "z",  "h",  "s",  "sdg", "t",
                                         "tdg", "rx", "ry", "rz", "cx", "cz", "cs", "swap"};

std::size_t index_of(const std::vector<std::string>& v, const std::string& s) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
}

DenseTensor pair(const DenseTensor& a, const DenseTensor& b) {
  std::vector<std::string> shared, out;
  for (const auto& l : a.labels) {
    (std::count(b.labels.begin(), b.labels.end(), l) ? shared : out).push_back(l);
  }
  for (const auto& l : b.labels) {
    if (!std::count(a.labels.begin(), a.labels.end(), l)) out.push_back(l);
  }
  DenseTensor r{out, std::vector<Complex>(std::size_t{1} << out.size())};
  const std::size_t ka = a.labels.size(), kb = b.labels.size();
  for (std::size_t ia = 0; ia < a.data.size(); ++ia) {
    if (a.data[ia] == Complex{}) continue;
    for (std::size_t ib = 0; ib < b.data.size(); ++ib) {
      bool ok = true;
      for (const auto& l : shared) {
        const auto pa = index_of(a.labels, l), pb = index_of(b.labels, l);
        if (((ia >> (ka - 1 - pa)) & 1) != ((ib >> (kb - 1 - pb)) & 1)) ok = false;
      }
      if (!ok) continue;
      std::size_t o = 0;
      for (const auto& l : out) {
        const auto pa = index_of(a.labels, l);
        const std::size_t bit = pa < ka ? (ia >> (ka - 1 - pa)) & 1
                                        : (ib >> (kb - 1 - index_of(b.labels, l))) & 1;
        o = (o << 1) | bit;
      }
      r.data[o] += a.data[ia] * b.data[ib];
    }
  }
  return r;
}

// Sums repeated labels on one tensor.
DenseTensor self_trace(DenseTensor t) {
  for (;;) {
    std::size_t i = 0, j = 0;
    bool found = false;
    for (i = 0; i < t.labels.size() && !found; ++i) {
      for (j = i + 1; j < t.labels.size(); ++j) {
        if (t.labels[i] == t.labels[j]) {
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (!found) return t;
    const std::size_t k = t.labels.size();
    DenseTensor r;
    for (std::size_t p = 0; p < k; ++p) {
      if (p != i && p != j) r.labels.push_back(t.labels[p]);
    }
    r.data.assign(std::size_t{1} << r.labels.size(), Complex{});
    for (std::size_t idx = 0; idx < t.data.size(); ++idx) {
      if (((idx >> (k - 1 - i)) & 1) != ((idx >> (k - 1 - j)) & 1)) continue;
      std::size_t o = 0;
      for (std::size_t p = 0; p < k; ++p) {
        if (p != i && p != j) o = (o << 1) | ((idx >> (k - 1 - p)) & 1);
      }
      r.data[o] += t.data[idx];
    }
    t = std::move(r);
  }
}

}  // namespace

Circuit random_circuit(int n, int gates, std::mt19937_64& rng) {
  Circuit c(n);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  while (static_cast<int>(c.gate_count()) < gates) {
    const std::string& g = kGates[std::uniform_int_distribution<std::size_t>(0, kGates.size() - 1)(rng)];
    const int arity = noisyeq::builtin_arity(g);
    if (arity > n) continue;
    std::vector<int> q;
    while (static_cast<int>(q.size()) < arity) {
      const int x = std::uniform_int_distribution<int>(0, n - 1)(rng);
      if (std::find(q.begin(), q.end(), x) == q.end()) q.push_back(x);
    }
    std::vector<double> params;
    for (int k = 0; k < noisyeq::builtin_param_count(g); ++k) params.push_back(angle(rng));
    c.add_gate(g, q, params);
  }
  return c;
}

Circuit random_noisy(const Circuit& ideal, int noises, const std::string& channel, double p,
                     std::mt19937_64& rng) {
  return noisyeq::insert_noise(
      ideal, noisyeq::random_noise_spec(ideal, static_cast<std::size_t>(noises), channel, p, rng()));
}

DenseTensor dense_contract(const noisyeq::TensorNetwork& net) {
  DenseTensor acc{{}, {net.scale}};
  for (const auto& t : net.tensors) acc = self_trace(pair(acc, self_trace({t.labels, t.data})));
  std::vector<std::string> sorted = acc.labels;
  std::sort(sorted.begin(), sorted.end());
  return permute(acc, sorted);
}

DenseTensor permute(const DenseTensor& t, const std::vector<std::string>& labels) {
  if (labels.size() != t.labels.size()) throw std::invalid_argument("label count mismatch");
  const std::size_t k = labels.size();
  DenseTensor r{labels, std::vector<Complex>(t.data.size())};
  for (std::size_t idx = 0; idx < t.data.size(); ++idx) {
    std::size_t o = 0;
    for (std::size_t p = 0; p < k; ++p) {
      const auto src = index_of(t.labels, labels[p]);
      if (src == k) throw std::invalid_argument("unknown label " + labels[p]);
      o = (o << 1) | ((idx >> (k - 1 - src)) & 1);
    }
    r.data[o] = t.data[idx];
  }
  return r;
}

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testsupport
