#include "noisyeq/fidelity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "noisyeq/error.hpp"
#include "noisyeq/network.hpp"
#include "noisyeq/tdd.hpp"

namespace noisyeq {
namespace {

constexpr std::uint64_t kMaxIndividualTerms = std::uint64_t{1} << 31;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_widths(const Circuit& ideal, const Circuit& noisy) {
  if (ideal.num_qubits() != noisy.num_qubits()) {
    throw InputError("qubit count mismatch: ideal has " + std::to_string(ideal.num_qubits()) +
                     ", noisy has " + std::to_string(noisy.num_qubits()));
  }
  if (!ideal.is_ideal()) throw InputError("the ideal circuit contains noise");
}

void finish(FidelityReport& r, double raw, std::optional<double> epsilon) {
  r.raw_fj = raw;
  r.fj = std::clamp(raw, 0.0, 1.0);
  if (raw > 1.0 + 1e-9 || raw < -1e-9) {
    r.warnings.push_back("fidelity " + std::to_string(raw) + " outside [0, 1], clamped");
  }
  if (!epsilon) return;
  if (r.is_lower_bound) {
    r.verdict = Verdict::equivalent_by_bound;
  } else {
    r.verdict = r.fj > 1.0 - *epsilon ? Verdict::equivalent : Verdict::not_equivalent;
  }
}

// The Fig.-4-style trace miter for one Kraus choice, plus everything that can
// be reused across choices.
struct TraceTemplate {
  TensorNetwork net;
  ContractionPlan plan;
  std::vector<const NoiseChannel*> slots;
};

TraceTemplate make_template(const Circuit& ideal, const Circuit& noisy, const FidelityOptions& opt) {
  TraceTemplate t;
  std::vector<std::size_t> zeros(noisy.noise_count(), 0);
  for (const auto& ins : noisy.instructions()) {
    if (ins.is_noise()) t.slots.push_back(&noisy.channel_of(ins));
  }
  t.net = build_trace_miter(ideal, circuit_to_network(noisy, zeros));
  if (opt.optimize) t.net = optimize(std::move(t.net));
  TensorNetwork traced = t.net;
  trace_self_loops(traced);
  t.plan = plan_contraction(traced, contraction_order(traced));
  return t;
}

Complex trace_term(const TraceTemplate& t, const std::vector<std::size_t>& choice, tdd::Session& s) {
  TensorNetwork net = t.net;
  for (std::size_t k = 0; k < choice.size(); ++k) {
    set_noise_operator(net, static_cast<int>(k), t.slots[k]->kraus[choice[k]]);
  }
  trace_self_loops(net);
  return tdd::scalar(execute_plan(t.plan, net, s));
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::automatic: return "auto";
    case Algorithm::individual: return "individual";
    case Algorithm::collective: return "collective";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::equivalent: return "equivalent";
    case Verdict::not_equivalent: return "not_equivalent";
    case Verdict::equivalent_by_bound: return "equivalent_by_bound";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "auto") return Algorithm::automatic;
  if (name == "individual") return Algorithm::individual;
  if (name == "collective") return Algorithm::collective;
  throw InputError("unknown algorithm '" + std::string(name) + "'");
}

// --- Kraus enumeration ------------------------------------------------------

std::vector<std::vector<double>> KrausEnumerator::weights_of(const Circuit& noisy) {
  std::vector<std::vector<double>> out;
  for (const auto& ins : noisy.instructions()) {
    if (!ins.is_noise()) continue;
    std::vector<double> w;
    for (const auto& k : noisy.channel_of(ins).kraus) w.push_back(kraus_weight(k));
    out.push_back(std::move(w));
  }
  return out;
}

KrausEnumerator::KrausEnumerator(const Circuit& noisy, KrausOrder order)
    : KrausEnumerator(weights_of(noisy), order) {}

KrausEnumerator::KrausEnumerator(std::vector<std::vector<double>> weights, KrausOrder order)
    : order_(order), weights_(std::move(weights)) {
  for (const auto& w : weights_) {
    if (w.empty()) throw InputError("noise with no Kraus operators");
    total_ = total_ > UINT64_MAX / w.size() ? UINT64_MAX : total_ * w.size();
    std::vector<std::size_t> idx(w.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    by_rank_.push_back(std::move(idx));
  }
}

bool KrausEnumerator::Cmp::operator()(const Item& a, const Item& b) const {
  // Max-heap on weight; among equal weights the smallest rank tuple comes first.
  if (a.weight != b.weight) return a.weight < b.weight;
  return a.ranks > b.ranks;
}

double KrausEnumerator::weight_of(const std::vector<std::size_t>& ranks) const {
  double w = 1.0;
  for (std::size_t k = 0; k < ranks.size(); ++k) w *= weights_[k][by_rank_[k][ranks[k]]];
  return w;
}

std::vector<std::size_t> KrausEnumerator::to_choice(const std::vector<std::size_t>& ranks) const {
  std::vector<std::size_t> c(ranks.size());
  for (std::size_t k = 0; k < ranks.size(); ++k) c[k] = by_rank_[k][ranks[k]];
  return c;
}

std::optional<std::vector<std::size_t>> KrausEnumerator::next() {
  const std::size_t m = weights_.size();
  if (order_ == KrausOrder::lexicographic) {
    if (!started_) {
      started_ = true;
      odometer_ = std::vector<std::size_t>(m, 0);
      return odometer_;
    }
    if (!odometer_) return std::nullopt;
    auto& c = *odometer_;
    std::size_t k = m;
    while (k > 0) {
      --k;
      if (++c[k] < weights_[k].size()) return c;
      c[k] = 0;
    }
    odometer_.reset();
    return std::nullopt;
  }

  if (!started_) {
    started_ = true;
    std::vector<std::size_t> zero(m, 0);
    heap_.push_back({weight_of(zero), std::move(zero), 0});
  }
  if (heap_.empty()) return std::nullopt;
  std::pop_heap(heap_.begin(), heap_.end(), Cmp{});
  Item top = std::move(heap_.back());
  heap_.pop_back();
  // Each tuple has exactly one parent: the tuple with its last raised
  // coordinate lowered by one.
  for (std::size_t k = top.last; k < m; ++k) {
    if (top.ranks[k] + 1 >= weights_[k].size()) continue;
    Item child{0.0, top.ranks, k};
    ++child.ranks[k];
    child.weight = weight_of(child.ranks);
    heap_.push_back(std::move(child));
    std::push_heap(heap_.begin(), heap_.end(), Cmp{});
  }
  return to_choice(top.ranks);
}

// --- algorithms -------------------------------------------------------------

FidelityReport fidelity_individual(const Circuit& ideal, const Circuit& noisy,
                                   std::optional<double> early_exit, const FidelityOptions& options) {
  const auto start = Clock::now();
  check_widths(ideal, noisy);
  FidelityReport r;
  r.algorithm = Algorithm::individual;
  r.total_terms = noisy.kraus_term_count();
  if (r.total_terms > kMaxIndividualTerms) {
    throw InputError("noisy circuit has " + std::to_string(r.total_terms) +
                     " Kraus terms; use the collective algorithm");
  }

  const double d2 = std::ldexp(1.0, 2 * ideal.num_qubits());
  const TraceTemplate tpl = make_template(ideal, noisy, options);
  KrausEnumerator terms(noisy, options.kraus_order);
  const tdd::SessionConfig cfg{options.gc_threshold};

  double partial = 0.0;
  bool stopped = false;
  // Returns true when the early-exit threshold has been crossed.
  auto consume = [&](Complex tr) {
    ++r.terms_evaluated;
    partial += std::norm(tr);
    if (options.record_traces) r.per_term_traces.push_back(tr);
    return early_exit && partial / d2 > 1.0 - *early_exit;
  };

  if (options.workers <= 1) {
    std::optional<tdd::Session> shared;
    if (options.share_computed_table) shared.emplace(cfg);
    while (auto choice = terms.next()) {
      Complex tr;
      if (shared) {
        tr = trace_term(tpl, *choice, *shared);
      } else {
        tdd::Session cold(cfg);
        tr = trace_term(tpl, *choice, cold);
        r.peak_nodes = std::max(r.peak_nodes, cold.peak_nodes());
      }
      if (consume(tr)) {
        stopped = true;
        break;
      }
    }
    if (shared) r.peak_nodes = std::max(r.peak_nodes, shared->peak_nodes());
  } else {
    std::mutex mu;
    std::condition_variable cv;
    std::map<std::uint64_t, Complex> done;
    std::uint64_t issued = 0;
    bool exhausted = false;
    bool stop = false;
    std::exception_ptr failure;

    auto worker = [&] {
      tdd::Session session(cfg);
      for (;;) {
        std::vector<std::size_t> choice;
        std::uint64_t seq = 0;
        {
          std::lock_guard lock(mu);
          if (stop || exhausted) break;
          auto c = terms.next();
          if (!c) {
            exhausted = true;
            cv.notify_all();
            break;
          }
          choice = std::move(*c);
          seq = issued++;
        }
        try {
          const Complex tr = trace_term(tpl, choice, session);
          std::lock_guard lock(mu);
          done.emplace(seq, tr);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          stop = true;
        }
        cv.notify_all();
      }
      std::lock_guard lock(mu);
      r.peak_nodes = std::max(r.peak_nodes, session.peak_nodes());
    };

    std::vector<std::thread> pool;
    for (unsigned i = 0; i < options.workers; ++i) pool.emplace_back(worker);
    {
      std::unique_lock lock(mu);
      for (std::uint64_t seq = 0;; ++seq) {
        cv.wait(lock, [&] { return done.count(seq) || failure || (exhausted && seq >= issued); });
        if (failure || !done.count(seq)) break;
        const Complex tr = done[seq];
        done.erase(seq);
        if (consume(tr)) {
          stopped = true;
          stop = true;
          break;
        }
      }
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  r.is_lower_bound = stopped && r.terms_evaluated < r.total_terms;
  finish(r, partial / d2, early_exit);
  r.wall_time_s = seconds_since(start);
  return r;
}

FidelityReport fidelity_collective(const Circuit& ideal, const Circuit& noisy,
                                   const FidelityOptions& options) {
  const auto start = Clock::now();
  check_widths(ideal, noisy);
  FidelityReport r;
  r.algorithm = Algorithm::collective;
  r.total_terms = noisy.kraus_term_count();

  TensorNetwork net = build_doubled_miter(ideal, noisy);
  if (options.optimize) net = optimize(std::move(net));
  tdd::Session session(tdd::SessionConfig{options.gc_threshold});
  const Complex s = trace_value(net, session);
  if (std::abs(s.imag()) >= 1e-9 * std::max(1.0, std::abs(s))) {
    throw InternalCheckError("doubled miter scalar has imaginary part " + std::to_string(s.imag()));
  }
  r.collective_scalar = s;
  r.terms_evaluated = r.total_terms;
  r.peak_nodes = session.peak_nodes();
  finish(r, s.real() / std::ldexp(1.0, 2 * ideal.num_qubits()), std::nullopt);
  r.wall_time_s = seconds_since(start);
  return r;
}

FidelityReport check_equivalence(const Circuit& ideal, const Circuit& noisy, double epsilon,
                                 Algorithm algorithm, const FidelityOptions& options) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InputError("epsilon must lie in [0, 1]");
  if (algorithm == Algorithm::automatic) {
    algorithm = noisy.kraus_term_count() <= options.auto_threshold ? Algorithm::individual
                                                                   : Algorithm::collective;
  }
  if (algorithm == Algorithm::individual) return fidelity_individual(ideal, noisy, epsilon, options);
  FidelityReport r = fidelity_collective(ideal, noisy, options);
  r.verdict = r.fj > 1.0 - epsilon ? Verdict::equivalent : Verdict::not_equivalent;
  return r;
}

double average_fidelity(double fj, double d) { return (d * fj + 1.0) / (d + 1.0); }

double cj_metric(double fj) { return std::sqrt(std::max(0.0, 1.0 - fj)); }

}  // namespace noisyeq
