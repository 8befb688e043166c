// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "noisyeq/cli.hpp"
#include "noisyeq/fidelity.hpp"
#include "noisyeq/network.hpp"
#include "noisyeq/oracle.hpp"
#include "support/support.hpp"

using namespace noisyeq;

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Circuit fig2(double p) {
  return insert_noise(gen_qft(2), {{1, 1, "bit_flip", p}, {2, 0, "phase_flip", p}});
}

// Smallest per-call time of `f`, repeating until at least `budget` seconds were spent.
double min_time(const std::function<void()>& f, double budget = 0.2, int min_reps = 5) {
  double best = INFINITY;
  double total = 0.0;
  for (int rep = 0; rep < min_reps || total < budget; ++rep) {
    const auto t0 = Clock::now();
    f();
    const double t = seconds(t0);
    best = std::min(best, t);
    total += t;
  }
  return best;
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome ac1() {
  const auto t0 = Clock::now();
  double worst_fj = 0.0, worst_scalar = 0.0;
  for (double p : {0.5, 0.95, 0.999}) {
    const auto ind = fidelity_individual(gen_qft(2), fig2(p));
    const auto col = fidelity_collective(gen_qft(2), fig2(p));
    worst_fj = std::max({worst_fj, std::abs(ind.fj - p * p), std::abs(col.fj - p * p)});
    worst_scalar = std::max(worst_scalar, std::abs(*col.collective_scalar - Complex(16 * p * p)));
  }
  const double t = seconds(t0);
  std::ostringstream d;
  d << "max |fj-p^2|=" << worst_fj << " max |scalar-16p^2|=" << worst_scalar << " time=" << t << "s";
  return {worst_fj < 1e-10 && worst_scalar < 1e-9 && t < 1.0, d.str()};
}

Outcome ac2() {
  const auto r = fidelity_individual(gen_qft(2), fig2(0.95), 0.1);
  std::ostringstream d;
  d << "verdict=" << (r.verdict ? to_string(*r.verdict) : "none") << " terms=" << r.terms_evaluated << "/"
    << r.total_terms << " bound=" << r.fj;
  const bool ok = r.verdict == Verdict::equivalent_by_bound && r.is_lower_bound && r.terms_evaluated == 1 &&
                  r.total_terms == 4 && std::abs(r.fj - 0.9025) <= 1e-12;
  return {ok, d.str()};
}

Outcome ac3() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = std::uniform_int_distribution<int>(2, 5)(rng);
    const int gates = std::uniform_int_distribution<int>(1, 20)(rng);
    const int noises = std::uniform_int_distribution<int>(0, 3)(rng);
    const Circuit ideal = testsupport::random_circuit(n, gates, rng);
    const Circuit noisy = testsupport::random_noisy(ideal, noises, "depolarizing", 0.999, rng);
    const double a = fidelity_individual(ideal, noisy).fj;
    const double b = fidelity_collective(ideal, noisy).fj;
    const double c = oracle::jamiolkowski_fidelity_dense(ideal, noisy);
    worst = std::max({worst, std::abs(a - b), std::abs(a - c), std::abs(b - c)});
  }
  const double t = seconds(t0);
  std::ostringstream d;
  d << "max pairwise diff=" << worst << " time=" << t << "s";
  return {worst < 1e-9 && t < 300.0, d.str()};
}

Outcome ac4() {
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n) {
    worst = std::max(worst, std::abs(fidelity_collective(gen_qft(n), gen_qft(n)).fj - 1.0));
    if (n >= 2) worst = std::max(worst, std::abs(fidelity_collective(gen_bv(n), gen_bv(n)).fj - 1.0));
  }
  std::ostringstream d;
  d << "max |fj-1|=" << worst;
  return {worst <= 1e-10, d.str()};
}

Outcome ac5() {
  std::mt19937_64 rng(55);
  double stability = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Circuit ideal = testsupport::random_circuit(2, 8, rng);
    const Circuit noisy = testsupport::random_noisy(ideal, 2, "depolarizing", 0.9, rng);
    const double base = oracle::jamiolkowski_fidelity_dense(ideal, noisy);
    const double ext = oracle::jamiolkowski_fidelity_dense(with_ancillas(ideal, 1), with_ancillas(noisy, 1));
    const double col = fidelity_collective(with_ancillas(ideal, 1), with_ancillas(noisy, 1)).fj;
    stability = std::max({stability, std::abs(base - ext), std::abs(base - col)});
  }
  double slack = -INFINITY;
  for (int i = 0; i < 50; ++i) {
    const Circuit u1 = testsupport::random_circuit(2, 6, rng);
    const Circuit u2 = testsupport::random_circuit(2, 6, rng);
    const Circuit e1 = testsupport::random_noisy(u1, 2, "depolarizing", 0.7, rng);
    const Circuit e2 = testsupport::random_noisy(u2, 2, "bit_flip", 0.6, rng);
    const double lhs = cj_metric(oracle::jamiolkowski_fidelity_dense(concatenate(u1, u2), concatenate(e1, e2)));
    const double rhs = cj_metric(oracle::jamiolkowski_fidelity_dense(u1, e1)) +
                       cj_metric(oracle::jamiolkowski_fidelity_dense(u2, e2));
    slack = std::max(slack, lhs - rhs);
  }
  std::ostringstream d;
  d << "stability max diff=" << stability << " chaining max(lhs-rhs)=" << slack;
  return {stability <= 1e-10 && slack <= 1e-9, d.str()};
}

Outcome ac6() {
  std::mt19937_64 rng(66);
  double worst_sigma = 0.0;
  for (int i = 0; i < 5; ++i) {
    const int n = 2 + i % 2;
    const Circuit ideal = testsupport::random_circuit(n, 10, rng);
    const Circuit noisy = testsupport::random_noisy(ideal, 2, "depolarizing", 0.85, rng);
    const double fj = fidelity_collective(ideal, noisy).fj;
    const auto h = oracle::haar_average_fidelity(ideal, noisy, 10000, 1000 + static_cast<std::uint64_t>(i));
    worst_sigma = std::max(worst_sigma, std::abs(h.mean - average_fidelity(fj, std::ldexp(1.0, n))) / h.std_error);
  }
  std::ostringstream d;
  d << "max deviation=" << worst_sigma << " stderr";
  return {worst_sigma <= 3.0, d.str()};
}

Outcome ac7() {
  cli::BenchConfig bc;
  bc.family = "bv";
  bc.n = 4;
  bc.channel = "flip";
  bc.p = 0.9;
  const Circuit noisy = cli::bench_circuit(bc, 6);
  const Circuit ideal = strip_noise(noisy);
  FidelityOptions shared;
  shared.optimize = false;
  FidelityOptions cold = shared;
  cold.share_computed_table = false;
  const double fs = fidelity_individual(ideal, noisy, std::nullopt, shared).fj;
  const double fc = fidelity_individual(ideal, noisy, std::nullopt, cold).fj;
  const double ts = min_time([&] { fidelity_individual(ideal, noisy, std::nullopt, shared); });
  const double tc = min_time([&] { fidelity_individual(ideal, noisy, std::nullopt, cold); });
  const double saving = 1.0 - ts / tc;
  std::ostringstream d;
  d << "terms=" << noisy.kraus_term_count() << " shared=" << ts << "s cold=" << tc << "s saving=" << saving * 100
    << "% |dfj|=" << std::abs(fs - fc);
  return {saving >= 0.30 && std::abs(fs - fc) <= 1e-12, d.str()};
}

Outcome ac8() {
  const Circuit bv = gen_bv(16);
  const Circuit bv_noisy = insert_noise(bv, random_noise_spec(bv, 9, "depolarizing", 0.999, 16));
  auto t0 = Clock::now();
  const auto r1 = fidelity_collective(bv, bv_noisy);
  const double t1 = seconds(t0);
  const Circuit qft = gen_qft(7);
  const Circuit qft_noisy = insert_noise(qft, random_noise_spec(qft, 6, "depolarizing", 0.999, 7));
  t0 = Clock::now();
  const auto r2 = fidelity_collective(qft, qft_noisy);
  const double t2 = seconds(t0);
  std::ostringstream d;
  d << "bv16+9: " << t1 << "s fj=" << r1.fj << " nodes=" << r1.peak_nodes << "; qft7+6: " << t2
    << "s fj=" << r2.fj << " nodes=" << r2.peak_nodes;
  return {t1 < 120.0 && t2 < 600.0 && r1.fj > 0.0 && r2.fj > 0.0, d.str()};
}

Outcome ac9() {
  const Circuit ideal = gen_qft(2);
  const Circuit noisy = fig2(0.9);
  double worst = 0.0;
  bool fewer = true;
  std::size_t before = 0, after = 0;
  for (auto choice : {std::vector<std::size_t>{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
    const TensorNetwork raw = build_trace_miter(ideal, circuit_to_network(noisy, choice));
    const TensorNetwork opt = optimize(raw);
    tdd::Session s1, s2;
    worst = std::max(worst, std::abs(trace_value(raw, s1) - trace_value(opt, s2)));
    fewer = fewer && opt.tensors.size() < raw.tensors.size();
    before = raw.tensors.size();
    after = opt.tensors.size();
  }
  std::ostringstream d;
  d << "tensors " << before << " -> " << after << ", max value diff=" << worst;
  return {worst <= 1e-12 && fewer, d.str()};
}

Outcome ac10() {
  const Circuit ideal = gen_bv(4);
  const auto spec = random_noise_spec(ideal, 6, "depolarizing", 0.999, 10);
  FidelityOptions opt;
  opt.optimize = false;
  std::vector<double> logs;
  std::ostringstream d;
  d << "log(t_ind/t_col):";
  for (std::size_t m = 1; m <= 6; ++m) {
    const Circuit noisy = insert_noise(ideal, std::vector<NoisePlacement>(spec.begin(), spec.begin() + static_cast<std::ptrdiff_t>(m)));
    const double ti = min_time([&] { fidelity_individual(ideal, noisy, std::nullopt, opt); });
    const double tc = min_time([&] { fidelity_collective(ideal, noisy, opt); });
    logs.push_back(std::log(ti / tc));
    d << " " << logs.back();
  }
  bool monotone = true;
  for (std::size_t i = 1; i < logs.size(); ++i) monotone = monotone && logs[i] >= logs[i - 1];
  return {monotone, d.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"AC1 closed-form anchor", ac1},         {"AC2 early-exit anchor", ac2},
      {"AC3 cross-oracle differential", ac3},  {"AC4 self-fidelity", ac4},
      {"AC5 stability and chaining", ac5},     {"AC6 average-fidelity identity", ac6},
      {"AC7 computed-table reuse", ac7},       {"AC8 scalability smoke", ac8},
      {"AC9 optimization soundness", ac9},     {"AC10 algorithm crossover trend", ac10},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
