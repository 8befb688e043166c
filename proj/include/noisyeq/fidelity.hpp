#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noisyeq/circuit.hpp"
#include "noisyeq/gates.hpp"

namespace noisyeq {

enum class Algorithm { automatic, individual, collective };
enum class Verdict { equivalent, not_equivalent, equivalent_by_bound };

std::string_view to_string(Algorithm a);
std::string_view to_string(Verdict v);
/// "auto", "individual" or "collective". Throws InputError otherwise.
Algorithm parse_algorithm(std::string_view name);

enum class KrausOrder { by_weight, lexicographic };

struct FidelityOptions {
  /// Apply SWAP elimination and inverse-pair cancellation before contracting.
  bool optimize = true;
  /// Keep one TDD session (and its computed tables) across all Kraus terms.
  bool share_computed_table = true;
  KrausOrder kraus_order = KrausOrder::by_weight;
  /// Parallel workers for the individual algorithm; each gets its own session.
  unsigned workers = 1;
  bool record_traces = false;
  std::size_t gc_threshold = std::size_t{1} << 20;
  /// `auto` picks the individual algorithm up to this many Kraus terms.
  std::uint64_t auto_threshold = 16;
};

struct FidelityReport {
  double fj = 0.0;      // clamped to [0, 1]
  double raw_fj = 0.0;  // as computed
  bool is_lower_bound = false;
  std::optional<Verdict> verdict;  // set when a threshold was given
  Algorithm algorithm = Algorithm::individual;
  std::uint64_t terms_evaluated = 0;
  std::uint64_t total_terms = 0;
  std::vector<Complex> per_term_traces;  // tr(U† E_i), in evaluation order
  std::optional<Complex> collective_scalar;
  std::size_t peak_nodes = 0;
  double wall_time_s = 0.0;
  std::vector<std::string> warnings;
};

/// Σ_i |tr(U† E_i)|² / d² one Kraus term at a time. With `early_exit`, stops
/// once the partial sum exceeds 1 − ε and reports it as a lower bound.
/// Throws InputError on a qubit-count mismatch or more than 2^31 terms.
FidelityReport fidelity_individual(const Circuit& ideal, const Circuit& noisy,
                                   std::optional<double> early_exit = std::nullopt,
                                   const FidelityOptions& options = {});

/// One contraction of the doubled miter tr((U† ⊗ Uᵀ) M_E).
/// Throws InternalCheckError if the scalar has a non-negligible imaginary part.
FidelityReport fidelity_collective(const Circuit& ideal, const Circuit& noisy,
                                   const FidelityOptions& options = {});

/// Equivalent iff fj > 1 − ε. Throws InputError when ε is outside [0, 1].
FidelityReport check_equivalence(const Circuit& ideal, const Circuit& noisy, double epsilon,
                                 Algorithm algorithm = Algorithm::automatic,
                                 const FidelityOptions& options = {});

/// (d·fj + 1) / (d + 1).
double average_fidelity(double fj, double d);
/// √(1 − fj).
double cj_metric(double fj);

/// Walks every Kraus choice of a noisy circuit, one index per noise placeholder.
///
/// In by_weight order, choices come out by descending product of per-term
/// weights ||N||²_F / d. Ties go to the lexicographically smaller tuple of
/// per-noise weight ranks (equal-weight operators keep their channel order).
class KrausEnumerator {
 public:
  KrausEnumerator(const Circuit& noisy, KrausOrder order = KrausOrder::by_weight);
  KrausEnumerator(std::vector<std::vector<double>> weights, KrausOrder order);

  /// Next choice, or nullopt when exhausted.
  std::optional<std::vector<std::size_t>> next();
  std::uint64_t total() const noexcept { return total_; }

 private:
  struct Item {
    double weight;
    std::vector<std::size_t> ranks;
    std::size_t last;
  };
  struct Cmp {
    bool operator()(const Item& a, const Item& b) const;
  };

  static std::vector<std::vector<double>> weights_of(const Circuit& noisy);
  double weight_of(const std::vector<std::size_t>& ranks) const;
  std::vector<std::size_t> to_choice(const std::vector<std::size_t>& ranks) const;

  KrausOrder order_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<std::size_t>> by_rank_;  // rank -> original index, per slot
  std::vector<Item> heap_;
  std::optional<std::vector<std::size_t>> odometer_;
  std::uint64_t total_ = 1;
  bool started_ = false;
};

}  // namespace noisyeq
