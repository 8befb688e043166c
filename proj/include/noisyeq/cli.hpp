#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "noisyeq/fidelity.hpp"

namespace noisyeq::cli {

enum ExitCode : int { kEquivalent = 0, kNotEquivalent = 1, kInputError = 2, kInternalError = 3 };

struct RunConfig {
  std::string ideal_path;
  std::optional<std::string> noisy_path;       // defaults to the ideal circuit
  std::optional<std::string> noise_spec_path;  // inserted into the noisy side
  double epsilon = 0.01;
  Algorithm algorithm = Algorithm::automatic;
  bool early_exit = true;
  bool oracle_check = false;
  unsigned workers = 1;
  std::optional<std::string> json_path;  // "-" writes to the output stream
  std::uint64_t seed = 0;
};

/// Loads the circuits, decides ε-equivalence and prints the report.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// JSON report with the stable key set.
std::string report_json(const FidelityReport& r, const RunConfig& config, int num_qubits);

struct BenchConfig {
  std::string family;  // "qft" or "bv"
  int n = 2;
  std::size_t noises = 0;
  std::string channel = "depolarizing";  // or "flip": alternating bit/phase flips
  double p = 0.999;
  bool random_placement = false;
  std::uint64_t seed = 0;
  std::string algorithm = "both";  // both | individual | collective
  bool csv = false;
  bool sweep = false;  // one row per noise count 1..noises
  std::uint64_t max_individual_terms = 1u << 16;
};

/// The benchmark circuit with its noises placed.
Circuit bench_circuit(const BenchConfig& config, std::size_t noises);

int bench(const BenchConfig& config, std::ostream& out, std::ostream& err);

/// Full command line entry point (`noisyeq [run flags]` or `noisyeq bench ...`).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace noisyeq::cli
