#include "noisyeq/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "noisyeq/error.hpp"
#include "noisyeq/oracle.hpp"

namespace noisyeq::cli {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Circuit load_circuit(const std::string& path) {
  try {
    return parse_circuit(read_file(path));
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string verdict_text(const FidelityReport& r) {
  return r.verdict ? std::string(to_string(*r.verdict)) : "none";
}

// Noise k goes after instruction round((k+1)·len/(m+1)) on qubit n-1-(k mod n).
std::vector<NoisePlacement> spread_placement(const Circuit& ideal, std::size_t m,
                                             const std::string& channel, double p) {
  const std::size_t len = ideal.instructions().size();
  const int n = ideal.num_qubits();
  std::vector<NoisePlacement> spec;
  for (std::size_t k = 0; k < m; ++k) {
    NoisePlacement np;
    np.after = static_cast<std::size_t>(std::llround(static_cast<double>((k + 1) * len) /
                                                     static_cast<double>(m + 1)));
    np.qubit = n - 1 - static_cast<int>(k % static_cast<std::size_t>(n));
    np.channel = channel;
    np.p = p;
    spec.push_back(std::move(np));
  }
  return spec;
}

}  // namespace

std::string report_json(const FidelityReport& r, const RunConfig& config, int num_qubits) {
  const double d = std::ldexp(1.0, num_qubits);
  nlohmann::ordered_json j;
  j["verdict"] = verdict_text(r);
  j["fj"] = r.fj;
  j["is_lower_bound"] = r.is_lower_bound;
  j["epsilon"] = config.epsilon;
  j["algorithm"] = std::string(to_string(r.algorithm));
  j["terms_evaluated"] = r.terms_evaluated;
  j["total_terms"] = r.total_terms;
  j["avg_fidelity"] = average_fidelity(r.fj, d);
  j["cj"] = cj_metric(r.fj);
  j["peak_nodes"] = r.peak_nodes;
  j["wall_time_s"] = r.wall_time_s;
  j["seed"] = config.seed;
  return j.dump(2);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (!(config.epsilon >= 0.0 && config.epsilon <= 1.0)) throw InputError("--epsilon must lie in [0, 1]");
    if (config.workers < 1) throw InputError("--workers must be at least 1");
    const Circuit ideal = load_circuit(config.ideal_path);
    Circuit noisy = config.noisy_path ? load_circuit(*config.noisy_path) : ideal;
    if (config.noise_spec_path) {
      noisy = insert_noise(noisy, parse_noise_spec(read_file(*config.noise_spec_path)));
    }

    FidelityOptions opt;
    opt.workers = config.workers;
    Algorithm algo = config.algorithm;
    if (algo == Algorithm::automatic) {
      algo = noisy.kraus_term_count() <= opt.auto_threshold ? Algorithm::individual
                                                            : Algorithm::collective;
    }
    FidelityReport r;
    if (algo == Algorithm::individual && !config.early_exit) {
      r = fidelity_individual(ideal, noisy, std::nullopt, opt);
      r.verdict = r.fj > 1.0 - config.epsilon ? Verdict::equivalent : Verdict::not_equivalent;
    } else {
      r = check_equivalence(ideal, noisy, config.epsilon, algo, opt);
    }

    const double d = std::ldexp(1.0, ideal.num_qubits());
    out << std::setprecision(12);
    out << "verdict:         " << verdict_text(r) << "\n";
    out << "fj:              " << r.fj << (r.is_lower_bound ? " (lower bound)" : "") << "\n";
    out << "avg fidelity:    " << average_fidelity(r.fj, d) << (r.is_lower_bound ? " (lower bound)" : "") << "\n";
    out << "C_J:             " << cj_metric(r.fj) << (r.is_lower_bound ? " (upper bound)" : "") << "\n";
    out << "algorithm:       " << to_string(r.algorithm) << "\n";
    out << "terms evaluated: " << r.terms_evaluated << " of " << r.total_terms << "\n";
    out << "peak TDD nodes:  " << r.peak_nodes << "\n";
    out << "wall time (s):   " << r.wall_time_s << "\n";
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";

    if (config.oracle_check) {
      const double ref = oracle::jamiolkowski_fidelity_dense(ideal, noisy);
      out << "oracle fj:       " << ref << "\n";
      const bool ok = r.is_lower_bound ? r.fj <= ref + 1e-9 : std::abs(r.fj - ref) <= 1e-9;
      if (!ok) throw InternalCheckError("oracle fidelity " + std::to_string(ref) + " disagrees");
    }

    if (config.json_path) {
      const std::string json = report_json(r, config, ideal.num_qubits());
      if (*config.json_path == "-") {
        out << json << "\n";
      } else {
        std::ofstream f(*config.json_path);
        if (!f) throw InputError("cannot write '" + *config.json_path + "'");
        f << json << "\n";
      }
    }
    return r.verdict == Verdict::not_equivalent ? kNotEquivalent : kEquivalent;
  } catch (const InternalCheckError& e) {
    err << "internal check failed: " << e.what() << "\n";
    return kInternalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

Circuit bench_circuit(const BenchConfig& config, std::size_t noises) {
  Circuit ideal = config.family == "qft" ? gen_qft(config.n)
                  : config.family == "bv" ? gen_bv(config.n)
                                          : throw InputError("unknown benchmark '" + config.family + "'");
  const bool flip = config.channel == "flip";
  std::vector<NoisePlacement> spec =
      config.random_placement
          ? random_noise_spec(ideal, noises, flip ? "bit_flip" : config.channel, config.p, config.seed)
          : spread_placement(ideal, noises, flip ? "bit_flip" : config.channel, config.p);
  if (flip) {
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k].channel = k % 2 ? "phase_flip" : "bit_flip";
  }
  return insert_noise(ideal, spec);
}

int bench(const BenchConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.family != "qft" && config.family != "bv") {
      throw InputError("unknown benchmark '" + config.family + "' (qft or bv)");
    }
    if (config.n < 1 || config.n > 64) throw InputError("benchmark size must be in [1, 64]");
    if (config.family == "bv" && config.n < 2) throw InputError("bv needs at least 2 qubits");
    const bool run_ind = config.algorithm == "both" || config.algorithm == "individual";
    const bool run_col = config.algorithm == "both" || config.algorithm == "collective";
    if (!run_ind && !run_col) throw InputError("--algorithm must be both, individual or collective");

    const char* sep = config.csv ? "," : "\t";
    out << "circuit" << sep << "n" << sep << "gates" << sep << "noises" << sep << "fj" << sep
        << "t_individual_s" << sep << "nodes_individual" << sep << "t_collective_s" << sep
        << "nodes_collective\n";
    const std::size_t first = config.sweep ? 1 : config.noises;
    for (std::size_t m = first; m <= config.noises; ++m) {
      const Circuit noisy = bench_circuit(config, m);
      const Circuit ideal = strip_noise(noisy);
      std::optional<FidelityReport> ind;
      std::optional<FidelityReport> col;
      if (run_ind && noisy.kraus_term_count() <= config.max_individual_terms) {
        ind = fidelity_individual(ideal, noisy);
      }
      if (run_col) col = fidelity_collective(ideal, noisy);
      const double fj = col ? col->fj : ind ? ind->fj : std::nan("");
      auto cell = [&](const std::optional<FidelityReport>& r, bool time) {
        std::ostringstream s;
        if (!r) {
          s << "-";
        } else if (time) {
          s << std::setprecision(4) << r->wall_time_s;
        } else {
          s << r->peak_nodes;
        }
        return s.str();
      };
      out << config.family << config.n << sep << config.n << sep << ideal.gate_count() << sep << m
          << sep << std::setprecision(12) << fj << sep << cell(ind, true) << sep << cell(ind, false)
          << sep << cell(col, true) << sep << cell(col, false) << "\n";
    }
    return kEquivalent;
  } catch (const InternalCheckError& e) {
    err << "internal check failed: " << e.what() << "\n";
    return kInternalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decide whether a noisy circuit is epsilon-equivalent to an ideal one"};
  app.set_version_flag("--version", "noisyeq 0.1");

  RunConfig rc;
  std::string ideal_path, noisy_path, spec_path, json_path, algorithm = "auto";
  bool exact = false;
  app.add_option("--ideal", ideal_path, "Ideal circuit file");
  app.add_option("--noisy", noisy_path, "Noisy circuit file (default: the ideal circuit)");
  app.add_option("--noise-spec", spec_path, "JSON noise placements inserted into the noisy side");
  app.add_option("--epsilon", rc.epsilon, "Equivalence threshold")->check(CLI::Range(0.0, 1.0));
  app.add_option("--algorithm", algorithm, "auto, individual or collective")
      ->check(CLI::IsMember({"auto", "individual", "collective"}));
  app.add_flag("--exact", exact, "Disable early exit; report the full fidelity");
  app.add_flag("--oracle", rc.oracle_check, "Cross-check against the dense oracle");
  app.add_option("--workers", rc.workers, "Parallel workers for the individual algorithm")
      ->check(CLI::PositiveNumber);
  app.add_option("--json", json_path, "Write a JSON report to this path ('-' for stdout)");
  app.add_option("--seed", rc.seed, "Seed recorded in the report");

  BenchConfig bc;
  std::string placement = "spread";
  auto* b = app.add_subcommand("bench", "Run both algorithms on a generated benchmark");
  b->add_option("family", bc.family, "qft or bv")->required()->check(CLI::IsMember({"qft", "bv"}));
  b->add_option("n", bc.n, "Qubit count")->required();
  b->add_option("--noises", bc.noises, "Number of noises to insert");
  b->add_option("--channel", bc.channel, "Noise channel, or 'flip' for alternating bit/phase flips");
  b->add_option("--p", bc.p, "No-error probability")->check(CLI::Range(0.0, 1.0));
  b->add_option("--placement", placement, "spread or random")->check(CLI::IsMember({"spread", "random"}));
  b->add_option("--seed", bc.seed, "Seed for random placement");
  b->add_option("--algorithm", bc.algorithm, "both, individual or collective")
      ->check(CLI::IsMember({"both", "individual", "collective"}));
  b->add_flag("--csv", bc.csv, "Comma-separated output");
  b->add_flag("--sweep", bc.sweep, "One row per noise count from 1 to --noises");
  b->add_option("--max-terms", bc.max_individual_terms, "Skip the individual algorithm above this many terms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForHelp*>(&e) || dynamic_cast<const CLI::CallForAllHelp*>(&e)
                  ? app.help()
                  : std::string("noisyeq 0.1\n"));
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  if (b->parsed()) {
    bc.random_placement = placement == "random";
    return bench(bc, out, err);
  }
  if (ideal_path.empty()) {
    err << "error: --ideal is required\n" << app.help();
    return kInputError;
  }
  rc.ideal_path = ideal_path;
  if (!noisy_path.empty()) rc.noisy_path = noisy_path;
  if (!spec_path.empty()) rc.noise_spec_path = spec_path;
  if (!json_path.empty()) rc.json_path = json_path;
  rc.algorithm = parse_algorithm(algorithm);
  rc.early_exit = !exact;
  return run(rc, out, err);
}

}  // namespace noisyeq::cli
