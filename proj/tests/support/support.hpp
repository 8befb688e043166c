#pragma once

// Shared helpers for the test binaries: seeded random circuits and a
// brute-force dense tensor-network contractor used as a reference.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "noisyeq/circuit.hpp"
#include "noisyeq/network.hpp"

namespace testsupport {

using noisyeq::Circuit;
using noisyeq::Complex;

/// Random ideal circuit over the full builtin gate set.
Circuit random_circuit(int n, int gates, std::mt19937_64& rng);

/// `ideal` with `noises` random placements of `channel`.
Circuit random_noisy(const Circuit& ideal, int noises, const std::string& channel, double p,
                     std::mt19937_64& rng);

struct DenseTensor {
  std::vector<std::string> labels;
  std::vector<Complex> data;  // row-major, first label most significant
};

/// Contracts every tensor pairwise in list order, summing labels as they
/// close. Result labels are sorted lexicographically.
DenseTensor dense_contract(const noisyeq::TensorNetwork& net);

/// Same tensor with its labels permuted into `labels`.
DenseTensor permute(const DenseTensor& t, const std::vector<std::string>& labels);

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace testsupport
