#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "noisyeq/gates.hpp"

namespace noisyeq {

enum class ChannelKind { bit_flip, phase_flip, bit_phase_flip, depolarizing };

std::string_view to_string(ChannelKind kind);
/// Throws InputError on an unknown name.
ChannelKind parse_channel_kind(std::string_view name);

/// Single-qubit Kraus channel. `p` is the probability that no error occurs.
///
/// Kraus operators whose coefficient is exactly zero are not stored, so a
/// flip channel at p = 1 holds only the identity term.
struct NoiseChannel {
  ChannelKind kind = ChannelKind::depolarizing;
  double p = 1.0;
  int arity = 1;
  std::vector<Matrix> kraus;

  std::string label() const;
  /// Σ N†N = I, entry-wise within `tol`.
  bool is_normalized(double tol = 1e-10) const;

  friend bool operator==(const NoiseChannel& a, const NoiseChannel& b) {
    return a.kind == b.kind && a.p == b.p;
  }
};

/// Throws InputError when p is outside [0, 1].
NoiseChannel make_channel(ChannelKind kind, double p);
NoiseChannel make_channel(std::string_view name, double p);

/// Σ N ⊗ N*, the 4^arity square matrix acting on (qubit, primed copy) in
/// row-major vectorisation: |i><j| maps to index i*d + j.
Matrix matrix_rep(const NoiseChannel& ch);

/// Probability weight of one Kraus term, ||N||_F^2 / d.
double kraus_weight(const Matrix& k);

}  // namespace noisyeq
