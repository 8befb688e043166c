#include "noisyeq/noise.hpp"

#include <cmath>
#include <sstream>

#include "noisyeq/error.hpp"

namespace noisyeq {

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::bit_flip: return "bit_flip";
    case ChannelKind::phase_flip: return "phase_flip";
    case ChannelKind::bit_phase_flip: return "bit_phase_flip";
    case ChannelKind::depolarizing: return "depolarizing";
  }
  return "?";
}

ChannelKind parse_channel_kind(std::string_view name) {
  for (auto k : {ChannelKind::bit_flip, ChannelKind::phase_flip, ChannelKind::bit_phase_flip,
                 ChannelKind::depolarizing}) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown noise channel '" + std::string(name) + "'");
}

std::string NoiseChannel::label() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind) << '(' << p << ')';
  return os.str();
}

bool NoiseChannel::is_normalized(double tol) const {
  const auto d = kraus.empty() ? 2 : kraus.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  return (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= tol;
}

NoiseChannel make_channel(ChannelKind kind, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InputError("noise probability must lie in [0, 1], got " + std::to_string(p));
  }
  NoiseChannel ch;
  ch.kind = kind;
  ch.p = p;

  auto add = [&](double coeff, std::string_view gate) {
    if (coeff == 0.0) return;
    ch.kraus.push_back(coeff * builtin(gate).matrix());
  };

  add(std::sqrt(p), "i");
  switch (kind) {
    case ChannelKind::bit_flip: add(std::sqrt(1 - p), "x"); break;
    case ChannelKind::phase_flip: add(std::sqrt(1 - p), "z"); break;
    case ChannelKind::bit_phase_flip: add(std::sqrt(1 - p), "y"); break;
    case ChannelKind::depolarizing: {
      const double c = std::sqrt((1 - p) / 3);
      add(c, "x");
      add(c, "y");
      add(c, "z");
      break;
    }
  }
  return ch;
}

NoiseChannel make_channel(std::string_view name, double p) {
  return make_channel(parse_channel_kind(name), p);
}

Matrix matrix_rep(const NoiseChannel& ch) {
  const auto d = ch.kraus.front().rows();
  Matrix m = Matrix::Zero(d * d, d * d);
  for (const auto& k : ch.kraus) m += kron(k, k.conjugate());
  return m;
}

double kraus_weight(const Matrix& k) {
  return k.squaredNorm() / static_cast<double>(k.rows());
}

}  // namespace noisyeq
