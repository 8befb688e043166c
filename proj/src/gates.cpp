#include "noisyeq/gates.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "noisyeq/error.hpp"

namespace noisyeq {
namespace {

struct BuiltinInfo {
  std::string_view name;
  int arity;
  int params;
};

constexpr std::array<BuiltinInfo, 16> kBuiltins{{
    {"i", 1, 0},   {"x", 1, 0},   {"y", 1, 0},   {"z", 1, 0},
    {"h", 1, 0},   {"s", 1, 0},   {"sdg", 1, 0}, {"t", 1, 0},
    {"tdg", 1, 0}, {"rx", 1, 1},  {"ry", 1, 1},  {"rz", 1, 1},
    {"cx", 2, 0},  {"cz", 2, 0},  {"cs", 2, 0},  {"swap", 2, 0},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const BuiltinInfo* find_builtin(std::string_view name) {
  const std::string key = lower(name);
  for (const auto& info : kBuiltins) {
    if (info.name == key) return &info;
  }
  return nullptr;
}

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Matrix controlled(const Matrix& u) {
  Matrix m = Matrix::Identity(4, 4);
  m.bottomRightCorner(2, 2) = u;
  return m;
}

}  // namespace

GateMatrix::GateMatrix(Matrix entries) : entries_(std::move(entries)) {
  const auto n = entries_.rows();
  if (n != entries_.cols() || n < 2 || (n & (n - 1)) != 0) {
    throw InputError("gate matrix must be square with a power-of-two dimension >= 2");
  }
  arity_ = 0;
  for (auto d = n; d > 1; d >>= 1) ++arity_;
}

bool GateMatrix::is_unitary(double tol) const {
  const Matrix prod = entries_.adjoint() * entries_;
  const Matrix id = Matrix::Identity(dim(), dim());
  return ((prod - id).cwiseAbs().maxCoeff() <= tol);
}

int builtin_param_count(std::string_view name) {
  const auto* info = find_builtin(name);
  return info ? info->params : -1;
}

int builtin_arity(std::string_view name) {
  const auto* info = find_builtin(name);
  return info ? info->arity : -1;
}

GateMatrix builtin(std::string_view name, std::span<const double> params) {
  const auto* info = find_builtin(name);
  if (info == nullptr) throw InputError("unknown gate '" + std::string(name) + "'");
  if (static_cast<int>(params.size()) != info->params) {
    throw InputError("gate '" + std::string(name) + "' takes " + std::to_string(info->params) +
                     " parameter(s), got " + std::to_string(params.size()));
  }

  const Complex i1{0.0, 1.0};
  const double r2 = 1.0 / std::sqrt(2.0);
  const auto key = info->name;

  if (key == "i") return GateMatrix(Matrix::Identity(2, 2));
  if (key == "x") return GateMatrix(mat2(0, 1, 1, 0));
  if (key == "y") return GateMatrix(mat2(0, -i1, i1, 0));
  if (key == "z") return GateMatrix(mat2(1, 0, 0, -1));
  if (key == "h") return GateMatrix(mat2(r2, r2, r2, -r2));
  if (key == "s") return GateMatrix(mat2(1, 0, 0, i1));
  if (key == "sdg") return GateMatrix(mat2(1, 0, 0, -i1));
  if (key == "t") return GateMatrix(mat2(1, 0, 0, std::polar(1.0, M_PI / 4)));
  if (key == "tdg") return GateMatrix(mat2(1, 0, 0, std::polar(1.0, -M_PI / 4)));

  if (key == "rx" || key == "ry" || key == "rz") {
    const double half = params[0] / 2;
    const double c = std::cos(half);
    const double s = std::sin(half);
    if (key == "rx") return GateMatrix(mat2(c, -i1 * s, -i1 * s, c));
    if (key == "ry") return GateMatrix(mat2(c, -s, s, c));
    return GateMatrix(mat2(std::polar(1.0, -half), 0, 0, std::polar(1.0, half)));
  }

  if (key == "cx") return GateMatrix(controlled(mat2(0, 1, 1, 0)));
  if (key == "cz") return GateMatrix(controlled(mat2(1, 0, 0, -1)));
  if (key == "cs") return GateMatrix(controlled(mat2(1, 0, 0, i1)));

  // swap
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
  return GateMatrix(m);
}

GateMatrix adjoint(const GateMatrix& g) { return GateMatrix(g.matrix().adjoint()); }

GateMatrix conjugate(const GateMatrix& g) { return GateMatrix(g.matrix().conjugate()); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace noisyeq
