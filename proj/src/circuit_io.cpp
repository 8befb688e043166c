#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "noisyeq/circuit.hpp"
#include "noisyeq/error.hpp"

namespace noisyeq {
namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const auto start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

int parse_int(const std::string& tok, std::size_t line, const char* what) {
  int value = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, std::string("expected integer ") + what + ", got '" + tok + "'");
  }
  return value;
}

double parse_double(const std::string& tok, std::size_t line, const char* what) {
  char* end = nullptr;
  const double value = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size()) {
    throw ParseError(line, std::string("expected number ") + what + ", got '" + tok + "'");
  }
  return value;
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  std::optional<Circuit> circuit;

  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto tokens = tokenize(raw);
    if (tokens.empty()) continue;

    if (!circuit) {
      if (tokens[0] != "qubits" || tokens.size() != 2) {
        throw ParseError(line_no, "expected header 'qubits <n>'");
      }
      const int n = parse_int(tokens[1], line_no, "qubit count");
      if (n < 1) throw ParseError(line_no, "qubit count must be at least 1");
      circuit.emplace(n);
      continue;
    }

    try {
      if (tokens[0] == "noise") {
        if (tokens.size() != 4) throw ParseError(line_no, "expected 'noise <channel> <q> <p>'");
        const int q = parse_int(tokens[2], line_no, "qubit");
        const double p = parse_double(tokens[3], line_no, "probability");
        circuit->add_noise(make_channel(tokens[1], p), q);
        continue;
      }

      Instruction ins;
      ins.gate = tokens[0];
      for (auto& ch : ins.gate) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      if (auto caret = ins.gate.find('^'); caret != std::string::npos) {
        const auto mod = ins.gate.substr(caret + 1);
        ins.gate.resize(caret);
        if (mod == "dg") {
          ins.conj = ins.transposed = true;
        } else if (mod == "c") {
          ins.conj = true;
        } else if (mod == "t") {
          ins.transposed = true;
        } else {
          throw ParseError(line_no, "unknown gate modifier '^" + mod + "'");
        }
      }
      const int arity = builtin_arity(ins.gate);
      if (arity < 0) throw ParseError(line_no, "unknown gate '" + tokens[0] + "'");
      const int nparams = builtin_param_count(ins.gate);
      if (tokens.size() != static_cast<std::size_t>(1 + arity + nparams)) {
        throw ParseError(line_no, "gate '" + ins.gate + "' expects " + std::to_string(arity) +
                                      " qubit(s) and " + std::to_string(nparams) + " angle(s)");
      }
      for (int k = 0; k < arity; ++k) {
        ins.qubits.push_back(parse_int(tokens[1 + static_cast<std::size_t>(k)], line_no, "qubit"));
      }
      for (int k = 0; k < nparams; ++k) {
        ins.params.push_back(
            parse_double(tokens[1 + static_cast<std::size_t>(arity + k)], line_no, "angle"));
      }
      circuit->append(std::move(ins));
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(line_no, e.what());
    }
  }

  if (!circuit) throw ParseError(line_no, "missing 'qubits <n>' header");
  return *std::move(circuit);
}

std::string to_text(const Circuit& c) {
  std::ostringstream os;
  os.precision(17);
  os << "qubits " << c.num_qubits() << '\n';
  for (const auto& ins : c.instructions()) {
    if (ins.is_noise()) {
      const auto& ch = c.channel_of(ins);
      os << "noise " << to_string(ch.kind) << ' ' << ins.qubits[0] << ' ' << ch.p << '\n';
      continue;
    }
    os << ins.display_name();
    for (int q : ins.qubits) os << ' ' << q;
    for (double a : ins.params) os << ' ' << a;
    os << '\n';
  }
  return os.str();
}

std::vector<NoisePlacement> parse_noise_spec(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("noise spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw InputError("noise spec must be a JSON array");

  std::vector<NoisePlacement> spec;
  for (const auto& item : doc) {
    try {
      NoisePlacement np;
      const auto after = item.at("after").get<long long>();
      if (after < 0) throw InputError("noise position must be non-negative");
      np.after = static_cast<std::size_t>(after);
      np.qubit = item.at("qubit").get<int>();
      np.channel = item.at("channel").get<std::string>();
      np.p = item.at("p").get<double>();
      spec.push_back(std::move(np));
    } catch (const json::exception& e) {
      throw InputError(std::string("bad noise spec entry: ") + e.what());
    }
  }
  return spec;
}

}  // namespace noisyeq
