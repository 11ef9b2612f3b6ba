#include "nnagg/model_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "nnagg/errors.hpp"

namespace nnagg {

namespace {

constexpr std::string_view kMagic = "NNAGG MLP 1";

std::uint64_t to_le_bits(double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  return bits;
}

double from_le_bits(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_model(const Mlp& mlp, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << kMagic << '\n';
  out << "input_dim " << mlp.spec.input_dim << '\n';
  for (const auto& layer : mlp.spec.hidden) {
    out << "hidden " << layer.width << ' ' << to_string(layer.activation) << '\n';
  }
  out << "output " << mlp.spec.output_dim << ' '
      << to_string(mlp.spec.output_activation) << '\n';
  out << "params " << mlp.params.size() << '\n';
  out << "---\n";
  for (const double v : mlp.params) {
    const std::uint64_t bits = to_le_bits(v);
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    out.write(buf, 8);
  }
  if (!out) throw IoError("write failed: " + path);
}

Mlp load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw ParseError(path + ": not a model file (bad magic)");
  }

  MlpSpec spec;
  std::size_t declared_params = 0;
  bool saw_output = false, saw_count = false;
  while (std::getline(in, line)) {
    if (line == "---") break;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "input_dim") {
      ss >> spec.input_dim;
    } else if (key == "hidden") {
      int width = 0;
      std::string act;
      ss >> width >> act;
      spec.hidden.push_back({width, activation_from_string(act)});
    } else if (key == "output") {
      std::string act;
      ss >> spec.output_dim >> act;
      spec.output_activation = activation_from_string(act);
      saw_output = true;
    } else if (key == "params") {
      ss >> declared_params;
      saw_count = true;
    } else {
      throw ParseError(path + ": unknown header field '" + key + "'");
    }
    if (ss.fail()) throw ParseError(path + ": malformed header line '" + line + "'");
  }
  if (!saw_output || !saw_count) throw ParseError(path + ": incomplete header");
  spec.validate();
  if (declared_params != spec.param_count()) {
    throw ParseError(path + ": declared parameter count does not match the architecture");
  }

  Mlp mlp;
  mlp.spec = spec;
  mlp.params.resize(declared_params);
  for (std::size_t i = 0; i < declared_params; ++i) {
    char buf[8];
    in.read(buf, 8);
    if (in.gcount() != 8) throw ParseError(path + ": truncated parameter block");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[b])) << (8 * b);
    }
    mlp.params[i] = from_le_bits(bits);
  }
  return mlp;
}

}  // namespace nnagg
