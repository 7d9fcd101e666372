#include "tenas/metrics/data_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "tenas/common.hpp"

namespace tenas::metrics {

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return __builtin_bswap64(v);
  }
}

}  // namespace

nn::Tensor read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open data file '" + path.string() + "'");
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("data file '" + path.string() + "' is empty");
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "shape") {
    throw ConfigError("data file '" + path.string() + "' must start with a 'shape' header line");
  }
  nn::Shape shape;
  for (std::size_t d; hs >> d;) shape.push_back(d);
  if (shape.size() < 2) {
    throw ConfigError("data file '" + path.string() + "' needs a sample dimension and a sample shape");
  }
  nn::Tensor t(shape);
  for (auto& v : t.data()) {
    std::uint64_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
      throw ConfigError("data file '" + path.string() + "' is shorter than its header " +
                        nn::shape_string(shape));
    }
    bits = to_little_endian(bits);
    std::memcpy(&v, &bits, sizeof v);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ConfigError("data file '" + path.string() + "' has trailing bytes");
  }
  if (!t.all_finite()) throw ConfigError("data file '" + path.string() + "' contains NaN or Inf");
  return t;
}

void write_tensor_file(const std::filesystem::path& path, const nn::Tensor& tensor) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write data file '" + path.string() + "'");
  out << "shape";
  for (auto d : tensor.shape()) out << ' ' << d;
  out << '\n';
  for (double v : tensor.data()) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof v);
    bits = to_little_endian(bits);
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
}

}  // namespace tenas::metrics
