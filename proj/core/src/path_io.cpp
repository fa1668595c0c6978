#include "phivar/path_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "phivar/error.hpp"

namespace phivar {

namespace {

constexpr char kMagic[8] = {'P', 'H', 'I', 'V', 'P', 'A', 'T', 'H'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(b.data(), 8);
}

bool get_u64(std::istream& in, std::uint64_t& v) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return true;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_path_csv(std::ostream& out, const DyadicPath& path) {
  out << "t,value\n";
  const int shift = -static_cast<int>(path.level);
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    out << format_double(std::ldexp(static_cast<double>(k), shift)) << ','
        << format_double(path.values[k]) << '\n';
  }
}

void write_path_binary(std::ostream& out, const DyadicPath& path) {
  out.write(kMagic, sizeof kMagic);
  put_u64(out, path.level);
  for (double v : path.values) put_u64(out, std::bit_cast<std::uint64_t>(v));
}

DyadicPath read_path_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw InvalidArgument("path binary: bad magic");
  }
  std::uint64_t level = 0;
  if (!get_u64(in, level) || level > kPathCap) throw InvalidArgument("path binary: bad level");
  DyadicPath path;
  path.level = level;
  path.values.resize((std::size_t{1} << level) + 1);
  for (double& v : path.values) {
    std::uint64_t bits = 0;
    if (!get_u64(in, bits)) throw InvalidArgument("path binary: truncated data");
    v = std::bit_cast<double>(bits);
  }
  return path;
}

}  // namespace phivar
