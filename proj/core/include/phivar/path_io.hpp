#pragma once

#include <iosfwd>
#include <string>

#include "phivar/dyadic.hpp"

namespace phivar {

// CSV with header "t,value", one row per grid point, shortest round-trip
// decimal formatting.
void write_path_csv(std::ostream& out, const DyadicPath& path);

// 16-byte header (magic "PHIVPATH", level as little-endian uint64) followed
// by 2^level + 1 little-endian doubles.
void write_path_binary(std::ostream& out, const DyadicPath& path);
// Throws InvalidArgument on a malformed stream.
DyadicPath read_path_binary(std::istream& in);

// Shortest decimal text that parses back to x.
std::string format_double(double x);

}  // namespace phivar
