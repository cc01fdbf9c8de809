#pragma once

#include <string>

#include "magscatter/grid.hpp"

namespace magscatter {

/// Field file layout (all little-endian):
///   bytes  0..15  magic "MAGSCATTER-FLD01"
///   bytes 16..19  int32 dim
///   bytes 20..23  int32 points per axis m
///   bytes 24..31  float64 half width L
///   bytes 32..35  int32 complex flag (1 complex, 0 real)
///   bytes 36..39  int32 reserved, zero
///   bytes 40..    m^dim values in row-major order (last axis fastest), float64;
///                 complex values interleaved as re, im
inline constexpr char kFieldMagic[17] = "MAGSCATTER-FLD01";

void write_field(const std::string& path, const ComplexField& field);
void write_field(const std::string& path, const RealField& field);
ComplexField read_complex_field(const std::string& path);
RealField read_real_field(const std::string& path);

/// Writes to path + ".tmp" and renames over path.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

}  // namespace magscatter
