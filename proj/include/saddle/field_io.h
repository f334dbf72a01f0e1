#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "saddle/grid.h"

namespace saddle {

/// Metadata stored next to the values in an SFLD1 file.
struct FieldHeader {
  DomainKind domain = DomainKind::Disk;
  double R = 0.0;
  int n = 0;
  /// k for planar runs, m for cone runs, 0 if not applicable.
  int symmetry_param = 0;
  double lambda = 0.0;
  double p = 1.0;
  double M = 1.0;
};

/// SFLD1: ASCII header lines ("SFLD1", "mode Disk|STQuadrant", "R", "n", "h",
/// "k" or "m", "lambda", "p", "M", "data"), then n*n little-endian doubles in
/// row-major order (j slow), then n*n one-byte node kinds.
void write_field(const std::filesystem::path& path, const ScalarField& field,
                 const FieldHeader& header);

struct LoadedField {
  FieldHeader header;
  ScalarField field;
};

/// Reads an SFLD1 file. The grid is rebuilt from the header; the stored mask
/// must agree with it (ShapeError otherwise).
LoadedField read_field(const std::filesystem::path& path);

/// Reads a field and checks that it lives on `grid`.
ScalarField read_field_on(const std::filesystem::path& path, const GridPtr& grid);

/// Flat key=value text file, keys sorted.
using KeyValues = std::map<std::string, std::string>;
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues read_key_values(const std::filesystem::path& path);

/// Round-trip-exact decimal form of a double.
std::string format_double(double x);

}  // namespace saddle
