#include "saddle/field_io.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "saddle/errors.h"

namespace saddle {

namespace {

static_assert(std::endian::native == std::endian::little,
              "SFLD1 writer assumes a little-endian host");

std::string expect_line(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("truncated SFLD1 header");
  std::istringstream ls(line);
  std::string k, v;
  ls >> k >> v;
  if (k != key) throw ConfigError("SFLD1 header: expected '" + key + "', got '" + k + "'");
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_field(const std::filesystem::path& path, const ScalarField& field,
                 const FieldHeader& header) {
  const GridSpec& g = field.grid();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  const bool disk = g.domain() == DomainKind::Disk;
  out << "SFLD1\n";
  out << "mode " << (disk ? "Disk" : "STQuadrant") << '\n';
  out << "R " << format_double(g.R()) << '\n';
  out << "n " << g.n() << '\n';
  out << "h " << format_double(g.h()) << '\n';
  out << (disk ? "k " : "m ") << (disk ? header.symmetry_param : g.m()) << '\n';
  out << "lambda " << format_double(header.lambda) << '\n';
  out << "p " << format_double(header.p) << '\n';
  out << "M " << format_double(header.M) << '\n';
  out << "data\n";
  const auto vals = field.values();
  out.write(reinterpret_cast<const char*>(vals.data()),
            static_cast<std::streamsize>(vals.size() * sizeof(double)));
  const auto mask = g.mask();
  out.write(reinterpret_cast<const char*>(mask.data()), static_cast<std::streamsize>(mask.size()));
  if (!out) throw ConfigError("failed writing " + path.string());
}

LoadedField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string magic;
  std::getline(in, magic);
  if (magic != "SFLD1") throw ConfigError(path.string() + " is not an SFLD1 file");

  LoadedField out;
  FieldHeader& h = out.header;
  const std::string mode = expect_line(in, "mode");
  if (mode == "Disk") {
    h.domain = DomainKind::Disk;
  } else if (mode == "STQuadrant") {
    h.domain = DomainKind::STQuadrant;
  } else {
    throw ConfigError("unknown SFLD1 mode " + mode);
  }
  h.R = std::stod(expect_line(in, "R"));
  h.n = std::stoi(expect_line(in, "n"));
  expect_line(in, "h");
  h.symmetry_param = std::stoi(expect_line(in, h.domain == DomainKind::Disk ? "k" : "m"));
  h.lambda = std::stod(expect_line(in, "lambda"));
  h.p = std::stod(expect_line(in, "p"));
  h.M = std::stod(expect_line(in, "M"));
  std::string data;
  std::getline(in, data);
  if (data != "data") throw ConfigError("SFLD1 header missing 'data' marker");

  GridPtr grid = h.domain == DomainKind::Disk ? GridSpec::disk(h.R, h.n)
                                              : GridSpec::st_quadrant(h.R, h.n, h.symmetry_param);
  out.field = ScalarField(grid);
  auto vals = out.field.values();
  in.read(reinterpret_cast<char*>(vals.data()),
          static_cast<std::streamsize>(vals.size() * sizeof(double)));
  std::vector<char> mask(grid->size());
  in.read(mask.data(), static_cast<std::streamsize>(mask.size()));
  if (!in) throw ConfigError("truncated SFLD1 payload in " + path.string());
  for (std::size_t idx = 0; idx < mask.size(); ++idx) {
    if (static_cast<std::uint8_t>(mask[idx]) != static_cast<std::uint8_t>(grid->kind(idx)))
      throw ShapeError("stored node mask does not match the grid in " + path.string());
  }
  return out;
}

ScalarField read_field_on(const std::filesystem::path& path, const GridPtr& grid) {
  LoadedField lf = read_field(path);
  if (!lf.field.grid().same_as(*grid))
    throw ShapeError(path.string() + " was written on a different grid");
  ScalarField f(grid);
  const auto src = lf.field.values();
  std::copy(src.begin(), src.end(), f.values().begin());
  return f;
}

void write_key_values(const std::filesystem::path& path, const KeyValues& kv) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed manifest line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace saddle
