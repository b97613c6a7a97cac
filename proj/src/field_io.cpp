#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "frontlab/field.hpp"

namespace frontlab {

namespace {

constexpr char kMagic[5] = {'F', 'L', 'A', 'B', '1'};

template <typename T>
void put(std::ostream& os, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw ConfigError("truncated snapshot file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(const ScalarField& u, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof(kMagic));
  const Grid& g = u.grid;
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(g.n1));
  if (g.dim == 2) put<std::uint64_t>(os, static_cast<std::uint64_t>(g.n2));
  put<double>(os, g.h);
  put<double>(os, g.origin[0]);
  if (g.dim == 2) put<double>(os, g.origin[1]);
  put<double>(os, u.t);
  for (Eigen::Index j = 0; j < g.n2; ++j)
    for (Eigen::Index i = 0; i < g.n1; ++i) put<double>(os, u.values(i, j));
  if (!os) throw ConfigError("write failed for " + path.string());
}

ScalarField read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path.string());
  char magic[5];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ConfigError(path.string() + " is not a FLAB1 snapshot");
  Grid g;
  g.dim = static_cast<int>(get<std::uint32_t>(is));
  if (g.dim != 1 && g.dim != 2) throw ConfigError("bad dimension in " + path.string());
  g.n1 = static_cast<Eigen::Index>(get<std::uint64_t>(is));
  g.n2 = g.dim == 2 ? static_cast<Eigen::Index>(get<std::uint64_t>(is)) : 1;
  g.h = get<double>(is);
  g.origin[0] = get<double>(is);
  g.origin[1] = g.dim == 2 ? get<double>(is) : 0.0;
  ScalarField u(g, get<double>(is));
  for (Eigen::Index j = 0; j < g.n2; ++j)
    for (Eigen::Index i = 0; i < g.n1; ++i) u.values(i, j) = get<double>(is);
  return u;
}

void write_csv(const ScalarField& u, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  os << std::setprecision(17);
  const Grid& g = u.grid;
  if (g.dim == 1) {
    os << "x,u\n";
    for (Eigen::Index i = 0; i < g.n1; ++i) os << g.x1(i) << ',' << u.values(i, 0) << '\n';
  } else {
    os << "x1,x2,u\n";
    for (Eigen::Index j = 0; j < g.n2; ++j)
      for (Eigen::Index i = 0; i < g.n1; ++i) os << g.x1(i) << ',' << g.x2(j) << ',' << u.values(i, j) << '\n';
  }
}

}  // namespace frontlab
