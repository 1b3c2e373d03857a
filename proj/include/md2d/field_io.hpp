#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "md2d/error.hpp"
#include "md2d/field.hpp"

namespace md2d {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

inline constexpr std::uint32_t kFieldDumpVersion = 1;

/// @brief Binary dump: "MD2D", u32 version, u32 n, f64 box_period, u8 representation,
/// then n*n row-major complex64 values (float32 real, float32 imaginary).
inline void write_field_dump(const std::string& path, const ComplexField2D& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  const char magic[4] = {'M', 'D', '2', 'D'};
  const std::uint32_t version = kFieldDumpVersion;
  const std::uint32_t n = static_cast<std::uint32_t>(f.grid().n());
  const double L = f.grid().box_period();
  const std::uint8_t rep = static_cast<std::uint8_t>(f.representation());
  os.write(magic, 4);
  os.write(reinterpret_cast<const char*>(&version), sizeof version);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&L), sizeof L);
  os.write(reinterpret_cast<const char*>(&rep), sizeof rep);
  std::vector<float> buf(2 * f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    buf[2 * k] = static_cast<float>(f[k].real());
    buf[2 * k + 1] = static_cast<float>(f[k].imag());
  }
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!os) throw IoError("write failed for " + path);
}

inline ComplexField2D read_field_dump(const std::string& path, double dealias_fraction = 2.0 / 3.0) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, n = 0;
  double L = 0.0;
  std::uint8_t rep = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&version), sizeof version);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&L), sizeof L);
  is.read(reinterpret_cast<char*>(&rep), sizeof rep);
  if (!is || std::memcmp(magic, "MD2D", 4) != 0) throw IoError(path + ": not an MD2D field dump");
  if (version != kFieldDumpVersion) throw IoError(path + ": unsupported dump version " + std::to_string(version));
  if (rep > 1) throw IoError(path + ": bad representation tag");
  Grid2D g(L, static_cast<int>(n), dealias_fraction);
  std::vector<float> buf(2 * g.size());
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!is) throw IoError(path + ": truncated payload");
  std::vector<cplx> samples(g.size());
  for (std::size_t k = 0; k < samples.size(); ++k) samples[k] = cplx(buf[2 * k], buf[2 * k + 1]);
  return ComplexField2D(g, static_cast<Representation>(rep), std::move(samples));
}

/// CSV with header "N,value".
inline void write_spectrum_csv(const std::string& path, const std::vector<std::pair<double, double>>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.precision(17);
  os << "N,value\n";
  for (const auto& [N, v] : rows) os << N << ',' << v << '\n';
  if (!os) throw IoError("write failed for " + path);
}

}  // namespace md2d
