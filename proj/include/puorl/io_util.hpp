#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "puorl/errors.hpp"

// Little-endian binary IO helpers shared by the on-disk formats.
namespace puorl::io {

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

inline void read_bytes(std::istream& is, void* p, std::size_t n,
                       const char* what) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) {
    throw FormatError(std::string("truncated file while reading ") + what);
  }
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  write_bytes(os, b, 4);
}

inline std::uint32_t read_u32(std::istream& is, const char* what) {
  unsigned char b[4];
  read_bytes(is, b, 4, what);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void write_u8(std::ostream& os, std::uint8_t v) { write_bytes(os, &v, 1); }

inline std::uint8_t read_u8(std::istream& is, const char* what) {
  std::uint8_t v;
  read_bytes(is, &v, 1, what);
  return v;
}

// f32 arrays are written as raw IEEE-754 bits; x86 is little-endian already.
inline void write_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_u32(os, bits);
}

inline float read_f32(std::istream& is, const char* what) {
  const std::uint32_t bits = read_u32(is, what);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

inline void write_f32_array(std::ostream& os, std::span<const float> v) {
  static_assert(sizeof(float) == 4);
  write_bytes(os, v.data(), v.size() * 4);
}

inline void read_f32_array(std::istream& is, std::span<float> v,
                           const char* what) {
  read_bytes(is, v.data(), v.size() * 4, what);
}

inline void expect_magic(std::istream& is, const char (&magic)[9],
                         const char* what) {
  char got[8];
  read_bytes(is, got, 8, what);
  if (std::memcmp(got, magic, 8) != 0) {
    throw FormatError(std::string("bad magic for ") + what + ": expected '" +
                      std::string(magic, 8) + "', found '" +
                      std::string(got, 8) + "'");
  }
}

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& contents);

}  // namespace puorl::io
