#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace towe::detail {

template <typename UInt>
void write_le(std::ostream& out, UInt value) {
  char bytes[sizeof(UInt)];
  for (std::size_t k = 0; k < sizeof(UInt); ++k) {
    bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFF);
  }
  out.write(bytes, sizeof(UInt));
}

template <typename UInt>
bool read_le(std::istream& in, UInt& value) {
  unsigned char bytes[sizeof(UInt)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(UInt))) return false;
  value = 0;
  for (std::size_t k = 0; k < sizeof(UInt); ++k) value |= static_cast<UInt>(bytes[k]) << (8 * k);
  return true;
}

inline void write_f64(std::ostream& out, double v) { write_le(out, std::bit_cast<std::uint64_t>(v)); }
inline void write_f32(std::ostream& out, float v) { write_le(out, std::bit_cast<std::uint32_t>(v)); }

inline bool read_f64(std::istream& in, double& v) {
  std::uint64_t bits = 0;
  if (!read_le(in, bits)) return false;
  v = std::bit_cast<double>(bits);
  return true;
}

inline bool read_f32(std::istream& in, float& v) {
  std::uint32_t bits = 0;
  if (!read_le(in, bits)) return false;
  v = std::bit_cast<float>(bits);
  return true;
}

inline bool read_magic(std::istream& in, const char (&magic)[5]) {
  char bytes[4];
  return in.read(bytes, 4) && std::memcmp(bytes, magic, 4) == 0;
}

}  // namespace towe::detail
