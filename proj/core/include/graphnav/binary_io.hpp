#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

// Little-endian binary stream helpers shared by all file formats.
// The build targets little-endian hosts; values are written byte-exact.

namespace graphnav::io {

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  static_assert(std::is_trivially_copyable_v<T>);
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("binary read: unexpected end of stream");
  return v;
}

inline void write_u8(std::ostream& os, std::uint8_t v) { write_raw(os, v); }
inline void write_u32(std::ostream& os, std::uint32_t v) { write_raw(os, v); }
inline void write_i32(std::ostream& os, std::int32_t v) { write_raw(os, v); }
inline void write_u64(std::ostream& os, std::uint64_t v) { write_raw(os, v); }
inline void write_f32(std::ostream& os, float v) { write_raw(os, v); }
inline void write_f64(std::ostream& os, double v) { write_raw(os, v); }

inline std::uint8_t read_u8(std::istream& is) { return read_raw<std::uint8_t>(is); }
inline std::uint32_t read_u32(std::istream& is) { return read_raw<std::uint32_t>(is); }
inline std::int32_t read_i32(std::istream& is) { return read_raw<std::int32_t>(is); }
inline std::uint64_t read_u64(std::istream& is) { return read_raw<std::uint64_t>(is); }
inline float read_f32(std::istream& is) { return read_raw<float>(is); }
inline double read_f64(std::istream& is) { return read_raw<double>(is); }

template <typename T>
void write_vec(std::ostream& os, const std::vector<T>& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  write_u64(os, v.size());
  if (!v.empty())
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
std::vector<T> read_vec(std::istream& is) {
  static_assert(std::is_trivially_copyable_v<T>);
  const std::uint64_t n = read_u64(is);
  std::vector<T> v(n);
  if (n > 0) {
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(T)));
    if (!is) throw std::runtime_error("binary read: unexpected end of stream");
  }
  return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is) {
  const std::uint32_t n = read_u32(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw std::runtime_error("binary read: unexpected end of stream");
  return s;
}

inline void expect_magic(std::istream& is, const char magic[4], const char* what) {
  char buf[4];
  is.read(buf, 4);
  if (!is || std::memcmp(buf, magic, 4) != 0)
    throw std::runtime_error(std::string(what) + ": bad magic");
}

inline void write_magic(std::ostream& os, const char magic[4]) { os.write(magic, 4); }

}  // namespace graphnav::io
