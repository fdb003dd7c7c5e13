#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "det4d/core/errors.hpp"
#include "det4d/geometry/raster.hpp"

namespace det4d {

// Raster file layout: 16-byte header (4-byte magic "D4DR", u32 width, u32
// height, u32 channels, all little-endian) followed by row-major float32
// little-endian samples. Instance ids are stored as float32; they are exact
// up to 2^24.

inline constexpr char kRasterMagic[4] = {'D', '4', 'D', 'R'};

namespace detail {

inline void put_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

template <class T>
void write_raster(const Raster<T>& raster, const std::filesystem::path& path) {
  std::string buf;
  buf.reserve(16 + raster.data().size() * 4);
  buf.append(kRasterMagic, 4);
  detail::put_u32_le(buf, static_cast<std::uint32_t>(raster.width()));
  detail::put_u32_le(buf, static_cast<std::uint32_t>(raster.height()));
  detail::put_u32_le(buf, 1);  // channels
  for (const T v : raster.data())
    detail::put_u32_le(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_raster: cannot open " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write_raster: short write to " + path.string());
}

template <class T>
Raster<T> read_raster(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_raster: cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kRasterMagic, 4) != 0)
    throw SchemaError("read_raster: bad header in " + path.string());
  const std::uint32_t width = detail::get_u32_le(bytes.data() + 4);
  const std::uint32_t height = detail::get_u32_le(bytes.data() + 8);
  const std::uint32_t channels = detail::get_u32_le(bytes.data() + 12);
  if (channels != 1) throw SchemaError("read_raster: unsupported channel count");
  const std::size_t expected = 16 + static_cast<std::size_t>(width) * height * 4;
  if (bytes.size() != expected) throw SchemaError("read_raster: truncated " + path.string());

  Raster<T> raster(static_cast<int>(width), static_cast<int>(height));
  for (std::size_t i = 0; i < static_cast<std::size_t>(width) * height; ++i) {
    const float f = std::bit_cast<float>(detail::get_u32_le(bytes.data() + 16 + i * 4));
    if constexpr (std::is_integral_v<T>)
      raster.data()[i] = static_cast<T>(std::llround(f));
    else
      raster.data()[i] = static_cast<T>(f);
  }
  return raster;
}

}  // namespace det4d
