#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "neuridx/error.hpp"

// Little-endian binary encoding shared by the .cdx/.ndx/som.map formats:
// magic (4 bytes), version u16, then a u32-length-prefixed UTF-8 JSON
// header padded with spaces to a block multiple so that file size depends
// only on structural parameters, then the raw payload.
namespace neuridx::io {

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBlock = 128;

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot open for writing: " + path.string());
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open for reading: " + path.string());
  return in;
}

inline void write_bytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) fail(Errc::io_error, "write failed");
}

inline void read_bytes(std::istream& in, void* data, std::size_t n) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    fail(Errc::io_error, "unexpected end of file");
}

inline void write_u16(std::ostream& out, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>(v >> 8)};
  write_bytes(out, b, 2);
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  write_bytes(out, b, 4);
}

inline void write_f64(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  write_bytes(out, b, 8);
}

inline std::uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  read_bytes(in, b, 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  read_bytes(in, b, 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline double read_f64(std::istream& in) {
  unsigned char b[8];
  read_bytes(in, b, 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

inline void write_magic(std::ostream& out, const char magic[4],
                        std::uint16_t version = kFormatVersion) {
  write_bytes(out, magic, 4);
  write_u16(out, version);
}

inline void expect_magic(std::istream& in, const char magic[4],
                         std::uint16_t version = kFormatVersion) {
  char got[4];
  read_bytes(in, got, 4);
  if (std::string_view(got, 4) != std::string_view(magic, 4))
    fail(Errc::format_error, "bad magic");
  std::uint16_t v = read_u16(in);
  if (v != version)
    fail(Errc::format_error, "unsupported format version " + std::to_string(v));
}

inline void write_json_block(std::ostream& out, const nlohmann::json& j,
                             std::size_t block = kHeaderBlock) {
  std::string text = j.dump();
  std::size_t padded = ((text.size() + block - 1) / block) * block;
  text.resize(padded, ' ');
  write_u32(out, static_cast<std::uint32_t>(text.size()));
  write_bytes(out, text.data(), text.size());
}

inline nlohmann::json read_json_block(std::istream& in) {
  std::uint32_t len = read_u32(in);
  std::string text(len, '\0');
  read_bytes(in, text.data(), len);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::format_error, "corrupt JSON header");
  return j;
}

}  // namespace neuridx::io
