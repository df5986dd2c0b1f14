#pragma once

// File plumbing: atomic writes, the binary checkpoint format and a stable
// 64-bit content hash used for provenance.
//
// Checkpoint layout (all little-endian):
//   offset  size      field
//   0       8         magic "NLWCKPT\0"
//   8       4         format version (uint32)
//   12      8         r_max (IEEE-754 binary64)
//   20      8         n_modes (uint64)
//   28      8         t (binary64)
//   36      8 n       u   samples at r_j, j = 1..n
//   36+8n   8 n       u_t samples

#include <array>
#include <charconv>
#include <cmath>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlwave/error.hpp"
#include "nlwave/radial_spectral.hpp"

namespace nlwave {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::array<char, 8> kCheckpointMagic = {'N', 'L', 'W', 'C', 'K', 'P', 'T', '\0'};

// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

// Writes `bytes` to `path` through a sibling temporary and a rename, so readers
// never observe a partially written file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("rename to " + path.string() + " failed: " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
}
inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
}
inline void put_f64(std::string& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

inline std::uint64_t get_u64(std::string_view in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}
inline std::uint32_t get_u32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}
inline double get_f64(std::string_view in, std::size_t at) { return std::bit_cast<double>(get_u64(in, at)); }

}  // namespace detail

inline std::string encode_checkpoint(const State& s) {
  std::string out;
  const std::size_t n = s.grid()->n_modes();
  out.reserve(36 + 16 * n);
  out.append(kCheckpointMagic.data(), kCheckpointMagic.size());
  detail::put_u32(out, kFormatVersion);
  detail::put_f64(out, s.grid()->r_max());
  detail::put_u64(out, n);
  detail::put_f64(out, s.t);
  for (double x : s.u.values) detail::put_f64(out, x);
  for (double x : s.ut.values) detail::put_f64(out, x);
  return out;
}

struct CheckpointHeader {
  std::uint32_t version = 0;
  double r_max = 0.0;
  std::uint64_t n_modes = 0;
  double t = 0.0;
};

inline CheckpointHeader decode_checkpoint_header(std::string_view bytes) {
  if (bytes.size() < 36 || std::memcmp(bytes.data(), kCheckpointMagic.data(), 8) != 0)
    throw IoError("not a checkpoint file (bad magic)");
  CheckpointHeader h;
  h.version = detail::get_u32(bytes, 8);
  if (h.version != kFormatVersion)
    throw IoError("unsupported checkpoint version " + std::to_string(h.version));
  h.r_max = detail::get_f64(bytes, 12);
  h.n_modes = detail::get_u64(bytes, 20);
  h.t = detail::get_f64(bytes, 28);
  if (bytes.size() != 36 + 16 * h.n_modes) throw IoError("checkpoint size does not match its header");
  return h;
}

inline State decode_checkpoint(std::string_view bytes) {
  const CheckpointHeader h = decode_checkpoint_header(bytes);
  GridPtr grid = make_grid(h.r_max, static_cast<std::size_t>(h.n_modes));
  if (grid->r_max() != h.r_max) throw IoError("checkpoint r_max is not a grid-consistent value");
  const std::size_t n = h.n_modes;
  std::vector<double> u(n), ut(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = detail::get_f64(bytes, 36 + 8 * j);
  for (std::size_t j = 0; j < n; ++j) ut[j] = detail::get_f64(bytes, 36 + 8 * (n + j));
  return State(RadialField(grid, std::move(u)), RadialField(grid, std::move(ut)), h.t);
}

inline void write_checkpoint(const std::filesystem::path& path, const State& s) {
  write_file_atomic(path, encode_checkpoint(s));
}

inline State read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

// Shortest text that parses back to the same binary64.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace nlwave
