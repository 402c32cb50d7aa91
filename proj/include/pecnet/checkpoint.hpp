#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "pecnet/errors.hpp"
#include "pecnet/tensor.hpp"

// Checkpoint container: magic "PECN", format version u16, then one record
// per tensor until EOF. Record layout, all integers little-endian:
//
//   u32  name length
//   ...  UTF-8 name
//   u64  rank
//   u64  extent, per rank
//   u8   element width in bytes (4 = IEEE binary32, 8 = IEEE binary64)
//   ...  payload, little-endian IEEE floats at the recorded precision
//
// Same-precision round-trips are bit-exact. Optimizer moments and step
// counters ride along as ordinary records under reserved "adam." /
// "trainer." name prefixes.

namespace pecnet {

inline constexpr char kCheckpointMagic[4] = {'P', 'E', 'C', 'N'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

struct CheckpointRecord {
  std::string name;
  Shape shape;
  int dtype = 8;  // element width in bytes
  std::vector<float> f32;
  std::vector<double> f64;

  std::size_t numel() const { return numel_of(shape); }

  // Converts when the stored precision differs from T; exact otherwise.
  template <typename T>
  Tensor<T> as() const {
    std::vector<T> out(numel());
    if (dtype == 4) {
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<T>(f32[i]);
    } else {
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<T>(f64[i]);
    }
    return Tensor<T>(shape, std::move(out));
  }
};

namespace detail {

inline void put_u16(std::ostream& os, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline bool get_bytes(std::istream& is, char* dst, std::size_t n) {
  is.read(dst, static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(is.gcount()) == n;
}

inline std::uint64_t decode_u64(const char* b, int width) {
  std::uint64_t v = 0;
  for (int i = width - 1; i >= 0; --i)
    v = (v << 8) | static_cast<unsigned char>(b[i]);
  return v;
}

}  // namespace detail

class CheckpointWriter {
 public:
  explicit CheckpointWriter(const std::string& path)
      : path_(path), os_(path, std::ios::binary | std::ios::trunc) {
    if (!os_) throw IoError("cannot open checkpoint for writing: " + path);
    os_.write(kCheckpointMagic, 4);
    detail::put_u16(os_, kCheckpointVersion);
  }

  template <typename T>
  void add(const std::string& name, const Tensor<T>& t) {
    static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
    detail::put_u32(os_, static_cast<std::uint32_t>(name.size()));
    os_.write(name.data(), static_cast<std::streamsize>(name.size()));
    detail::put_u64(os_, t.rank());
    for (std::size_t i = 0; i < t.rank(); ++i) detail::put_u64(os_, t.dim(i));
    os_.put(static_cast<char>(sizeof(T)));
    os_.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.numel() * sizeof(T)));
  }

  void add_scalar(const std::string& name, double v) {
    add(name, Tensor<double>({1}, {v}));
  }

  void close() {
    os_.flush();
    if (!os_) throw IoError("checkpoint write failed: " + path_);
    os_.close();
  }

 private:
  std::string path_;
  std::ofstream os_;
};

inline std::vector<CheckpointRecord> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  if (!detail::get_bytes(is, magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw IoError("not a checkpoint file (bad magic): " + path);
  char vb[2];
  if (!detail::get_bytes(is, vb, 2))
    throw IoError("truncated checkpoint header: " + path);
  const auto version = static_cast<std::uint16_t>(detail::decode_u64(vb, 2));
  if (version != kCheckpointVersion)
    throw IoError("unsupported checkpoint version " + std::to_string(version) +
                  ": " + path);

  std::vector<CheckpointRecord> records;
  for (;;) {
    char lb[4];
    is.read(lb, 4);
    if (is.gcount() == 0) break;  // clean EOF between records
    if (is.gcount() != 4) throw IoError("truncated record header: " + path);
    const auto name_len = static_cast<std::size_t>(detail::decode_u64(lb, 4));
    CheckpointRecord rec;
    rec.name.resize(name_len);
    if (!detail::get_bytes(is, rec.name.data(), name_len))
      throw IoError("truncated record name: " + path);
    char rb[8];
    if (!detail::get_bytes(is, rb, 8))
      throw IoError("truncated record rank: " + path);
    const auto rank = detail::decode_u64(rb, 8);
    if (rank > 8) throw IoError("implausible tensor rank in: " + path);
    rec.shape.resize(rank);
    for (std::uint64_t i = 0; i < rank; ++i) {
      char eb[8];
      if (!detail::get_bytes(is, eb, 8))
        throw IoError("truncated record extents: " + path);
      rec.shape[i] = static_cast<std::size_t>(detail::decode_u64(eb, 8));
    }
    char dt;
    if (!detail::get_bytes(is, &dt, 1))
      throw IoError("truncated record dtype: " + path);
    rec.dtype = static_cast<int>(dt);
    if (rec.dtype != 4 && rec.dtype != 8)
      throw IoError("unsupported element width " + std::to_string(rec.dtype) +
                    " in: " + path);
    const std::size_t n = rec.numel();
    if (rec.dtype == 4) {
      rec.f32.resize(n);
      if (!detail::get_bytes(is, reinterpret_cast<char*>(rec.f32.data()),
                             n * 4))
        throw IoError("truncated payload for '" + rec.name + "': " + path);
    } else {
      rec.f64.resize(n);
      if (!detail::get_bytes(is, reinterpret_cast<char*>(rec.f64.data()),
                             n * 8))
        throw IoError("truncated payload for '" + rec.name + "': " + path);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

inline const CheckpointRecord* find_record(
    const std::vector<CheckpointRecord>& recs, const std::string& name) {
  for (const auto& r : recs)
    if (r.name == name) return &r;
  return nullptr;
}

}  // namespace pecnet
