// Dense row-major float tensors and the HMLT1 binary container.
//
// HMLT1 layout: magic bytes "HMLT1", u8 rank, rank x u32 little-endian dims,
// float32 little-endian row-major payload.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "hml/common.hpp"

namespace hml {

template <typename T = float>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(count(shape_), T(0));
  }
  Tensor(std::vector<int> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != count(shape_)) throw DataError("Tensor: shape/data size mismatch");
  }

  static size_t count(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
      if (d < 0) throw DataError("Tensor: negative dim");
      n *= static_cast<size_t>(d);
    }
    return n;
  }

  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int rank() const { return static_cast<int>(shape_.size()); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& vec() { return data_; }
  const std::vector<T>& vec() const { return data_; }

  T& operator[](size_t i) { return data_[i]; }
  const T& operator[](size_t i) const { return data_[i]; }

  // 3-d accessor (channel, x, y); the dominant layout in this project.
  T& at(int c, int x, int y) {
    return data_[(static_cast<size_t>(c) * shape_[1] + x) * shape_[2] + y];
  }
  const T& at(int c, int x, int y) const {
    return data_[(static_cast<size_t>(c) * shape_[1] + x) * shape_[2] + y];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool operator==(const Tensor& o) const { return shape_ == o.shape_ && data_ == o.data_; }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape_);
    for (size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

using Image = Tensor<float>;

// ---------------------------------------------------------------------------
// HMLT1 io

namespace detail {

inline void put_u32_le(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                        static_cast<unsigned char>((v >> 8) & 0xFF),
                        static_cast<unsigned char>((v >> 16) & 0xFF),
                        static_cast<unsigned char>((v >> 24) & 0xFF)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline uint32_t get_u32_le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw FormatError("HMLT1: truncated header");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline void put_f32_le(std::ostream& os, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32_le(os, bits);
}

inline float get_f32_le(std::istream& is) {
  uint32_t bits = get_u32_le(is);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

constexpr bool host_is_little_endian() {
  return std::endian::native == std::endian::little;
}

}  // namespace detail

template <typename T>
inline void write_hmlt1(std::ostream& os, const Tensor<T>& t) {
  os.write("HMLT1", 5);
  if (t.rank() > 255) throw FormatError("HMLT1: rank exceeds u8");
  unsigned char rank = static_cast<unsigned char>(t.rank());
  os.write(reinterpret_cast<const char*>(&rank), 1);
  for (int i = 0; i < t.rank(); ++i) detail::put_u32_le(os, static_cast<uint32_t>(t.dim(i)));
  if constexpr (std::is_same_v<T, float>) {
    if (detail::host_is_little_endian()) {
      os.write(reinterpret_cast<const char*>(t.data()),
               static_cast<std::streamsize>(t.size() * 4));
      return;
    }
  }
  for (size_t i = 0; i < t.size(); ++i) detail::put_f32_le(os, static_cast<float>(t[i]));
}

template <typename T = float>
inline Tensor<T> read_hmlt1(std::istream& is) {
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, "HMLT1", 5) != 0) throw FormatError("HMLT1: bad magic");
  unsigned char rank;
  is.read(reinterpret_cast<char*>(&rank), 1);
  if (!is) throw FormatError("HMLT1: truncated rank");
  std::vector<int> shape(rank);
  for (int i = 0; i < rank; ++i) {
    uint32_t d = detail::get_u32_le(is);
    if (d > (1u << 30)) throw FormatError("HMLT1: implausible dim");
    shape[static_cast<size_t>(i)] = static_cast<int>(d);
  }
  Tensor<T> t(shape);
  if constexpr (std::is_same_v<T, float>) {
    if (detail::host_is_little_endian()) {
      is.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * 4));
      if (!is) throw FormatError("HMLT1: truncated payload");
      return t;
    }
  }
  for (size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(detail::get_f32_le(is));
  if (!is) throw FormatError("HMLT1: truncated payload");
  return t;
}

template <typename T>
inline void save_hmlt1(const std::string& path, const Tensor<T>& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open for writing: " + path);
  write_hmlt1(os, t);
}

template <typename T = float>
inline Tensor<T> load_hmlt1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open: " + path);
  return read_hmlt1<T>(is);
}

}  // namespace hml
