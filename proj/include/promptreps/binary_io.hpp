#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace promptreps::binary {

/// Append-only little-endian byte buffer.
class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  /// LEB128 unsigned varint.
  void varint(std::uint64_t v);
  void bytes(std::string_view s) { buf_.append(s); }
  /// u32 length prefix followed by raw bytes.
  void str(std::string_view s);

  const std::string& data() const { return buf_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::string buf_;
};

/// Bounds-checked little-endian reader; throws IoError on truncation.
class Reader {
 public:
  explicit Reader(std::string data, std::string source = {})
      : buf_(std::move(data)), source_(std::move(source)) {}
  static Reader open(const std::filesystem::path& path);

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  std::uint64_t varint();
  std::string bytes(std::size_t n);
  std::string str();

  bool at_end() const { return pos_ == buf_.size(); }
  std::size_t remaining() const { return buf_.size() - pos_; }
  /// Throws IoError unless the next bytes equal `magic`.
  void expect_magic(std::string_view magic);
  [[noreturn]] void fail(const std::string& what) const;

 private:
  const char* take(std::size_t n);

  std::string buf_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace promptreps::binary
