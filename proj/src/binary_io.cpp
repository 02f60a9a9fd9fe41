#include "promptreps/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "promptreps/error.hpp"

namespace promptreps::binary {

void Writer::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void Writer::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void Writer::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void Writer::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void Writer::varint(std::uint64_t v) {
  while (v >= 0x80) {
    buf_.push_back(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  buf_.push_back(static_cast<char>(v));
}

void Writer::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  bytes(s);
}

void Writer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Reader Reader::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Reader(std::move(data), path.string());
}

void Reader::fail(const std::string& what) const {
  throw IoError((source_.empty() ? std::string("index") : source_) + ": " + what + " at byte " +
                std::to_string(pos_));
}

const char* Reader::take(std::size_t n) {
  if (n > remaining()) fail("truncated data");
  const char* p = buf_.data() + pos_;
  pos_ += n;
  return p;
}

std::uint8_t Reader::u8() { return static_cast<std::uint8_t>(*take(1)); }

std::uint32_t Reader::u32() {
  const auto* p = reinterpret_cast<const unsigned char*>(take(4));
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t Reader::u64() {
  const auto* p = reinterpret_cast<const unsigned char*>(take(8));
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

float Reader::f32() { return std::bit_cast<float>(u32()); }

double Reader::f64() { return std::bit_cast<double>(u64()); }

std::uint64_t Reader::varint() {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    auto b = u8();
    v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
    if (!(b & 0x80)) return v;
  }
  fail("varint too long");
}

std::string Reader::bytes(std::size_t n) { return std::string(take(n), n); }

std::string Reader::str() { return bytes(u32()); }

void Reader::expect_magic(std::string_view magic) {
  if (remaining() < magic.size() || std::memcmp(buf_.data() + pos_, magic.data(), magic.size()) != 0) {
    fail("bad magic, expected \"" + std::string(magic) + "\"");
  }
  pos_ += magic.size();
}

}  // namespace promptreps::binary
