#ifndef LEGALATTR_BINARY_IO_H_
#define LEGALATTR_BINARY_IO_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace legalattr {

// Little-endian encoder appending to a byte string.
class ByteWriter {
 public:
  void PutU8(uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void PutU16(uint16_t v);
  void PutU32(uint32_t v);
  void PutU64(uint64_t v);
  void PutF32(float v);
  void PutF64(double v);
  void PutBytes(std::string_view bytes) { out_.append(bytes); }
  // u32 length prefix followed by the raw bytes.
  void PutString(std::string_view s);

  const std::string &bytes() const { return out_; }
  std::string Release() { return std::move(out_); }

 private:
  std::string out_;
};

// Little-endian decoder over a byte view. Every read past the end throws
// an ErrorKind::kTruncated error mentioning `what`.
class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  uint8_t GetU8(const char *what);
  uint16_t GetU16(const char *what);
  uint32_t GetU32(const char *what);
  uint64_t GetU64(const char *what);
  float GetF32(const char *what);
  double GetF64(const char *what);
  std::string_view GetBytes(size_t n, const char *what);
  std::string GetString(const char *what);

  size_t position() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  void Require(size_t n, const char *what) const;

  std::string_view data_;
  size_t pos_ = 0;
};

// CRC-32 (IEEE 802.3 polynomial, as used by zlib and PNG).
uint32_t Crc32(std::string_view bytes);

}  // namespace legalattr

#endif  // LEGALATTR_BINARY_IO_H_
