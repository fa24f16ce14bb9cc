#include "legalattr/binary_io.h"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>

#include "legalattr/error.h"

namespace legalattr {
namespace {

template <typename T>
void PutLittleEndian(T v, std::string *out) {
  for (size_t i = 0; i < sizeof(T); ++i) {
    out->push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T GetLittleEndian(std::string_view bytes) {
  T v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(static_cast<unsigned char>(bytes[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void ByteWriter::PutU16(uint16_t v) { PutLittleEndian(v, &out_); }
void ByteWriter::PutU32(uint32_t v) { PutLittleEndian(v, &out_); }
void ByteWriter::PutU64(uint64_t v) { PutLittleEndian(v, &out_); }
void ByteWriter::PutF32(float v) { PutU32(std::bit_cast<uint32_t>(v)); }
void ByteWriter::PutF64(double v) { PutU64(std::bit_cast<uint64_t>(v)); }

void ByteWriter::PutString(std::string_view s) {
  PutU32(static_cast<uint32_t>(s.size()));
  out_.append(s);
}

void ByteReader::Require(size_t n, const char *what) const {
  if (remaining() < n) {
    throw Error(ErrorKind::kTruncated,
                std::string("unexpected end of data while reading ") + what +
                    " at byte " + std::to_string(pos_));
  }
}

uint8_t ByteReader::GetU8(const char *what) {
  Require(1, what);
  return static_cast<uint8_t>(data_[pos_++]);
}

uint16_t ByteReader::GetU16(const char *what) {
  Require(2, what);
  auto v = GetLittleEndian<uint16_t>(data_.substr(pos_));
  pos_ += 2;
  return v;
}

uint32_t ByteReader::GetU32(const char *what) {
  Require(4, what);
  auto v = GetLittleEndian<uint32_t>(data_.substr(pos_));
  pos_ += 4;
  return v;
}

uint64_t ByteReader::GetU64(const char *what) {
  Require(8, what);
  auto v = GetLittleEndian<uint64_t>(data_.substr(pos_));
  pos_ += 8;
  return v;
}

float ByteReader::GetF32(const char *what) {
  return std::bit_cast<float>(GetU32(what));
}

double ByteReader::GetF64(const char *what) {
  return std::bit_cast<double>(GetU64(what));
}

std::string_view ByteReader::GetBytes(size_t n, const char *what) {
  Require(n, what);
  auto v = data_.substr(pos_, n);
  pos_ += n;
  return v;
}

std::string ByteReader::GetString(const char *what) {
  const uint32_t n = GetU32(what);
  return std::string(GetBytes(n, what));
}

uint32_t Crc32(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large buffers.
  size_t pos = 0;
  while (pos < bytes.size()) {
    const size_t chunk = std::min<size_t>(bytes.size() - pos, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef *>(bytes.data() + pos),
                static_cast<uInt>(chunk));
    pos += chunk;
  }
  return static_cast<uint32_t>(crc);
}

}  // namespace legalattr
