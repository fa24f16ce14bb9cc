#include <cmath>

#include "json.hpp"
#include "legalattr/binary_io.h"
#include "legalattr/emission.h"
#include "legalattr/error.h"

namespace legalattr {
namespace emission {
namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "LXEM";

EmbeddingTable LoadBinary(std::string_view bytes) {
  ByteReader reader(bytes);
  if (reader.GetBytes(kMagic.size(), "magic") != kMagic) {
    throw Error(ErrorKind::kFormat, "not an embedding file (bad magic)");
  }
  const uint16_t version = reader.GetU16("version");
  if (version != kEmbeddingFormatVersion) {
    throw Error(ErrorKind::kVersion,
                "unsupported embedding format version " +
                    std::to_string(version) + " (expected " +
                    std::to_string(kEmbeddingFormatVersion) + ")");
  }
  const uint32_t dimension = reader.GetU32("dimension");
  const uint64_t count = reader.GetU64("entry count");
  std::string provenance = reader.GetString("provenance");
  EmbeddingTable table(dimension, std::move(provenance));

  for (uint64_t i = 0; i < count; ++i) {
    if (reader.remaining() == 0) {
      throw Error(ErrorKind::kTruncated,
                  "embedding payload length mismatch: header declares " +
                      std::to_string(count) + " entries, found " +
                      std::to_string(i));
    }
    EmbeddingKey key;
    key.doc_id = reader.GetString("entry key");
    key.sentence = reader.GetU32("entry key");
    key.token = reader.GetU32("entry key");
    std::vector<float> vec(dimension);
    for (float &v : vec) v = reader.GetF32("entry vector");
    table.Insert(std::move(key), std::move(vec));
  }
  if (reader.remaining() != 0) {
    throw Error(ErrorKind::kFormat,
                "embedding payload length mismatch: " +
                    std::to_string(reader.remaining()) +
                    " bytes after the declared " + std::to_string(count) +
                    " entries");
  }
  return table;
}

EmbeddingTable LoadJsonl(std::string_view bytes) {
  EmbeddingTable table;
  uint64_t declared = 0;
  bool have_header = false;
  size_t line_number = 0;
  size_t pos = 0;
  while (pos < bytes.size()) {
    size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) eol = bytes.size();
    std::string_view line = bytes.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      json record = json::parse(line);
      if (!have_header) {
        if (record.value("format", "") != "LXEM") {
          throw Error(ErrorKind::kFormat, "missing LXEM header object");
        }
        const int version = record.at("version").get<int>();
        if (version != kEmbeddingFormatVersion) {
          throw Error(ErrorKind::kVersion,
                      "unsupported embedding format version " +
                          std::to_string(version));
        }
        table = EmbeddingTable(record.at("dimension").get<uint32_t>(),
                               record.value("provenance", ""));
        declared = record.at("count").get<uint64_t>();
        have_header = true;
        continue;
      }
      EmbeddingKey key{record.at("doc_id").get<std::string>(),
                       record.at("sentence").get<uint32_t>(),
                       record.at("token").get<uint32_t>()};
      std::vector<float> vec;
      for (const json &v : record.at("vector")) {
        // Non-finite values are written as null.
        vec.push_back(v.is_null() ? NAN : v.get<float>());
      }
      table.Insert(std::move(key), std::move(vec));
    } catch (const json::exception &e) {
      throw Error(ErrorKind::kFormat, "embedding line " +
                                          std::to_string(line_number) + ": " +
                                          e.what());
    }
  }
  if (!have_header) throw Error(ErrorKind::kFormat, "empty embedding file");
  if (table.size() != declared) {
    throw Error(ErrorKind::kTruncated,
                "embedding payload length mismatch: header declares " +
                    std::to_string(declared) + " entries, found " +
                    std::to_string(table.size()));
  }
  return table;
}

}  // namespace

std::string DescribeKey(const EmbeddingKey &key) {
  return "(" + key.doc_id + ", " + std::to_string(key.sentence) + ", " +
         std::to_string(key.token) + ")";
}

void EmbeddingTable::Insert(EmbeddingKey key, std::vector<float> vector) {
  if (vector.size() != dimension_) {
    throw Error(ErrorKind::kInvalidInput,
                "embedding for " + DescribeKey(key) + " has length " +
                    std::to_string(vector.size()) + ", expected " +
                    std::to_string(dimension_));
  }
  for (float v : vector) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kInvalidInput,
                  "non-finite embedding value for " + DescribeKey(key));
    }
  }
  auto [it, inserted] = entries_.emplace(std::move(key), std::move(vector));
  if (!inserted) {
    throw Error(ErrorKind::kInvalidInput,
                "duplicate embedding key " + DescribeKey(it->first));
  }
}

const std::vector<float> *EmbeddingTable::Find(const EmbeddingKey &key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

EmbeddingTable LoadEmbeddings(std::string_view bytes) {
  size_t first = bytes.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && bytes[first] == '{' &&
      !bytes.starts_with(kMagic)) {
    return LoadJsonl(bytes);
  }
  return LoadBinary(bytes);
}

std::string WriteEmbeddings(const EmbeddingTable &table) {
  ByteWriter out;
  out.PutBytes(kMagic);
  out.PutU16(kEmbeddingFormatVersion);
  out.PutU32(table.dimension());
  out.PutU64(table.size());
  out.PutString(table.provenance());
  for (const auto &[key, vec] : table.entries()) {
    out.PutString(key.doc_id);
    out.PutU32(key.sentence);
    out.PutU32(key.token);
    for (float v : vec) out.PutF32(v);
  }
  return out.Release();
}

std::string WriteEmbeddingsJsonl(const EmbeddingTable &table) {
  json header = {{"format", "LXEM"},
                 {"version", kEmbeddingFormatVersion},
                 {"dimension", table.dimension()},
                 {"count", table.size()},
                 {"provenance", table.provenance()}};
  std::string out = header.dump() + "\n";
  for (const auto &[key, vec] : table.entries()) {
    json record = {{"doc_id", key.doc_id},
                   {"sentence", key.sentence},
                   {"token", key.token},
                   {"vector", vec}};
    out += record.dump() + "\n";
  }
  return out;
}

Matrix GatherEmbeddings(const EmbeddingTable &table,
                        const corpus::LabeledSequence &seq) {
  Matrix out(seq.size(), table.dimension());
  for (size_t i = 0; i < seq.size(); ++i) {
    EmbeddingKey key{seq.doc_id, static_cast<uint32_t>(seq.sentence_index),
                     static_cast<uint32_t>(i)};
    const std::vector<float> *vec = table.Find(key);
    if (vec == nullptr) {
      throw Error(ErrorKind::kInvalidInput,
                  "missing embedding for " + DescribeKey(key));
    }
    std::copy(vec->begin(), vec->end(), out.row(i).begin());
  }
  return out;
}

}  // namespace emission
}  // namespace legalattr
