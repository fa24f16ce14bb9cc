#include <cmath>
#include <optional>

#include "crf_internal.h"
#include "legalattr/binary_io.h"
#include "legalattr/error.h"

namespace legalattr {
namespace crf {
namespace {

constexpr std::string_view kMagic = "LXCRF";

struct Header {
  EmissionMode mode = EmissionMode::kSparse;
  std::vector<std::string> tag_names;
  uint32_t num_labels = 0;
  uint64_t emission_rows = 0;
  TrainingMetadata metadata;
  size_t payload_offset = 0;
  uint64_t payload_size = 0;  // bytes of f64 parameters
};

Header ReadHeader(std::string_view bytes) {
  ByteReader reader(bytes);
  if (reader.GetBytes(kMagic.size(), "magic") != kMagic) {
    throw Error(ErrorKind::kFormat, "not a model file (bad magic)");
  }
  const uint16_t version = reader.GetU16("version");
  if (version != kModelFormatVersion) {
    throw Error(ErrorKind::kVersion,
                "unsupported model format version " + std::to_string(version) +
                    " (this build reads version " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  Header header;
  const uint8_t mode = reader.GetU8("emission mode");
  if (mode > 1) {
    throw Error(ErrorKind::kFormat,
                "unknown emission mode byte " + std::to_string(mode));
  }
  header.mode = static_cast<EmissionMode>(mode);
  const uint32_t tag_count = reader.GetU32("tag count");
  if (tag_count > 1024) {
    throw Error(ErrorKind::kFormat, "implausible tag count");
  }
  for (uint32_t i = 0; i < tag_count; ++i) {
    header.tag_names.push_back(reader.GetString("tag name"));
  }
  header.num_labels = reader.GetU32("label count");
  header.emission_rows = reader.GetU64("emission rows");
  header.metadata.seed = reader.GetU64("seed");
  header.metadata.epochs_run = reader.GetU32("epochs");
  header.metadata.final_objective = reader.GetF64("objective");
  header.payload_offset = reader.position();

  if (header.num_labels != tag_count || header.num_labels == 0 ||
      header.emission_rows > (uint64_t{1} << 32)) {
    throw Error(ErrorKind::kFormat, "inconsistent model dimensions");
  }
  const uint64_t labels = header.num_labels;
  uint64_t values = labels * labels + 2 * labels + header.emission_rows * labels;
  if (header.mode == EmissionMode::kDense) values += labels;
  header.payload_size = values * 8;
  return header;
}

void ReadBlock(ByteReader *reader, std::span<double> block) {
  for (double &v : block) {
    v = reader->GetF64("parameters");
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kFormat, "non-finite parameter in model file");
    }
  }
}

}  // namespace

std::string SerializeModel(const CrfModel &model) {
  const CrfParameters &params = model.params;
  ByteWriter out;
  out.PutBytes(kMagic);
  out.PutU16(kModelFormatVersion);
  out.PutU8(static_cast<uint8_t>(params.mode));
  out.PutU32(static_cast<uint32_t>(model.tags.size()));
  for (const std::string &name : model.tags.names()) out.PutString(name);
  out.PutU32(static_cast<uint32_t>(params.num_labels()));
  out.PutU64(params.mode == EmissionMode::kSparse ? params.sparse_weights.rows()
                                                  : params.projection.rows());
  out.PutU64(model.metadata.seed);
  out.PutU32(model.metadata.epochs_run);
  out.PutF64(model.metadata.final_objective);
  internal::ForEachBlock(params, [&](std::span<const double> block) {
    for (double v : block) out.PutF64(v);
  });
  out.PutU32(Crc32(out.bytes()));
  return out.Release();
}

CrfModel DeserializeModel(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 2) {
    throw Error(ErrorKind::kTruncated, "model file too short");
  }
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorKind::kFormat, "not a model file (bad magic)");
  }

  const bool checksum_ok =
      bytes.size() >= 4 &&
      ByteReader(bytes.substr(bytes.size() - 4)).GetU32("checksum") ==
          Crc32(bytes.substr(0, bytes.size() - 4));
  std::optional<Header> header;
  try {
    header = ReadHeader(bytes);
  } catch (const Error &e) {
    // The version check comes first so old files report their version even
    // when this build cannot validate them further.
    if (e.kind() == ErrorKind::kVersion || checksum_ok) throw;
    if (e.kind() == ErrorKind::kTruncated) throw;
    throw Error(ErrorKind::kChecksum, "model checksum mismatch");
  }
  const uint64_t expected =
      header->payload_offset + header->payload_size + 4;
  if (!checksum_ok) {
    if (bytes.size() < expected) {
      throw Error(ErrorKind::kTruncated,
                  "model file truncated: " + std::to_string(bytes.size()) +
                      " of " + std::to_string(expected) + " bytes");
    }
    throw Error(ErrorKind::kChecksum, "model checksum mismatch");
  }
  if (bytes.size() != expected) {
    throw Error(ErrorKind::kFormat,
                "model file size " + std::to_string(bytes.size()) +
                    " does not match its header (" + std::to_string(expected) +
                    " bytes)");
  }

  CrfModel model;
  model.tags = TagSet(header->tag_names);
  if (!(model.tags == TagSet::Legal())) {
    throw Error(ErrorKind::kFormat, "model tag set differs from the legal tag set");
  }
  model.metadata = header->metadata;
  const int labels = static_cast<int>(header->num_labels);
  model.params =
      header->mode == EmissionMode::kSparse
          ? CrfParameters::Sparse(labels, header->emission_rows)
          : CrfParameters::Dense(labels,
                                 static_cast<uint32_t>(header->emission_rows));
  ByteReader reader(bytes);
  reader.GetBytes(header->payload_offset, "header");
  internal::ForEachBlock(model.params,
                         [&](std::span<double> block) { ReadBlock(&reader, block); });
  return model;
}

}  // namespace crf
}  // namespace legalattr
