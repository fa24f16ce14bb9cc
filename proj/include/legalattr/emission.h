#ifndef LEGALATTR_EMISSION_H_
#define LEGALATTR_EMISSION_H_

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "legalattr/corpus.h"
#include "legalattr/matrix.h"

namespace legalattr {
namespace emission {

inline constexpr uint64_t kDefaultHashDimension = uint64_t{1} << 20;

// ---------------------------------------------------------------------------
// Sparse hashed features.

struct FeatureEntry {
  uint32_t index = 0;
  double value = 0.0;

  bool operator==(const FeatureEntry &) const = default;
};

// Entries sorted by index, indices unique and < dimension.
struct SparseFeatureVector {
  uint64_t dimension = kDefaultHashDimension;
  std::vector<FeatureEntry> entries;

  bool operator==(const SparseFeatureVector &) const = default;
};

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view bytes);

// Word shape: uppercase -> X, lowercase -> x, digit -> d, other characters
// kept; a run of one shape character is cut after four repeats, so
// "Testified" -> "Xxxxx" and "302/34" -> "ddd/dd".
std::string WordShape(std::string_view surface);

// Feature strings for the token at `position`:
//   w=<lower>  shape=<shape>  p1..p3=<lower prefix>  s1..s3=<lower suffix>
//   prev=<lower previous>  next=<lower next>  BOS (position 0 only)
// Depends only on the tokens at position-1, position and position+1.
std::vector<std::string> FeatureStrings(std::span<const corpus::Token> tokens,
                                        size_t position);

// Hashes FeatureStrings modulo `dimension`, each with value 1.0. Colliding
// strings within one token are merged by summing their values.
SparseFeatureVector Featurize(std::span<const corpus::Token> tokens,
                              size_t position,
                              uint64_t dimension = kDefaultHashDimension);

std::vector<SparseFeatureVector> FeaturizeSequence(
    std::span<const corpus::Token> tokens,
    uint64_t dimension = kDefaultHashDimension);

// ---------------------------------------------------------------------------
// Externally computed token embeddings.

struct EmbeddingKey {
  std::string doc_id;
  uint32_t sentence = 0;
  uint32_t token = 0;

  auto operator<=>(const EmbeddingKey &) const = default;
  bool operator==(const EmbeddingKey &) const = default;
};

std::string DescribeKey(const EmbeddingKey &key);

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(uint32_t dimension, std::string provenance)
      : dimension_(dimension), provenance_(std::move(provenance)) {}

  uint32_t dimension() const { return dimension_; }
  const std::string &provenance() const { return provenance_; }
  size_t size() const { return entries_.size(); }

  // Throws ErrorKind::kInvalidInput on a wrong length, a non-finite value or
  // a duplicate key.
  void Insert(EmbeddingKey key, std::vector<float> vector);

  // nullptr when absent.
  const std::vector<float> *Find(const EmbeddingKey &key) const;

  const std::map<EmbeddingKey, std::vector<float>> &entries() const {
    return entries_;
  }

  bool operator==(const EmbeddingTable &) const = default;

 private:
  uint32_t dimension_ = 0;
  std::string provenance_;
  std::map<EmbeddingKey, std::vector<float>> entries_;
};

// Binary layout (little-endian):
//   "LXEM" | version u16 | dimension u32 | count u64 |
//   provenance (u32 length + UTF-8) |
//   count x { doc_id (u32 length + bytes) | sentence u32 | token u32 |
//             dimension x f32 }
// Entries are written in key order. A stream starting with '{' is read as the
// JSON-lines variant: a header object {"format":"LXEM","version","dimension",
// "count","provenance"} followed by one {"doc_id","sentence","token",
// "vector"} object per line.
inline constexpr uint16_t kEmbeddingFormatVersion = 1;

EmbeddingTable LoadEmbeddings(std::string_view bytes);
std::string WriteEmbeddings(const EmbeddingTable &table);
std::string WriteEmbeddingsJsonl(const EmbeddingTable &table);

// ---------------------------------------------------------------------------
// Emission matrices (n tokens x L tags).

// Row i = features[i] . weights, where weights is D x L.
Matrix SparseEmissions(const Matrix &weights,
                       std::span<const SparseFeatureVector> features);
Matrix SparseEmissions(const Matrix &weights,
                       const corpus::LabeledSequence &seq);

// Row i = embeddings.row(i) . projection + bias; projection is d x L.
Matrix DenseEmissions(const Matrix &projection, std::span<const double> bias,
                      const Matrix &embeddings);

// n x d matrix of the sequence's token embeddings. Throws
// ErrorKind::kInvalidInput naming the first missing key.
Matrix GatherEmbeddings(const EmbeddingTable &table,
                        const corpus::LabeledSequence &seq);

Matrix DenseEmissions(const Matrix &projection, std::span<const double> bias,
                      const EmbeddingTable &table,
                      const corpus::LabeledSequence &seq);

}  // namespace emission
}  // namespace legalattr

#endif  // LEGALATTR_EMISSION_H_
