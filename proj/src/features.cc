#include <algorithm>

#include "legalattr/emission.h"
#include "legalattr/error.h"
#include "legalattr/text.h"

namespace legalattr {
namespace emission {

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string WordShape(std::string_view surface) {
  std::string shape;
  char32_t last = 0;
  int run = 0;
  for (char32_t c : DecodeUtf8(surface)) {
    char32_t mapped = c;
    if (IsUpper(c)) {
      mapped = 'X';
    } else if (IsLower(c)) {
      mapped = 'x';
    } else if (IsDigit(c)) {
      mapped = 'd';
    }
    run = (mapped == last) ? run + 1 : 1;
    last = mapped;
    if (run <= 4) AppendUtf8(mapped, &shape);
  }
  return shape;
}

std::vector<std::string> FeatureStrings(std::span<const corpus::Token> tokens,
                                        size_t position) {
  const std::u32string lower = ToLower(DecodeUtf8(tokens[position].surface));
  std::vector<std::string> features;
  features.push_back("w=" + EncodeUtf8(lower));
  features.push_back("shape=" + WordShape(tokens[position].surface));
  for (size_t k = 1; k <= 3 && k <= lower.size(); ++k) {
    features.push_back("p" + std::to_string(k) + "=" +
                       EncodeUtf8(lower.substr(0, k)));
    features.push_back("s" + std::to_string(k) + "=" +
                       EncodeUtf8(lower.substr(lower.size() - k)));
  }
  if (position > 0) {
    features.push_back("prev=" + ToLowerUtf8(tokens[position - 1].surface));
  } else {
    features.push_back("BOS");
  }
  if (position + 1 < tokens.size()) {
    features.push_back("next=" + ToLowerUtf8(tokens[position + 1].surface));
  }
  return features;
}

SparseFeatureVector Featurize(std::span<const corpus::Token> tokens,
                              size_t position, uint64_t dimension) {
  if (dimension == 0 || dimension > (uint64_t{1} << 32)) {
    throw Error(ErrorKind::kInvalidInput, "feature dimension out of range");
  }
  SparseFeatureVector vec;
  vec.dimension = dimension;
  for (const std::string &feature : FeatureStrings(tokens, position)) {
    vec.entries.push_back(
        {static_cast<uint32_t>(Fnv1a64(feature) % dimension), 1.0});
  }
  std::sort(vec.entries.begin(), vec.entries.end(),
            [](const FeatureEntry &a, const FeatureEntry &b) {
              return a.index < b.index;
            });
  std::vector<FeatureEntry> merged;
  for (const FeatureEntry &e : vec.entries) {
    if (!merged.empty() && merged.back().index == e.index) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  vec.entries = std::move(merged);
  return vec;
}

std::vector<SparseFeatureVector> FeaturizeSequence(
    std::span<const corpus::Token> tokens, uint64_t dimension) {
  std::vector<SparseFeatureVector> out;
  out.reserve(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    out.push_back(Featurize(tokens, i, dimension));
  }
  return out;
}

Matrix SparseEmissions(const Matrix &weights,
                       std::span<const SparseFeatureVector> features) {
  Matrix out(features.size(), weights.cols());
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].dimension != weights.rows()) {
      throw Error(ErrorKind::kInvalidInput,
                  "feature dimension " + std::to_string(features[i].dimension) +
                      " does not match weight rows " +
                      std::to_string(weights.rows()));
    }
    auto row = out.row(i);
    for (const FeatureEntry &e : features[i].entries) {
      auto w = weights.row(e.index);
      for (size_t t = 0; t < row.size(); ++t) row[t] += e.value * w[t];
    }
  }
  return out;
}

Matrix SparseEmissions(const Matrix &weights,
                       const corpus::LabeledSequence &seq) {
  return SparseEmissions(weights, FeaturizeSequence(seq.tokens, weights.rows()));
}

Matrix DenseEmissions(const Matrix &projection, std::span<const double> bias,
                      const Matrix &embeddings) {
  if (embeddings.cols() != projection.rows() ||
      bias.size() != projection.cols()) {
    throw Error(ErrorKind::kInvalidInput,
                "dense emission shapes disagree: embeddings " +
                    std::to_string(embeddings.cols()) + " wide, projection " +
                    std::to_string(projection.rows()) + "x" +
                    std::to_string(projection.cols()) + ", bias " +
                    std::to_string(bias.size()));
  }
  Matrix out(embeddings.rows(), projection.cols());
  for (size_t i = 0; i < embeddings.rows(); ++i) {
    auto row = out.row(i);
    std::copy(bias.begin(), bias.end(), row.begin());
    for (size_t k = 0; k < embeddings.cols(); ++k) {
      const double e = embeddings(i, k);
      auto p = projection.row(k);
      for (size_t t = 0; t < row.size(); ++t) row[t] += e * p[t];
    }
  }
  return out;
}

Matrix DenseEmissions(const Matrix &projection, std::span<const double> bias,
                      const EmbeddingTable &table,
                      const corpus::LabeledSequence &seq) {
  return DenseEmissions(projection, bias, GatherEmbeddings(table, seq));
}

}  // namespace emission
}  // namespace legalattr
