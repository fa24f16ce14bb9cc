#include <algorithm>
#include <array>
#include <cmath>

#include "legalattr/error.h"
#include "legalattr/judgment.h"

namespace legalattr {
namespace judgment {
namespace {

uint64_t SplitMix64(uint64_t *state) {
  uint64_t z = (*state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

const char *CompositionModeName(CompositionMode mode) {
  switch (mode) {
    case CompositionMode::kText: return "Text";
    case CompositionMode::kTextPlusTag: return "Text+Tag";
    case CompositionMode::kTextPlusSpan: return "Text+Span";
  }
  return "?";
}

CompositionMode ParseCompositionMode(std::string_view name) {
  std::string lower;
  for (char c : name) {
    if (c != ' ') lower += static_cast<char>(std::tolower(c));
  }
  if (lower == "text") return CompositionMode::kText;
  if (lower == "text+tag") return CompositionMode::kTextPlusTag;
  if (lower == "text+span") return CompositionMode::kTextPlusSpan;
  throw Error(ErrorKind::kInvalidInput,
              "unknown composition mode '" + std::string(name) + "'");
}

std::vector<TokenRef> DocumentTokens(
    std::span<const corpus::LabeledSequence> sentences) {
  std::vector<TokenRef> tokens;
  for (const corpus::LabeledSequence &seq : sentences) {
    for (size_t i = 0; i < seq.tokens.size(); ++i) {
      tokens.push_back({seq.tokens[i].surface,
                        emission::EmbeddingKey{
                            seq.doc_id, static_cast<uint32_t>(seq.sentence_index),
                            static_cast<uint32_t>(i)}});
    }
  }
  return tokens;
}

std::vector<TokenRef> ComposeInput(std::span<const TokenRef> tokens,
                                   CompositionMode mode,
                                   std::span<const DocumentSpan> spans) {
  std::vector<TokenRef> out(tokens.begin(), tokens.end());
  const TagSet &tags = TagSet::Legal();
  switch (mode) {
    case CompositionMode::kText:
      break;
    case CompositionMode::kTextPlusTag: {
      std::array<bool, kNumTags> present{};
      for (const DocumentSpan &span : spans) present.at(span.tag) = true;
      for (int tag = 0; tag < kNumTags; ++tag) {
        if (present[tag] && tag != kNoTag) {
          out.push_back({tags.name(tag), std::nullopt});
        }
      }
      break;
    }
    case CompositionMode::kTextPlusSpan:
      for (const DocumentSpan &span : spans) {
        out.push_back({tags.name(span.tag), std::nullopt});
        out.insert(out.end(), span.tokens.begin(), span.tokens.end());
      }
      break;
  }
  return out;
}

std::vector<double> HashedEmbeddingSource::Embed(const TokenRef &token) const {
  uint64_t state = emission::Fnv1a64(token.surface) ^
                   (seed_ * 0xD1B54A32D192ED03ULL);
  std::vector<double> vec(dimension_);
  for (double &v : vec) {
    v = static_cast<double>(SplitMix64(&state) >> 11) * 0x1.0p-52 - 1.0;
  }
  return vec;
}

std::string HashedEmbeddingSource::Describe() const {
  return "hashed-" + std::to_string(dimension_);
}

TableEmbeddingSource::TableEmbeddingSource(
    const emission::EmbeddingTable &table, const EmbeddingSource *fallback)
    : table_(table), fallback_(fallback) {
  if (fallback_ != nullptr && fallback_->dimension() != table_.dimension()) {
    throw Error(ErrorKind::kInvalidInput,
                "fallback embedding dimension differs from the table");
  }
}

std::vector<double> TableEmbeddingSource::Embed(const TokenRef &token) const {
  if (token.key) {
    if (const std::vector<float> *vec = table_.Find(*token.key)) {
      return std::vector<double>(vec->begin(), vec->end());
    }
  }
  if (fallback_ != nullptr) return fallback_->Embed(token);
  throw Error(ErrorKind::kInvalidInput,
              "missing embedding for token '" + token.surface + "'" +
                  (token.key ? " " + emission::DescribeKey(*token.key) : ""));
}

std::string TableEmbeddingSource::Describe() const {
  return table_.provenance().empty() ? "table" : table_.provenance();
}

std::vector<double> DocumentVector(std::span<const TokenRef> tokens,
                                   const EmbeddingSource &source,
                                   size_t window) {
  if (tokens.empty()) {
    throw Error(ErrorKind::kInvalidInput, "empty token list");
  }
  const size_t count = std::min(window, tokens.size());
  std::vector<double> mean(source.dimension(), 0.0);
  for (const TokenRef &token : tokens.last(count)) {
    const std::vector<double> vec = source.Embed(token);
    for (size_t k = 0; k < mean.size(); ++k) mean[k] += vec[k];
  }
  for (double &v : mean) {
    v /= static_cast<double>(count);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kNumerical, "non-finite document vector");
    }
  }
  return mean;
}

}  // namespace judgment
}  // namespace legalattr
