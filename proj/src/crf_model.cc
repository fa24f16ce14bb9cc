#include "legalattr/crf.h"
#include "legalattr/error.h"

namespace legalattr {
namespace crf {

SequenceInput BuildInput(const corpus::LabeledSequence &seq,
                         const EmissionSource &source) {
  if (source.mode == EmissionMode::kSparse) {
    return emission::FeaturizeSequence(seq.tokens, source.feature_dimension);
  }
  if (source.embeddings == nullptr) {
    throw Error(ErrorKind::kInvalidInput,
                "dense emission mode requires an embedding table");
  }
  return emission::GatherEmbeddings(*source.embeddings, seq);
}

std::vector<Instance> BuildInstances(
    std::span<const corpus::LabeledSequence> seqs,
    const EmissionSource &source) {
  std::vector<Instance> instances;
  instances.reserve(seqs.size());
  for (const corpus::LabeledSequence &seq : seqs) {
    if (seq.size() == 0) continue;
    instances.push_back({BuildInput(seq, source), seq.labels});
  }
  return instances;
}

TagPrediction CrfModel::Predict(const SequenceInput &input,
                                bool with_marginals) const {
  const Matrix emissions = ComputeEmissions(params, input);
  TagPrediction prediction = Viterbi(emissions, params.chain);
  if (with_marginals) prediction.marginals = Marginals(emissions, params.chain);
  return prediction;
}

CrfModel TrainModel(std::span<const corpus::LabeledSequence> train,
                    std::span<const corpus::LabeledSequence> dev,
                    const EmissionSource &source, const TrainConfig &config) {
  std::vector<corpus::LabeledSequence> selected;
  std::span<const corpus::LabeledSequence> train_view = train;
  if (!config.include_untagged) {
    selected = corpus::SelectHighlighted(train);
    train_view = selected;
  }
  if (train_view.empty()) {
    throw Error(ErrorKind::kInvalidInput,
                "no training sentences with highlighted tokens");
  }

  CrfParameters shape;
  if (source.mode == EmissionMode::kSparse) {
    shape = CrfParameters::Sparse(kNumTags, source.feature_dimension);
  } else {
    if (source.embeddings == nullptr) {
      throw Error(ErrorKind::kInvalidInput,
                  "dense emission mode requires an embedding table");
    }
    shape = CrfParameters::Dense(kNumTags, source.embeddings->dimension());
  }

  const std::vector<Instance> train_instances =
      BuildInstances(train_view, source);
  const std::vector<Instance> dev_instances = BuildInstances(dev, source);
  TrainResult result = Train(train_instances, dev_instances, shape, config);
  return {TagSet::Legal(), std::move(result.params), result.metadata};
}

std::vector<ExtractedSpan> ExtractSpans(std::span<const corpus::Token> tokens,
                                        std::span<const int> labels,
                                        int no_tag) {
  if (tokens.size() != labels.size()) {
    throw Error(ErrorKind::kInvalidInput,
                "token and label counts differ in span extraction");
  }
  std::vector<ExtractedSpan> spans;
  size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] == no_tag) {
      ++i;
      continue;
    }
    ExtractedSpan span;
    span.tag = labels[i];
    span.begin = i;
    while (i < labels.size() && labels[i] == span.tag) {
      if (i > span.begin) span.text += ' ';
      span.text += tokens[i].surface;
      ++i;
    }
    span.end = i;
    spans.push_back(std::move(span));
  }
  return spans;
}

}  // namespace crf
}  // namespace legalattr
