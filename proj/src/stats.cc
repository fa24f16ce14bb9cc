#include "legalattr/corpus.h"

namespace legalattr {
namespace corpus {

StatsReport ComputeStats(std::span<const LabeledSequence> seqs,
                         std::string split_name) {
  StatsReport report;
  report.split = std::move(split_name);
  for (const LabeledSequence &seq : seqs) {
    std::array<bool, kNumTags> present{};
    for (int label : seq.labels) {
      if (label == kNoTag) continue;
      ++report.per_tag[label].tokens;
      present[label] = true;
    }
    for (int tag = 0; tag < kNumTags; ++tag) {
      if (present[tag]) ++report.per_tag[tag].sentences;
    }
  }
  return report;
}

StatsReport ComputeStats(std::span<const Document> docs,
                         std::string split_name) {
  return ComputeStats(ProjectCorpus(docs), std::move(split_name));
}

std::string RenderStatsTsv(const StatsReport &report) {
  std::string out = "tag\tsentences\ttokens\n";
  for (int tag : kReportOrder) {
    out += TagSet::Legal().name(tag) + "\t" +
           std::to_string(report.per_tag[tag].sentences) + "\t" +
           std::to_string(report.per_tag[tag].tokens) + "\n";
  }
  return out;
}

std::string RenderStatsTable(std::span<const StatsReport> reports) {
  std::string out = "split\tstatistic";
  for (int tag : kReportOrder) out += "\t" + TagSet::Legal().name(tag);
  out += "\n";
  for (const StatsReport &report : reports) {
    out += report.split + "\t#sentences";
    for (int tag : kReportOrder) {
      out += "\t" + std::to_string(report.per_tag[tag].sentences);
    }
    out += "\n" + report.split + "\t#tokens";
    for (int tag : kReportOrder) {
      out += "\t" + std::to_string(report.per_tag[tag].tokens);
    }
    out += "\n";
  }
  return out;
}

}  // namespace corpus
}  // namespace legalattr
