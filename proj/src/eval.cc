#include "legalattr/eval.h"

#include <cstdio>

#include "legalattr/error.h"

namespace legalattr {
namespace eval {
namespace {

std::string Format(std::optional<double> value) {
  if (!value) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *value);
  return buf;
}

nlohmann::json ToJson(std::optional<double> value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

std::string Pad(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string Describe(const corpus::LabeledSequence &seq) {
  return "(doc '" + seq.doc_id + "', sentence " +
         std::to_string(seq.sentence_index) + ")";
}

}  // namespace

std::optional<double> TagReport::Accuracy(int tag) const {
  if (gold_counts[tag] == 0) return std::nullopt;
  return static_cast<double>(correct[tag]) /
         static_cast<double>(gold_counts[tag]);
}

std::optional<double> TagReport::OverallExcludingNoTag() const {
  int64_t gold = 0;
  int64_t hit = 0;
  for (int tag = 0; tag < kNumTags; ++tag) {
    if (tag == kNoTag) continue;
    gold += gold_counts[tag];
    hit += correct[tag];
  }
  if (gold == 0) return std::nullopt;
  return static_cast<double>(hit) / static_cast<double>(gold);
}

std::optional<double> TagReport::OverallIncludingNoTag() const {
  const int64_t total = TotalTokens();
  if (total == 0) return std::nullopt;
  int64_t trace = 0;
  for (int tag = 0; tag < kNumTags; ++tag) trace += confusion[tag][tag];
  return static_cast<double>(trace) / static_cast<double>(total);
}

int64_t TagReport::TotalTokens() const {
  int64_t total = 0;
  for (int64_t count : gold_counts) total += count;
  return total;
}

TagReport TokenAccuracy(std::span<const corpus::LabeledSequence> gold,
                        std::span<const corpus::LabeledSequence> predicted) {
  TagReport report;
  const size_t common = std::min(gold.size(), predicted.size());
  for (size_t s = 0; s < common; ++s) {
    const corpus::LabeledSequence &g = gold[s];
    const corpus::LabeledSequence &p = predicted[s];
    if (g.doc_id != p.doc_id || g.sentence_index != p.sentence_index ||
        g.labels.size() != p.labels.size()) {
      throw Error(ErrorKind::kInvalidInput,
                  "gold and predicted sequences misaligned at gold " +
                      Describe(g) + " vs predicted " + Describe(p));
    }
    for (size_t i = 0; i < g.labels.size(); ++i) {
      const int gl = g.labels[i];
      const int pl = p.labels[i];
      if (gl < 0 || gl >= kNumTags || pl < 0 || pl >= kNumTags) {
        throw Error(ErrorKind::kInvalidInput,
                    "label out of range in " + Describe(g));
      }
      ++report.gold_counts[gl];
      ++report.confusion[gl][pl];
      if (gl == pl) ++report.correct[gl];
    }
  }
  if (gold.size() != predicted.size()) {
    const corpus::LabeledSequence &extra =
        gold.size() > predicted.size() ? gold[common] : predicted[common];
    throw Error(ErrorKind::kInvalidInput,
                "gold has " + std::to_string(gold.size()) +
                    " sentences, predicted has " +
                    std::to_string(predicted.size()) +
                    "; first unmatched " + Describe(extra));
  }
  return report;
}

std::string RenderReport(const TagReport &report, std::string_view method) {
  const TagSet &tags = TagSet::Legal();
  size_t first_width = std::max<size_t>(method.size(), 14) + 2;
  std::vector<std::string> headers;
  for (int tag : kReportOrder) headers.push_back(tags.name(tag));
  headers.push_back("Overall");

  std::string out = Pad("Method", first_width);
  for (size_t c = 0; c < headers.size(); ++c) {
    out += Pad(headers[c], headers[c].size() + 2);
  }
  while (out.back() == ' ') out.pop_back();
  out += "\n" + Pad(std::string(method), first_width);
  for (size_t c = 0; c < kReportOrder.size(); ++c) {
    out += Pad(Format(report.Accuracy(kReportOrder[c])), headers[c].size() + 2);
  }
  out += Pad(Format(report.OverallExcludingNoTag()), headers.back().size() + 2);
  while (out.back() == ' ') out.pop_back();
  out += "\n" + Pad("NoTag", first_width) + Format(report.Accuracy(kNoTag));
  out += "\n" + Pad("Overall+NoTag", first_width) +
         Format(report.OverallIncludingNoTag()) + "\n";
  return out;
}

nlohmann::json ReportToJson(const TagReport &report) {
  const TagSet &tags = TagSet::Legal();
  nlohmann::json per_tag = nlohmann::json::object();
  nlohmann::json counts = nlohmann::json::object();
  for (int tag = 0; tag < kNumTags; ++tag) {
    per_tag[tags.name(tag)] = ToJson(report.Accuracy(tag));
    counts[tags.name(tag)] = report.gold_counts[tag];
  }
  nlohmann::json confusion = nlohmann::json::array();
  for (const auto &row : report.confusion) confusion.push_back(row);
  return {{"per_tag", per_tag},
          {"overall_excl_notag", ToJson(report.OverallExcludingNoTag())},
          {"overall_incl_notag", ToJson(report.OverallIncludingNoTag())},
          {"gold_counts", counts},
          {"confusion", confusion}};
}

}  // namespace eval
}  // namespace legalattr
