#ifndef LEGALATTR_EVAL_H_
#define LEGALATTR_EVAL_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "legalattr/corpus.h"

namespace legalattr {
namespace eval {

// Token-level scores over the legal tag set. A tag's accuracy is the
// fraction of its gold tokens predicted with that tag (recall); tags without
// gold tokens have no accuracy.
struct TagReport {
  std::array<int64_t, kNumTags> gold_counts{};
  std::array<int64_t, kNumTags> correct{};
  // confusion[gold][predicted]
  std::array<std::array<int64_t, kNumTags>, kNumTags> confusion{};

  std::optional<double> Accuracy(int tag) const;
  // Micro average over the gold tokens of the seven attribute tags.
  std::optional<double> OverallExcludingNoTag() const;
  // trace(confusion) / total tokens.
  std::optional<double> OverallIncludingNoTag() const;
  int64_t TotalTokens() const;
};

// Throws ErrorKind::kInvalidInput naming the first (doc, sentence) whose
// identity or token count differs between the two lists.
TagReport TokenAccuracy(std::span<const corpus::LabeledSequence> gold,
                        std::span<const corpus::LabeledSequence> predicted);

// Fixed-width table: a header and one row for `method` in the column order
// ExpertWittest Wittest Homicide Assault Imprisonment Riot Evidence Overall
// (Overall excludes NoTag), then a NoTag row and an "Overall+NoTag" row.
// Values have two decimals; tags without gold tokens print "n/a".
std::string RenderReport(const TagReport &report, std::string_view method);

// {"per_tag": {...}, "overall_excl_notag", "overall_incl_notag",
//  "gold_counts": {...}, "confusion": [[...]]}; n/a values are null.
nlohmann::json ReportToJson(const TagReport &report);

}  // namespace eval
}  // namespace legalattr

#endif  // LEGALATTR_EVAL_H_
