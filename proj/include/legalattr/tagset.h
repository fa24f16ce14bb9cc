#ifndef LEGALATTR_TAGSET_H_
#define LEGALATTR_TAGSET_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace legalattr {

// Indices of the attribute inventory in the canonical tag order.
enum TagIndex : int {
  kExpertWittest = 0,
  kWittest = 1,
  kAssault = 2,
  kRiot = 3,
  kHomicide = 4,
  kImprisonment = 5,
  kEvidence = 6,
  kNoTag = 7,
};

inline constexpr int kNumTags = 8;
inline constexpr int kNumAttributeTags = 7;

// Column order used by the statistics and accuracy tables.
inline constexpr std::array<int, kNumAttributeTags> kReportOrder = {
    kExpertWittest, kWittest, kHomicide, kAssault,
    kImprisonment,  kRiot,    kEvidence};

// Ordered, duplicate-free list of tag names with exactly one "NoTag".
class TagSet {
 public:
  // The eight-tag legal attribute inventory. Lookups on this set also
  // accept the spellings "ExpWittest", "ExpWitTest" and "WitTest".
  static const TagSet &Legal();

  // Throws ErrorKind::kInvalidInput unless the names are unique and contain
  // "NoTag" exactly once.
  explicit TagSet(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  int no_tag() const { return no_tag_; }
  const std::string &name(int index) const { return names_.at(index); }
  const std::vector<std::string> &names() const { return names_; }

  std::optional<int> Find(std::string_view name) const;
  // As Find, but throws ErrorKind::kInvalidInput naming the unknown tag.
  int Index(std::string_view name) const;

  bool operator==(const TagSet &other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::vector<std::pair<std::string, int>> aliases_;
  int no_tag_ = -1;
};

}  // namespace legalattr

#endif  // LEGALATTR_TAGSET_H_
