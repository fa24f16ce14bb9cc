#include "legalattr/tagset.h"

#include <algorithm>
#include <set>

#include "legalattr/error.h"

namespace legalattr {

const TagSet &TagSet::Legal() {
  static const TagSet *const kLegal = [] {
    auto *tags = new TagSet({"ExpertWittest", "Wittest", "Assault", "Riot",
                             "Homicide", "Imprisonment", "Evidence", "NoTag"});
    tags->aliases_ = {{"ExpWittest", kExpertWittest},
                      {"ExpWitTest", kExpertWittest},
                      {"WitTest", kWittest}};
    return tags;
  }();
  return *kLegal;
}

TagSet::TagSet(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> seen;
  for (size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) {
      throw Error(ErrorKind::kInvalidInput, "empty tag name");
    }
    if (!seen.insert(names_[i]).second) {
      throw Error(ErrorKind::kInvalidInput, "duplicate tag name: " + names_[i]);
    }
    if (names_[i] == "NoTag") no_tag_ = static_cast<int>(i);
  }
  if (no_tag_ < 0) {
    throw Error(ErrorKind::kInvalidInput, "tag set lacks NoTag");
  }
}

std::optional<int> TagSet::Find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it != names_.end()) return static_cast<int>(it - names_.begin());
  for (const auto &[alias, index] : aliases_) {
    if (alias == name) return index;
  }
  return std::nullopt;
}

int TagSet::Index(std::string_view name) const {
  auto index = Find(name);
  if (!index) {
    throw Error(ErrorKind::kInvalidInput,
                "unknown tag '" + std::string(name) + "'");
  }
  return *index;
}

}  // namespace legalattr
