#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "legalattr/corpus.h"
#include "legalattr/error.h"
#include "legalattr/text.h"

namespace legalattr {
namespace corpus {
namespace {

using nlohmann::json;

Error LineError(size_t line, const std::string &message) {
  return Error(ErrorKind::kInvalidInput,
               "line " + std::to_string(line) + ": " + message);
}

std::string Range(int64_t start, int64_t end) {
  return "[" + std::to_string(start) + "," + std::to_string(end) + ")";
}

int64_t GetOffset(const json &span, const char *key) {
  auto it = span.find(key);
  if (it == span.end() || !it->is_number_integer()) {
    throw Error(ErrorKind::kInvalidInput,
                std::string("span field '") + key + "' must be an integer");
  }
  return it->get<int64_t>();
}

Document ParseRecord(const json &record) {
  if (!record.is_object()) {
    throw Error(ErrorKind::kInvalidInput, "record is not a JSON object");
  }
  Document doc;
  auto id = record.find("id");
  if (id == record.end() || !id->is_string()) {
    throw Error(ErrorKind::kInvalidInput, "missing string field 'id'");
  }
  doc.id = id->get<std::string>();
  if (doc.id.empty()) throw Error(ErrorKind::kInvalidInput, "empty 'id'");
  auto text = record.find("text");
  if (text == record.end() || !text->is_string()) {
    throw Error(ErrorKind::kInvalidInput,
                "document '" + doc.id + "': missing string field 'text'");
  }
  doc.text = text->get<std::string>();

  auto spans = record.find("spans");
  if (spans != record.end() && !spans->is_null()) {
    if (!spans->is_array()) {
      throw Error(ErrorKind::kInvalidInput,
                  "document '" + doc.id + "': 'spans' must be an array");
    }
    for (const json &span : *spans) {
      if (!span.is_object()) {
        throw Error(ErrorKind::kInvalidInput,
                    "document '" + doc.id + "': span is not an object");
      }
      auto tag = span.find("tag");
      if (tag == span.end() || !tag->is_string()) {
        throw Error(ErrorKind::kInvalidInput,
                    "document '" + doc.id + "': span lacks a string 'tag'");
      }
      SpanAnnotation s;
      s.start = GetOffset(span, "start");
      s.end = GetOffset(span, "end");
      s.tag = TagSet::Legal().Index(tag->get<std::string>());
      doc.spans.push_back(s);
    }
  }

  auto judgment = record.find("judgment");
  if (judgment != record.end() && !judgment->is_null()) {
    if (!judgment->is_number_integer() ||
        (judgment->get<int64_t>() != 0 && judgment->get<int64_t>() != 1)) {
      throw Error(ErrorKind::kInvalidInput,
                  "document '" + doc.id + "': 'judgment' must be 0, 1 or null");
    }
    doc.judgment = judgment->get<int>();
  }
  return doc;
}

}  // namespace

void ValidateDocument(const Document &doc, int64_t text_length) {
  for (const SpanAnnotation &s : doc.spans) {
    if (s.start < 0 || s.start >= s.end || s.end > text_length) {
      throw Error(ErrorKind::kInvalidInput,
                  "document '" + doc.id + "': span " + Range(s.start, s.end) +
                      " outside text of length " + std::to_string(text_length));
    }
    if (s.tag < 0 || s.tag >= kNumTags || s.tag == kNoTag) {
      throw Error(ErrorKind::kInvalidInput,
                  "document '" + doc.id + "': span " + Range(s.start, s.end) +
                      " carries no attribute tag");
    }
  }
  std::vector<SpanAnnotation> sorted = doc.spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const SpanAnnotation &a, const SpanAnnotation &b) {
              return a.start < b.start || (a.start == b.start && a.end < b.end);
            });
  for (size_t i = 1; i < sorted.size(); ++i) {
    const SpanAnnotation &a = sorted[i - 1];
    const SpanAnnotation &b = sorted[i];
    if (b.start < a.end) {
      throw Error(ErrorKind::kInvalidInput,
                  "document '" + doc.id + "': spans " + Range(a.start, a.end) +
                      " and " + Range(b.start, b.end) + " overlap");
    }
  }
}

std::vector<Document> ParseAnnotations(std::string_view data) {
  std::vector<Document> docs;
  std::vector<std::string> ids;
  size_t line_number = 0;
  size_t pos = 0;
  while (pos < data.size()) {
    size_t eol = data.find('\n', pos);
    if (eol == std::string_view::npos) eol = data.size();
    std::string_view line = data.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    try {
      json record = json::parse(line);
      Document doc = ParseRecord(record);
      ValidateDocument(doc, static_cast<int64_t>(DecodeUtf8(doc.text).size()));
      std::sort(doc.spans.begin(), doc.spans.end(),
                [](const SpanAnnotation &a, const SpanAnnotation &b) {
                  return a.start < b.start;
                });
      if (std::find(ids.begin(), ids.end(), doc.id) != ids.end()) {
        throw Error(ErrorKind::kInvalidInput,
                    "duplicate document id '" + doc.id + "'");
      }
      ids.push_back(doc.id);
      docs.push_back(std::move(doc));
    } catch (const json::exception &e) {
      throw LineError(line_number, std::string("malformed JSON: ") + e.what());
    } catch (const Error &e) {
      throw LineError(line_number, e.what());
    }
  }
  return docs;
}

std::string WriteAnnotations(std::span<const Document> docs) {
  std::string out;
  for (const Document &doc : docs) {
    json spans = json::array();
    for (const SpanAnnotation &s : doc.spans) {
      spans.push_back({{"start", s.start},
                       {"end", s.end},
                       {"tag", TagSet::Legal().name(s.tag)}});
    }
    json record = {{"id", doc.id}, {"text", doc.text}, {"spans", spans}};
    record["judgment"] = doc.judgment ? json(*doc.judgment) : json(nullptr);
    out += record.dump();
    out += '\n';
  }
  return out;
}

}  // namespace corpus
}  // namespace legalattr
