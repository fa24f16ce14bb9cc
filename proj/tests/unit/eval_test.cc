#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "legalattr/error.h"
#include "legalattr/eval.h"

namespace legalattr {
namespace eval {
namespace {

using corpus::LabeledSequence;

LabeledSequence Seq(const std::string &doc, int sentence,
                    std::vector<int> labels) {
  LabeledSequence seq{doc, sentence, {}, std::move(labels)};
  for (size_t i = 0; i < seq.labels.size(); ++i) {
    const int64_t at = static_cast<int64_t>(2 * i);
    seq.tokens.push_back({"t", at, at + 1});
  }
  return seq;
}

// Four Homicide gold tokens of which one is recovered.
struct QuarterFixture {
  std::vector<LabeledSequence> gold = {
      Seq("a", 0, {kHomicide, kHomicide, kHomicide, kHomicide, kNoTag, kRiot})};
  std::vector<LabeledSequence> pred = {
      Seq("a", 0, {kHomicide, kAssault, kNoTag, kNoTag, kNoTag, kRiot})};
};

TEST_CASE("perfect prediction") {
  const std::vector<LabeledSequence> gold = {
      Seq("a", 0, {0, 1, 2, 3, 4, 5, 6, 7}), Seq("a", 1, {7, 7, 0})};
  const TagReport r = TokenAccuracy(gold, gold);
  for (int t = 0; t < kNumTags; ++t) CHECK(r.Accuracy(t) == 1.0);
  CHECK(r.OverallExcludingNoTag() == 1.0);
  CHECK(r.OverallIncludingNoTag() == 1.0);
  CHECK(RenderReport(r, "SeqLabel (CRF)") ==
        "Method          ExpertWittest  Wittest  Homicide  Assault  "
        "Imprisonment  Riot  Evidence  Overall\n"
        "SeqLabel (CRF)  1.00           1.00     1.00      1.00     "
        "1.00          1.00  1.00      1.00\n"
        "NoTag           1.00\n"
        "Overall+NoTag   1.00\n");
}

TEST_CASE("the quarter fixture") {
  const QuarterFixture f;
  const TagReport r = TokenAccuracy(f.gold, f.pred);
  CHECK(r.gold_counts[kHomicide] == 4);
  CHECK(r.correct[kHomicide] == 1);
  CHECK(r.Accuracy(kHomicide) == 0.25);
  CHECK(r.Accuracy(kRiot) == 1.0);
  CHECK_FALSE(r.Accuracy(kEvidence).has_value());
  CHECK(r.OverallExcludingNoTag() == doctest::Approx(0.4));
  CHECK(r.OverallIncludingNoTag() == doctest::Approx(0.5));
  CHECK(r.confusion[kHomicide][kAssault] == 1);
  CHECK(r.confusion[kHomicide][kNoTag] == 2);
  CHECK(RenderReport(r, "SeqLabel (CRF)") ==
        "Method          ExpertWittest  Wittest  Homicide  Assault  "
        "Imprisonment  Riot  Evidence  Overall\n"
        "SeqLabel (CRF)  n/a            n/a      0.25      n/a      "
        "n/a           1.00  n/a       0.40\n"
        "NoTag           1.00\n"
        "Overall+NoTag   0.50\n");
}

TEST_CASE("json report") {
  const QuarterFixture f;
  const nlohmann::json j = ReportToJson(TokenAccuracy(f.gold, f.pred));
  CHECK(j["per_tag"]["Homicide"] == 0.25);
  CHECK(j["per_tag"]["Evidence"].is_null());
  CHECK(j["overall_excl_notag"].get<double>() == doctest::Approx(0.4));
  CHECK(j["overall_incl_notag"].get<double>() == doctest::Approx(0.5));
  CHECK(j["gold_counts"]["Homicide"] == 4);
  CHECK(j["confusion"].size() == kNumTags);
  CHECK(j["confusion"][kHomicide][kAssault] == 1);
}

TEST_CASE("misalignment names the sentence") {
  const QuarterFixture f;
  auto expect = [](const std::vector<LabeledSequence> &gold,
                   const std::vector<LabeledSequence> &pred,
                   const std::string &needle) {
    try {
      TokenAccuracy(gold, pred);
      FAIL("accepted misaligned input");
    } catch (const Error &e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect(f.gold, {Seq("b", 0, {0, 0, 0, 0, 0, 0})}, "'a'");
  expect(f.gold, {Seq("a", 0, {0})}, "sentence 0");
  expect(f.gold, {}, "'a'");
}

TEST_CASE("property: report invariants on random corpora") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LabeledSequence> gold, pred;
    const int sentences = 1 + static_cast<int>(rng() % 8);
    for (int s = 0; s < sentences; ++s) {
      const size_t n = 1 + rng() % 10;
      std::vector<int> g(n), p(n);
      for (size_t i = 0; i < n; ++i) {
        g[i] = static_cast<int>(rng() % kNumTags);
        p[i] = rng() % 3 ? g[i] : static_cast<int>(rng() % kNumTags);
      }
      gold.push_back(Seq("d", s, g));
      pred.push_back(Seq("d", s, p));
    }
    const TagReport r = TokenAccuracy(gold, pred);

    int64_t trace = 0, attribute_gold = 0;
    double weighted = 0.0;
    for (int t = 0; t < kNumTags; ++t) {
      int64_t row = 0;
      for (int64_t c : r.confusion[t]) row += c;
      REQUIRE(row == r.gold_counts[t]);
      trace += r.confusion[t][t];
      if (auto a = r.Accuracy(t)) {
        REQUIRE(*a >= 0.0);
        REQUIRE(*a <= 1.0);
        if (t != kNoTag) {
          weighted += *a * static_cast<double>(r.gold_counts[t]);
          attribute_gold += r.gold_counts[t];
        }
      }
    }
    REQUIRE(*r.OverallIncludingNoTag() ==
            doctest::Approx(static_cast<double>(trace) /
                            static_cast<double>(r.TotalTokens())));
    if (attribute_gold > 0) {
      REQUIRE(*r.OverallExcludingNoTag() ==
              doctest::Approx(weighted / static_cast<double>(attribute_gold)));
    }

    // Reordering sentences leaves every accuracy unchanged.
    std::vector<size_t> order(gold.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<LabeledSequence> g2, p2;
    for (size_t i : order) {
      g2.push_back(gold[i]);
      p2.push_back(pred[i]);
    }
    const TagReport r2 = TokenAccuracy(g2, p2);
    for (int t = 0; t < kNumTags; ++t) REQUIRE(r2.Accuracy(t) == r.Accuracy(t));
  }
}

}  // namespace
}  // namespace eval
}  // namespace legalattr
