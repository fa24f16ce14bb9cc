#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "crf_oracle.h"
#include "legalattr/crf.h"
#include "legalattr/error.h"

namespace legalattr {
namespace crf {
namespace {

using emission::SparseFeatureVector;

struct RandomChain {
  Matrix emissions;
  ChainScores chain;
};

RandomChain MakeRandom(std::mt19937_64 &rng, size_t n, int labels,
                       double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  RandomChain r{Matrix(n, labels), ChainScores(labels)};
  for (double &x : r.emissions.values()) x = u(rng);
  for (double &x : r.chain.transitions.values()) x = u(rng);
  for (double &x : r.chain.start) x = u(rng);
  for (double &x : r.chain.stop) x = u(rng);
  return r;
}

using oracle::Coordinates;

SequenceInput RandomSparseInput(std::mt19937_64 &rng, size_t n, uint64_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<SparseFeatureVector> seq(n);
  for (auto &v : seq) {
    v.dimension = dim;
    for (uint32_t k = 0; k < dim; ++k) {
      if (rng() % 2) v.entries.push_back({k, u(rng)});
    }
  }
  return seq;
}

SequenceInput RandomDenseInput(std::mt19937_64 &rng, size_t n, uint32_t d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, d);
  for (double &x : m.values()) x = u(rng);
  return m;
}

std::vector<int> RandomLabels(std::mt19937_64 &rng, size_t n, int labels) {
  std::vector<int> y(n);
  for (int &v : y) v = static_cast<int>(rng() % labels);
  return y;
}

void RandomizeParams(std::mt19937_64 &rng, CrfParameters *params) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double *x : Coordinates(*params)) *x = u(rng);
}

void CheckGradient(const std::vector<Instance> &batch,
                   const CrfParameters &params, double l2) {
  CHECK(oracle::MaxGradientError(batch, params, l2) < 1e-4);
}

TEST_CASE("score_sequence examples") {
  SUBCASE("zero model, one token") {
    ChainScores chain(kNumTags);
    CHECK(ScoreSequence(Matrix(1, kNumTags), chain, std::vector{3}) == 0.0);
  }
  SUBCASE("single transition") {
    ChainScores chain(3);
    chain.transitions(2, 1) = 1.5;
    CHECK(ScoreSequence(Matrix(2, 3), chain, std::vector{2, 1}) == 1.5);
  }
  SUBCASE("random three-token model") {
    std::mt19937_64 rng(1);
    const auto r = MakeRandom(rng, 3, 4);
    const std::vector<int> y = {3, 0, 2};
    const double expected =
        r.chain.start[3] + r.emissions(0, 3) + r.chain.transitions(3, 0) +
        r.emissions(1, 0) + r.chain.transitions(0, 2) + r.emissions(2, 2) +
        r.chain.stop[2];
    CHECK(ScoreSequence(r.emissions, r.chain, y) ==
          doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("label out of range") {
    CHECK_THROWS_AS(ScoreSequence(Matrix(1, 3), ChainScores(3), std::vector{3}),
                    Error);
  }
}

TEST_CASE("log_partition examples") {
  CHECK(LogPartition(Matrix(1, kNumTags), ChainScores(kNumTags)) ==
        doctest::Approx(std::log(8.0)).epsilon(1e-15));

  ChainScores chain(2);
  chain.transitions(0, 0) = 0.3;
  chain.transitions(0, 1) = -1.0;
  chain.transitions(1, 0) = 2.0;
  chain.transitions(1, 1) = 0.5;
  chain.start = {0.1, -0.2};
  chain.stop = {0.0, 0.7};
  Matrix e(2, 2);
  e(0, 0) = 1.0;
  e(0, 1) = -0.5;
  e(1, 0) = 0.25;
  e(1, 1) = 0.0;
  // The four paths written out by hand.
  const double z = std::exp(0.1 + 1.0 + 0.3 + 0.25 + 0.0) +
                   std::exp(0.1 + 1.0 - 1.0 + 0.0 + 0.7) +
                   std::exp(-0.2 - 0.5 + 2.0 + 0.25 + 0.0) +
                   std::exp(-0.2 - 0.5 + 0.5 + 0.0 + 0.7);
  CHECK(LogPartition(e, chain) == doctest::Approx(std::log(z)).epsilon(1e-14));

  Matrix shifted = e;
  for (double &x : shifted.values()) x += 3.0;
  CHECK(LogPartition(shifted, chain) ==
        doctest::Approx(std::log(z) + 6.0).epsilon(1e-14));

  Matrix bad = e;
  bad(1, 1) = NAN;
  CHECK_THROWS_AS(LogPartition(bad, chain), Error);
}

TEST_CASE("log_likelihood examples") {
  const CrfParameters zero = CrfParameters::Dense(kNumTags, 2);
  const std::vector<Instance> one = {{Matrix(1, 2), {5}}};
  CHECK(LogLikelihood(one, zero, 0.0) ==
        doctest::Approx(-std::log(8.0)).epsilon(1e-15));

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    CrfParameters p = CrfParameters::Dense(3, 2);
    RandomizeParams(rng, &p);
    const size_t n = 1 + rng() % 4;
    const Instance inst{RandomDenseInput(rng, n, 2), RandomLabels(rng, n, 3)};
    const Matrix e = ComputeEmissions(p, inst.input);
    const auto en = oracle::Enumerate(e, p.chain);
    const double expected =
        oracle::PathScore(e, p.chain, inst.labels) - en.log_partition;
    const std::vector<Instance> batch = {inst};
    REQUIRE(LogLikelihood(batch, p, 0.0) ==
            doctest::Approx(expected).epsilon(1e-12));
    REQUIRE(LogLikelihood(batch, p, 0.0) <= 0.0);
    REQUIRE(LogLikelihood(batch, p, 0.3) ==
            doctest::Approx(expected - 0.3 * SquaredNorm(p)).epsilon(1e-12));
  }
}

TEST_CASE("property: inference matches brute-force enumeration") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1500; ++trial) {
    const size_t n = 1 + rng() % 5;
    const int labels = 1 + static_cast<int>(rng() % 4);
    const auto r = MakeRandom(rng, n, labels);
    const auto en = oracle::Enumerate(r.emissions, r.chain);
    const ForwardBackward fb = RunForwardBackward(r.emissions, r.chain);
    REQUIRE(std::abs(fb.log_partition - en.log_partition) < 1e-8);
    REQUIRE(std::abs(LogPartition(r.emissions, r.chain) - en.log_partition) <
            1e-8);
    for (size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (int t = 0; t < labels; ++t) {
        REQUIRE(std::abs(fb.marginals(i, t) - en.marginals(i, t)) < 1e-8);
        REQUIRE(fb.marginals(i, t) >= 0.0);
        row += fb.marginals(i, t);
      }
      REQUIRE(std::abs(row - 1.0) < 1e-9);
    }
    const TagPrediction best = Viterbi(r.emissions, r.chain);
    REQUIRE(best.labels == en.best_path);
    REQUIRE(std::abs(best.score - en.best_score) < 1e-8);
    REQUIRE(best.score == ScoreSequence(r.emissions, r.chain, best.labels));
    for (size_t i = 0; i < n; ++i) {
      REQUIRE(fb.marginals(i, best.labels[i]) >=
              1.0 / std::pow(labels, static_cast<double>(n)) - 1e-12);
    }
  }
}

TEST_CASE("expected transitions match enumeration") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 1 + rng() % 4;
    const int labels = 1 + static_cast<int>(rng() % 3);
    const auto r = MakeRandom(rng, n, labels);
    const double log_z = oracle::Enumerate(r.emissions, r.chain).log_partition;
    Matrix expected(labels, labels);
    oracle::ForEachPath(n, labels, [&](const std::vector<int> &path) {
      const double p =
          std::exp(oracle::PathScore(r.emissions, r.chain, path) - log_z);
      for (size_t i = 1; i < n; ++i) expected(path[i - 1], path[i]) += p;
    });
    const ForwardBackward fb = RunForwardBackward(r.emissions, r.chain);
    for (size_t k = 0; k < expected.values().size(); ++k) {
      REQUIRE(std::abs(fb.expected_transitions.values()[k] -
                       expected.values()[k]) < 1e-8);
    }
  }
}

TEST_CASE("marginals examples") {
  const Matrix m = Marginals(Matrix(1, kNumTags), ChainScores(kNumTags));
  for (int t = 0; t < kNumTags; ++t) {
    CHECK(m(0, t) == doctest::Approx(0.125).epsilon(1e-15));
  }
}

TEST_CASE("viterbi examples") {
  SUBCASE("dominant entries, zero transitions") {
    Matrix e(4, 5);
    const std::vector<int> argmax = {4, 0, 2, 2};
    for (size_t i = 0; i < 4; ++i) e(i, argmax[i]) = 3.0;
    CHECK(Viterbi(e, ChainScores(5)).labels == argmax);
  }
  SUBCASE("all-zero model decodes to tag zero") {
    const TagPrediction p =
        Viterbi(Matrix(6, kNumTags), ChainScores(kNumTags));
    CHECK(p.labels == std::vector<int>(6, 0));
    CHECK(p.score == 0.0);
  }
  SUBCASE("partial tie resolves to the lower index") {
    Matrix e(2, 3);
    e(0, 1) = 1.0;
    e(0, 2) = 1.0;
    e(1, 2) = 0.5;
    e(1, 0) = 0.5;
    CHECK(Viterbi(e, ChainScores(3)).labels == std::vector<int>{1, 0});
  }
  SUBCASE("long sequences stay finite") {
    std::mt19937_64 rng(6);
    const auto r = MakeRandom(rng, 5000, kNumTags, 5.0);
    const ForwardBackward fb = RunForwardBackward(r.emissions, r.chain);
    CHECK(std::isfinite(fb.log_partition));
    const TagPrediction p = Viterbi(r.emissions, r.chain);
    CHECK(p.score <= fb.log_partition);
  }
}

TEST_CASE("property: row shifts leave the distribution unchanged") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t n = 1 + rng() % 6;
    const int labels = 2 + static_cast<int>(rng() % 6);
    const auto r = MakeRandom(rng, n, labels);
    const size_t row = rng() % n;
    const double c = std::uniform_real_distribution<double>(-50, 50)(rng);
    Matrix shifted = r.emissions;
    for (int t = 0; t < labels; ++t) shifted(row, t) += c;
    const ForwardBackward a = RunForwardBackward(r.emissions, r.chain);
    const ForwardBackward b = RunForwardBackward(shifted, r.chain);
    REQUIRE(std::abs(b.log_partition - a.log_partition - c) < 1e-9);
    for (size_t k = 0; k < a.marginals.values().size(); ++k) {
      REQUIRE(std::abs(a.marginals.values()[k] - b.marginals.values()[k]) <
              1e-9);
    }
    REQUIRE(Viterbi(r.emissions, r.chain).labels ==
            Viterbi(shifted, r.chain).labels);
  }
}

TEST_CASE("gradient matches finite differences") {
  std::mt19937_64 rng(31);
  SUBCASE("three-token, three-tag toy") {
    CrfParameters p = CrfParameters::Sparse(3, 4);
    RandomizeParams(rng, &p);
    std::vector<Instance> batch = {
        {RandomSparseInput(rng, 3, 4), RandomLabels(rng, 3, 3)}};
    CheckGradient(batch, p, 0.0);
  }
  SUBCASE("random sparse batches") {
    for (int trial = 0; trial < 30; ++trial) {
      const int labels = 2 + static_cast<int>(rng() % 3);
      const uint64_t dim = 2 + rng() % 5;
      CrfParameters p = CrfParameters::Sparse(labels, dim);
      RandomizeParams(rng, &p);
      std::vector<Instance> batch;
      for (int k = 0; k < 3; ++k) {
        const size_t n = 1 + rng() % 5;
        batch.push_back({RandomSparseInput(rng, n, dim),
                         RandomLabels(rng, n, labels)});
      }
      CheckGradient(batch, p, trial % 2 ? 0.05 : 0.0);
    }
  }
  SUBCASE("random dense batches") {
    for (int trial = 0; trial < 30; ++trial) {
      const int labels = 2 + static_cast<int>(rng() % 3);
      const uint32_t d = 1 + static_cast<uint32_t>(rng() % 4);
      CrfParameters p = CrfParameters::Dense(labels, d);
      RandomizeParams(rng, &p);
      std::vector<Instance> batch;
      for (int k = 0; k < 3; ++k) {
        const size_t n = 1 + rng() % 5;
        batch.push_back(
            {RandomDenseInput(rng, n, d), RandomLabels(rng, n, labels)});
      }
      CheckGradient(batch, p, trial % 2 ? 0.05 : 0.0);
    }
  }
}

TEST_CASE("gradient vanishes on a saturated toy set at the zero model") {
  // Every label sequence of length 3 over three tags appears once with the
  // same input, so empirical and expected counts coincide at zero.
  std::mt19937_64 rng(5);
  const SequenceInput input = RandomSparseInput(rng, 3, 4);
  std::vector<Instance> batch;
  oracle::ForEachPath(3, 3, [&](const std::vector<int> &path) {
    batch.push_back({input, path});
  });
  const CrfParameters zero = CrfParameters::Sparse(3, 4);
  CrfParameters g = Gradient(batch, zero, 0.0);
  for (double *x : Coordinates(g)) CHECK(std::abs(*x) < 1e-6);

  const SequenceInput dense = RandomDenseInput(rng, 3, 2);
  for (auto &inst : batch) inst.input = dense;
  g = Gradient(batch, CrfParameters::Dense(3, 2), 0.0);
  for (double *x : Coordinates(g)) CHECK(std::abs(*x) < 1e-6);
}

TEST_CASE("l2 shifts every coordinate by -2 lambda theta") {
  std::mt19937_64 rng(8);
  for (EmissionMode mode : {EmissionMode::kSparse, EmissionMode::kDense}) {
    CrfParameters p = mode == EmissionMode::kSparse
                          ? CrfParameters::Sparse(3, 5)
                          : CrfParameters::Dense(3, 2);
    RandomizeParams(rng, &p);
    std::vector<Instance> batch;
    for (int k = 0; k < 4; ++k) {
      batch.push_back({mode == EmissionMode::kSparse
                           ? RandomSparseInput(rng, 3, 5)
                           : RandomDenseInput(rng, 3, 2),
                       RandomLabels(rng, 3, 3)});
    }
    const double lambda = 0.37;
    CrfParameters g0 = Gradient(batch, p, 0.0);
    CrfParameters g1 = Gradient(batch, p, lambda);
    auto a = Coordinates(g0), b = Coordinates(g1), theta = Coordinates(p);
    for (size_t k = 0; k < a.size(); ++k) {
      CHECK(*b[k] - *a[k] ==
            doctest::Approx(-2.0 * lambda * *theta[k]).epsilon(1e-12));
    }
  }
}

CrfModel ToyModel(EmissionMode mode) {
  std::mt19937_64 rng(42);
  CrfModel model;
  model.params = mode == EmissionMode::kSparse
                     ? CrfParameters::Sparse(kNumTags, 16)
                     : CrfParameters::Dense(kNumTags, 3);
  RandomizeParams(rng, &model.params);
  model.params.chain.transitions(0, 1) = -0.0;
  model.params.chain.start[2] = 1e-300;
  model.metadata = {42, 7, -12.5};
  return model;
}

ErrorKind DeserializeError(const std::string &bytes) {
  try {
    DeserializeModel(bytes);
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("model loaded");
  return ErrorKind::kInvalidInput;
}

TEST_CASE("model serialization") {
  for (EmissionMode mode : {EmissionMode::kSparse, EmissionMode::kDense}) {
    const CrfModel model = ToyModel(mode);
    const std::string bytes = SerializeModel(model);
    CHECK(bytes.substr(0, 5) == "LXCRF");
    const CrfModel back = DeserializeModel(bytes);
    CHECK(back == model);
    CHECK(SerializeModel(back) == bytes);
    CHECK(std::signbit(back.params.chain.transitions(0, 1)));

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const SequenceInput input = mode == EmissionMode::kSparse
                                      ? RandomSparseInput(rng, 5, 16)
                                      : RandomDenseInput(rng, 5, 3);
      const TagPrediction a = model.Predict(input, true);
      const TagPrediction b = back.Predict(input, true);
      CHECK(a.labels == b.labels);
      CHECK(a.score == b.score);
      CHECK(*a.marginals == *b.marginals);
    }

    SUBCASE("every flipped byte is rejected") {
      size_t parameters = 0;
      {
        CrfParameters copy = model.params;
        parameters = Coordinates(copy).size();
      }
      const size_t payload_begin = bytes.size() - 4 - 8 * parameters;
      for (size_t k = 0; k < bytes.size(); k += 1 + bytes.size() / 97) {
        std::string bad = bytes;
        bad[k] = static_cast<char>(bad[k] ^ 0x10);
        const ErrorKind kind = DeserializeError(bad);
        if (k < 5) {
          CHECK(kind == ErrorKind::kFormat);
        } else if (k < 7) {
          CHECK(kind == ErrorKind::kVersion);
        } else if (k >= payload_begin) {
          CHECK(kind == ErrorKind::kChecksum);
        } else {
          // A damaged dimension field can make the header promise more bytes
          // than the file holds.
          CHECK((kind == ErrorKind::kChecksum || kind == ErrorKind::kTruncated));
        }
      }
    }
    SUBCASE("older version") {
      std::string old = bytes;
      old[5] = 0;
      CHECK(DeserializeError(old) == ErrorKind::kVersion);
    }
    SUBCASE("truncation") {
      for (size_t keep : {size_t{0}, size_t{3}, size_t{20}, bytes.size() / 2,
                          bytes.size() - 1}) {
        const ErrorKind kind = DeserializeError(bytes.substr(0, keep));
        CHECK(kind == ErrorKind::kTruncated);
      }
    }
  }
}

TEST_CASE("extract_spans examples") {
  const std::vector<corpus::Token> tokens = {
      {"the", 0, 3}, {"two", 4, 7}, {"witnesses", 8, 17}, {"agreed", 18, 24}};
  CHECK(ExtractSpans(tokens, std::vector<int>{kNoTag, kWittest, kWittest, kNoTag}) ==
        std::vector<ExtractedSpan>{{kWittest, 1, 3, "two witnesses"}});
  CHECK(ExtractSpans(tokens, std::vector(4, static_cast<int>(kNoTag))).empty());
  const std::vector<corpus::Token> three(tokens.begin(), tokens.begin() + 3);
  CHECK(ExtractSpans(three, std::vector<int>{kAssault, kNoTag, kAssault}) ==
        std::vector<ExtractedSpan>{{kAssault, 0, 1, "the"},
                                   {kAssault, 2, 3, "witnesses"}});
  CHECK(ExtractSpans(three, std::vector<int>{kAssault, kRiot, kRiot}) ==
        std::vector<ExtractedSpan>{{kAssault, 0, 1, "the"},
                                   {kRiot, 1, 3, "two witnesses"}});
}

}  // namespace
}  // namespace crf
}  // namespace legalattr
