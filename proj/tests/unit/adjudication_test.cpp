#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "proact/adjudication.hpp"

namespace proact {
namespace {

constexpr CategoryId kNoMajority = 5;
constexpr CategoryId kSubtle = 1;
constexpr CategoryId kMixed = 2;

Judgment vote(const std::string& worker, SentimentLabel s, CategoryId c = kSubtle, SampleId sample = 1) {
  Judgment j;
  j.sampleId = sample;
  j.workerId = worker;
  j.isEnglishAndSensible = true;
  j.sentiment = s;
  j.category = c;
  return j;
}

Judgment nonsense(const std::string& worker, SampleId sample = 1) {
  Judgment j;
  j.sampleId = sample;
  j.workerId = worker;
  j.isEnglishAndSensible = false;
  return j;
}

using L = SentimentLabel;

TEST(Adjudicate, ThreeOfFivePositiveAgainstNeutralPrediction) {
  const std::vector<Judgment> js = {vote("a", L::Positive), vote("b", L::Positive), vote("c", L::Positive),
                                    vote("d", L::Negative), vote("e", L::Neutral)};
  const auto r = adjudicate(1, js, L::Neutral, kNoMajority, 5);
  EXPECT_EQ(r.status, AdjudicationStatus::ValidatedFailing);
  EXPECT_EQ(r.groundTruth, L::Positive);
  EXPECT_DOUBLE_EQ(r.confHuman, 0.6);
  EXPECT_EQ(r.judgmentCount, 5u);
  EXPECT_EQ(r.category, kSubtle);
}

TEST(Adjudicate, TieForFirstHasNoMajority) {
  const std::vector<Judgment> js = {vote("a", L::Positive), vote("b", L::Positive), vote("c", L::Negative),
                                    vote("d", L::Negative), vote("e", L::Neutral)};
  const auto r = adjudicate(1, js, L::Neutral, kNoMajority, 5);
  EXPECT_EQ(r.status, AdjudicationStatus::NoMajoritySentiment);
  EXPECT_FALSE(r.groundTruth.has_value());
}

TEST(Adjudicate, AllNonsenseRejected) {
  std::vector<Judgment> js;
  for (const char* w : {"a", "b", "c", "d", "e"}) js.push_back(nonsense(w));
  const auto r = adjudicate(1, js, L::Neutral, kNoMajority, 5);
  EXPECT_EQ(r.status, AdjudicationStatus::RejectedNonsense);
  EXPECT_EQ(r.category, kNoMajority);
}

TEST(Adjudicate, NonsenseNeedsStrictMajority) {
  const std::vector<Judgment> js = {nonsense("a"), nonsense("b"), vote("c", L::Negative), vote("d", L::Negative),
                                    vote("e", L::Positive, kMixed)};
  const auto r = adjudicate(1, js, L::Positive, kNoMajority, 5);
  EXPECT_EQ(r.status, AdjudicationStatus::ValidatedFailing);
  EXPECT_EQ(r.groundTruth, L::Negative);
  EXPECT_NEAR(r.confHuman, 2.0 / 3.0, 1e-12);  // sentiment-bearing votes only
  EXPECT_EQ(r.category, kSubtle);
}

TEST(Adjudicate, AgreementWithPredictionIsNotFailing) {
  std::vector<Judgment> js;
  for (const char* w : {"a", "b", "c", "d", "e"}) js.push_back(vote(w, L::Negative));
  const auto r = adjudicate(1, js, L::Negative, kNoMajority, 5);
  EXPECT_EQ(r.status, AdjudicationStatus::ValidatedNotFailing);
  EXPECT_DOUBLE_EQ(r.confHuman, 1.0);
}

TEST(Adjudicate, CategoryTieFallsBackToNoMajority) {
  const std::vector<Judgment> js = {vote("a", L::Positive, kSubtle), vote("b", L::Positive, kSubtle),
                                    vote("c", L::Positive, kMixed), vote("d", L::Positive, kMixed),
                                    vote("e", L::Positive, 3)};
  EXPECT_EQ(adjudicate(1, js, L::Neutral, kNoMajority, 5).category, kNoMajority);
}

TEST(Adjudicate, QuorumNotMet) {
  const std::vector<Judgment> js = {vote("a", L::Positive)};
  try {
    adjudicate(1, js, L::Neutral, kNoMajority, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::QuorumNotMet);
  }
}

// Independent counter: tally by string key, find the maximum, count how many
// keys reach it.
struct BruteForce {
  bool tie = false;
  SentimentLabel winner = L::Neutral;
  double conf = 0.0;
};

BruteForce bruteForce(const std::vector<SentimentLabel>& votes) {
  std::map<std::string, int> tally;
  for (auto v : votes) tally[std::string(toString(v))] += 1;
  int best = -1;
  std::string bestKey;
  for (const auto& [k, n] : tally) {
    if (n > best) {
      best = n;
      bestKey = k;
    }
  }
  int atBest = 0;
  for (const auto& [k, n] : tally) atBest += (n == best);
  BruteForce b;
  b.tie = atBest > 1;
  b.winner = *parseLabel(bestKey);
  b.conf = static_cast<double>(best) / static_cast<double>(votes.size());
  return b;
}

TEST(Adjudicate, MatchesBruteForceOnAllFiveVoteOutcomes) {
  std::size_t checked = 0;
  for (int code = 0; code < 243; ++code) {
    std::vector<SentimentLabel> votes;
    int c = code;
    for (int k = 0; k < 5; ++k) {
      votes.push_back(static_cast<SentimentLabel>(c % 3));
      c /= 3;
    }
    std::vector<Judgment> js;
    for (int k = 0; k < 5; ++k) js.push_back(vote("w" + std::to_string(k), votes[k]));
    const auto expected = bruteForce(votes);
    for (SentimentLabel prediction : kAllLabels) {
      const auto r = adjudicate(1, js, prediction, kNoMajority, 5);
      if (expected.tie) {
        ASSERT_EQ(r.status, AdjudicationStatus::NoMajoritySentiment) << code;
      } else {
        ASSERT_EQ(r.groundTruth, expected.winner) << code;
        ASSERT_NEAR(r.confHuman, expected.conf, 1e-12) << code;
        ASSERT_EQ(r.status, expected.winner == prediction ? AdjudicationStatus::ValidatedNotFailing
                                                          : AdjudicationStatus::ValidatedFailing);
        const double allowed[] = {0.4, 0.6, 0.8, 1.0};
        ASSERT_TRUE(std::any_of(std::begin(allowed), std::end(allowed),
                                [&](double a) { return std::abs(a - r.confHuman) < 1e-12; }));
      }
    }
    ++checked;
  }
  EXPECT_EQ(checked, 243u);
}

TEST(Adjudicate, OrderIndependent) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Judgment> js;
    for (int k = 0; k < 7; ++k) {
      if (gen() % 4 == 0) {
        js.push_back(nonsense("w" + std::to_string(k)));
      } else {
        js.push_back(vote("w" + std::to_string(k), static_cast<L>(gen() % 3), 1 + gen() % 4));
      }
    }
    const auto a = adjudicate(1, js, L::Neutral, kNoMajority, 5);
    std::shuffle(js.begin(), js.end(), gen);
    ASSERT_EQ(adjudicate(1, js, L::Neutral, kNoMajority, 5), a);
  }
}

// --- board ---------------------------------------------------------------

ValidationConfig noGold() {
  ValidationConfig c;
  c.goldRate = 0.0;
  return c;
}

void judgeAll(ValidationBoard& board, const std::string& worker, Rng& rng, SentimentLabel s) {
  const auto a = board.plan(worker, rng, 0);
  board.apply(a);
  for (const auto& item : a.items) board.record(vote(worker, s, kSubtle, item.sampleId));
}

TEST(ValidationBoard, QuorumClosesSampleForSixthWorker) {
  ValidationBoard board(noGold(), kNoMajority);
  board.enqueue(10, "author", L::Neutral);
  Rng rng(1);
  for (int k = 0; k < 5; ++k) {
    const auto a = board.plan("v" + std::to_string(k), rng, 0);
    ASSERT_EQ(a.items.size(), 1u);
    EXPECT_EQ(a.items[0].sampleId, 10u);
    board.apply(a);
  }
  // Five outstanding assignments already cover the quorum.
  EXPECT_THROW(board.plan("v5", rng, 0), Error);
  for (int k = 0; k < 5; ++k) board.record(vote("v" + std::to_string(k), L::Positive, kSubtle, 10));
  ASSERT_TRUE(board.result(10).has_value());
  EXPECT_EQ(board.result(10)->status, AdjudicationStatus::ValidatedFailing);
  try {
    board.plan("v5", rng, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NothingToJudge);
  }
}

TEST(ValidationBoard, NeverAssignsOwnSampleOrRepeats) {
  ValidationBoard board(noGold(), kNoMajority);
  board.enqueue(1, "alice", L::Neutral);
  board.enqueue(2, "bob", L::Neutral);
  Rng rng(1);
  const auto a = board.plan("alice", rng, 0);
  ASSERT_EQ(a.items.size(), 1u);
  EXPECT_EQ(a.items[0].sampleId, 2u);
  board.apply(a);
  board.record(vote("alice", L::Positive, kSubtle, 2));
  EXPECT_THROW(board.plan("alice", rng, 0), Error);  // judged everything else
}

TEST(ValidationBoard, DuplicateAndUnknownAssignment) {
  ValidationBoard board(noGold(), kNoMajority);
  board.enqueue(1, "alice", L::Neutral);
  Rng rng(1);
  try {
    board.record(vote("bob", L::Positive, kSubtle, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownAssignment);
  }
  board.apply(board.plan("bob", rng, 0));
  board.record(vote("bob", L::Positive, kSubtle, 1));
  try {
    board.record(vote("bob", L::Negative, kSubtle, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateJudgment);
  }
}

TEST(ValidationBoard, SensibilityGateShapesJudgment) {
  ValidationBoard board(noGold(), kNoMajority);
  board.enqueue(1, "alice", L::Neutral);
  Rng rng(1);
  board.apply(board.plan("bob", rng, 0));
  Judgment j = nonsense("bob");
  j.sentiment = L::Positive;
  EXPECT_THROW(board.check(j), Error);
  Judgment k = vote("bob", L::Positive);
  k.category.reset();
  EXPECT_THROW(board.check(k), Error);
}

TEST(ValidationBoard, GoldRateOverManyAssignments) {
  ValidationConfig cfg;
  cfg.goldRate = 0.1;
  cfg.quorum = 1000;
  cfg.batchSize = 10;
  ValidationBoard board(cfg, kNoMajority);
  for (SampleId s = 1; s <= 2000; ++s) board.enqueue(s, "author", L::Neutral);
  for (SampleId g = 5001; g <= 5400; ++g) board.addGold({g, "gold sentence number one", true, L::Positive});
  Rng rng(2024);
  std::size_t items = 0;
  std::size_t gold = 0;
  int worker = 0;
  while (items < 1000) {
    const auto a = board.plan("v" + std::to_string(worker++), rng, 0);
    for (const auto& it : a.items) {
      if (items == 1000) break;
      ++items;
      gold += it.gold;
      EXPECT_EQ(it.gold, board.isGold(it.sampleId));
    }
  }
  EXPECT_GE(gold, 70u);
  EXPECT_LE(gold, 130u);
}

// Worker is handed six gold questions and gets the first two right. The
// fifth answer (2/5 < 0.7) triggers rejection and cancels the sixth.
TEST(ValidationBoard, LowGoldAccuracyRejectsAndRequeues) {
  ValidationConfig cfg;
  cfg.goldRate = 0.0;
  ValidationBoard board(cfg, kNoMajority);
  board.enqueue(1, "author", L::Neutral);
  for (SampleId g = 100; g < 106; ++g) board.addGold({g, "gold", true, L::Positive});

  Rng rng(1);
  // The adversary plus four honest validators reach quorum first.
  for (const char* w : {"bad", "h1", "h2", "h3", "h4"}) {
    board.apply(board.plan(w, rng, 0));
    board.record(vote(w, w == std::string("bad") ? L::Negative : L::Positive, kSubtle, 1));
  }
  ASSERT_TRUE(board.result(1).has_value());

  Assignment goldBatch{"bad", {}, 0};
  for (SampleId g = 100; g < 106; ++g) goldBatch.items.push_back({g, true});
  board.apply(goldBatch);
  RecordOutcome last;
  for (SampleId g = 100; g < 105; ++g) {
    last = board.record(vote("bad", g < 102 ? L::Positive : L::Negative, kSubtle, g));
  }
  EXPECT_TRUE(last.workerRejectedNow);
  EXPECT_EQ(board.quality("bad").goldAnswered, 5u);
  EXPECT_NEAR(board.quality("bad").accuracy(), 0.4, 1e-12);
  EXPECT_EQ(last.reopened, std::vector<SampleId>{1});
  try {
    board.record(vote("bad", L::Positive, kSubtle, 105));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownAssignment);
  }
  EXPECT_FALSE(board.result(1).has_value());
  EXPECT_EQ(board.acceptedCount(1), 4u);

  EXPECT_THROW(board.plan("bad", rng, 0), Error);
  board.apply(board.plan("h5", rng, 0));
  const auto out = board.record(vote("h5", L::Positive, kSubtle, 1));
  ASSERT_EQ(out.adjudicated.size(), 1u);
  EXPECT_EQ(out.adjudicated[0].judgmentCount, 5u);
  EXPECT_DOUBLE_EQ(out.adjudicated[0].confHuman, 1.0);
}

TEST(ValidationBoard, AccurateWorkerStaysAccepted) {
  ValidationBoard board(noGold(), kNoMajority);
  board.enqueue(1, "author", L::Neutral);
  for (SampleId g = 100; g < 105; ++g) board.addGold({g, "gold", true, L::Positive});
  Assignment goldBatch{"good", {}, 0};
  for (SampleId g = 100; g < 105; ++g) goldBatch.items.push_back({g, true});
  board.apply(goldBatch);
  for (SampleId g = 100; g < 105; ++g) {
    EXPECT_EQ(board.record(vote("good", L::Positive, kSubtle, g)).status, JudgmentStatus::Accepted);
  }
  EXPECT_FALSE(board.quality("good").rejected);
  Rng rng(3);
  judgeAll(board, "good", rng, L::Positive);
  EXPECT_EQ(board.acceptedCount(1), 1u);
}

}  // namespace
}  // namespace proact
