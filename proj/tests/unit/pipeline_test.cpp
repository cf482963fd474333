#include <gtest/gtest.h>

#include "proact/pipeline.hpp"
#include "proact/service.hpp"
#include "support/fixtures.hpp"

namespace proact {
namespace {

using L = SentimentLabel;

std::shared_ptr<const Classifier> neutralModel() {
  return std::make_shared<testing::ConstantModel>(std::array<double, 3>{0.2, 0.5, 0.3});
}

std::shared_ptr<const Classifier> nbModel() {
  return std::make_shared<NaiveBayesModel>(NaiveBayesModel::train(testing::sixDocumentCorpus()));
}

constexpr CategoryId kSubtle = 1;
constexpr CategoryId kMixed = 2;

template <typename F>
ErrorCode codeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(Pipeline, BootstrapCategories) {
  Platform p;
  ASSERT_EQ(p.categories().size(), 5u);
  const char* names[] = {"Subtle Sentiment Cues", "Mixed-sentiment", "Questions", "Others", "No majority"};
  for (CategoryId id = 1; id <= 5; ++id) EXPECT_EQ(p.categories().at(id).name, names[id - 1]);
  EXPECT_EQ(p.noMajorityCategory(), 5u);
}

TEST(Pipeline, FiveWordMinimum) {
  Service svc(neutralModel());
  const auto s = svc.openSession("w", kSubtle, PromptCondition{false, false});
  EXPECT_EQ(codeOf([&] { svc.submitTrial(s.id, "Is that girl pretty?"); }), ErrorCode::TooShort);
  EXPECT_EQ(codeOf([&] { svc.submitTrial(s.id, ""); }), ErrorCode::TooShort);
  const Trial t = svc.submitTrial(s.id, "Is that girl really pretty?");
  EXPECT_EQ(t.prediction.label, L::Neutral);
  EXPECT_FALSE(t.explanation.has_value());
  EXPECT_EQ(t.claim, ClaimState::Pending);
}

TEST(Pipeline, ExplanationOnlyUnderLimeAndDeterministic) {
  Service svc(nbModel());
  const auto lime = svc.openSession("w", kSubtle, PromptCondition{true, false});
  const std::string text = "the staff were excellent and friendly";
  const Trial a = svc.submitTrial(lime.id, text);
  const Trial b = svc.submitTrial(lime.id, text);
  ASSERT_TRUE(a.explanation && b.explanation);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(a.explanation->classWeights[c], b.explanation->classWeights[c]);
  EXPECT_EQ(a.explanation->fidelity, b.explanation->fidelity);
  EXPECT_LT(a.submittedAt, b.submittedAt);  // strictly ordered even with a frozen clock
  const auto plain = svc.openSession("w", kSubtle, PromptCondition{false, false});
  EXPECT_FALSE(svc.submitTrial(plain.id, text).explanation.has_value());
}

TEST(Pipeline, ClaimRules) {
  Service svc(neutralModel());
  const auto s = svc.openSession("w", kSubtle, PromptCondition{false, false});
  const Trial t1 = svc.submitTrial(s.id, "the soup was lovely and warm");
  const Trial won = svc.claim(t1.id, ClaimState::ClaimedWin, L::Positive);
  EXPECT_EQ(won.claim, ClaimState::ClaimedWin);
  EXPECT_EQ(won.asserted, L::Positive);
  EXPECT_TRUE(svc.read([&](const Platform& p) { return p.board().isQueued(t1.id); }));
  EXPECT_EQ(codeOf([&] { svc.claim(t1.id, ClaimState::ClaimedWin, L::Negative); }), ErrorCode::AlreadyResolved);

  const Trial t2 = svc.submitTrial(s.id, "the soup was fine I guess");
  EXPECT_EQ(codeOf([&] { svc.claim(t2.id, ClaimState::ClaimedWin, L::Neutral); }),
            ErrorCode::LabelMatchesPrediction);
  svc.claim(t2.id, ClaimState::Continued);
  EXPECT_FALSE(svc.read([&](const Platform& p) { return p.board().isQueued(t2.id); }));
  EXPECT_EQ(codeOf([&] { svc.claim(t2.id, ClaimState::ClaimedWin, L::Positive); }), ErrorCode::AlreadyResolved);

  const Trial t3 = svc.submitTrial(s.id, "I do not know what to write");
  svc.claim(t3.id, ClaimState::GivenUp);
  EXPECT_EQ(codeOf([&] { svc.submitTrial(s.id, "one more try with words"); }), ErrorCode::SessionClosed);
  EXPECT_EQ(codeOf([&] { svc.claim(999, ClaimState::Continued); }), ErrorCode::NotFound);
}

TEST(Pipeline, StartingPointSampling) {
  Service svc(neutralModel());
  const auto plain = svc.openSession("w", kSubtle, PromptCondition{true, false});
  EXPECT_FALSE(plain.startingSample.has_value());
  EXPECT_TRUE(plain.startingText.empty());
  EXPECT_EQ(codeOf([&] { svc.openSession("w", kSubtle, PromptCondition{true, true}); }),
            ErrorCode::NoSeedErrorsAvailable);

  const auto only = svc.importSeed("the movie was a real gem", L::Positive, kMixed);
  for (int k = 0; k < 20; ++k) {
    EXPECT_EQ(svc.openSession("w", kMixed, PromptCondition{false, true}).startingSample, only.id);
  }

  std::map<SampleId, int> counts;
  for (int k = 0; k < 10; ++k) {
    counts[svc.importSeed("seed sentence number " + std::to_string(k), L::Negative, kSubtle).id] = 0;
  }
  for (int k = 0; k < 10000; ++k) {
    const auto s = svc.openSession("w", kSubtle, PromptCondition{false, true});
    ASSERT_TRUE(s.startingSample.has_value());
    ++counts.at(*s.startingSample);
  }
  for (const auto& [id, n] : counts) {
    EXPECT_GE(n, 850) << id;
    EXPECT_LE(n, 1150) << id;
  }
}

Trial resolvedTrial(ClaimState claim) {
  Trial t;
  t.id = 7;
  t.worker = "w";
  t.claim = claim;
  return t;
}

AdjudicationResult resultOf(AdjudicationStatus status, CategoryId cat) {
  AdjudicationResult r;
  r.sampleId = 7;
  r.status = status;
  r.category = cat;
  return r;
}

TEST(Ledger, SettleBonusExamples) {
  Session s;
  s.target = kSubtle;
  const PaymentRates rates;
  const Trial win = resolvedTrial(ClaimState::ClaimedWin);
  EXPECT_EQ(settleBonuses(win, s, resultOf(AdjudicationStatus::ValidatedFailing, kSubtle), rates).total(),
            Money::fromDollars(0.11));
  EXPECT_EQ(settleBonuses(win, s, resultOf(AdjudicationStatus::ValidatedNotFailing, kSubtle), rates).total(),
            Money::fromDollars(0.01));
  EXPECT_EQ(settleBonuses(win, s, resultOf(AdjudicationStatus::ValidatedFailing, kMixed), rates).total(),
            Money::fromDollars(0.06));
  EXPECT_EQ(settleBonuses(resolvedTrial(ClaimState::Continued), s, std::nullopt, rates).total(),
            Money::fromDollars(0.01));
  EXPECT_EQ(codeOf([&] { settleBonuses(win, s, std::nullopt, rates); }), ErrorCode::AdjudicationIncomplete);
  EXPECT_EQ(codeOf([&] { settleBonuses(resolvedTrial(ClaimState::Pending), s, std::nullopt, rates); }),
            ErrorCode::AdjudicationIncomplete);
  const auto e = settleBonuses(win, s, resultOf(AdjudicationStatus::ValidatedFailing, kMixed), rates);
  EXPECT_GT(e.failBonus.micros, 0);
  EXPECT_EQ(e.categoryBonus.micros, 0);
}

void validate(Service& svc, SampleId id, const std::vector<std::pair<L, CategoryId>>& votes) {
  int k = 0;
  for (const auto& [label, cat] : votes) {
    const std::string worker = "validator" + std::to_string(k++);
    const auto a = svc.assignTasks(worker);
    bool found = false;
    for (const auto& it : a.items) found = found || it.sampleId == id;
    ASSERT_TRUE(found);
    Judgment j;
    j.sampleId = id;
    j.workerId = worker;
    j.sentiment = label;
    j.category = cat;
    svc.recordJudgment(j);
  }
}

TEST(Ledger, SettledOnAdjudicationAndSummed) {
  PlatformConfig cfg;
  cfg.validation.goldRate = 0.0;
  cfg.validation.batchSize = 1;
  Service svc(neutralModel(), cfg);
  const auto s = svc.openSession("crafter", kSubtle, PromptCondition{false, false});
  const Trial t1 = svc.submitTrial(s.id, "the view was simply breathtaking tonight");
  const Trial t2 = svc.submitTrial(s.id, "the soup was fine but the bread was stale");
  const Trial t3 = svc.submitTrial(s.id, "nothing much happened on the way home");
  svc.claim(t1.id, ClaimState::ClaimedWin, L::Positive);
  svc.claim(t2.id, ClaimState::ClaimedWin, L::Negative);
  svc.claim(t3.id, ClaimState::GivenUp);
  EXPECT_EQ(svc.read([](const Platform& p) { return p.ledgerTotal(); }), Money::fromDollars(0.01));
  EXPECT_EQ(codeOf([&] { svc.read([&](const Platform& p) { return p.settle(t1.id); }); }),
            ErrorCode::AdjudicationIncomplete);

  const std::vector<std::pair<L, CategoryId>> subtle(5, {L::Positive, kSubtle});
  validate(svc, t1.id, subtle);
  const std::vector<std::pair<L, CategoryId>> mixed(5, {L::Negative, kMixed});
  validate(svc, t2.id, mixed);
  // 0.01 (give-up) + 0.11 (fail, on target) + 0.06 (fail, off target)
  EXPECT_EQ(svc.read([](const Platform& p) { return p.ledgerTotal(); }), Money::fromDollars(0.18));
  const auto summary = svc.summary(false);
  EXPECT_EQ(summary.run.nValidated, 2u);
  EXPECT_EQ(summary.categories[0].total(), 1u);
  EXPECT_EQ(summary.categories[1].total(), 1u);
}

}  // namespace
}  // namespace proact
