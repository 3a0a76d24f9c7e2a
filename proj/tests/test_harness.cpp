#include <gtest/gtest.h>

#include <random>

#include "eagi/agents.hpp"
#include "eagi/harness.hpp"
#include "support/paths.hpp"

using namespace eagi;

namespace {

const QuestionBank& shipped() {
  static const QuestionBank bank = load_bank(testpaths::bank_text());
  return bank;
}

std::map<CognitionLevel, LevelSummary> rates(std::initializer_list<double> per_level) {
  std::map<CognitionLevel, LevelSummary> out;
  int k = 1;
  for (double r : per_level) {
    LevelSummary s;
    s.items = 10;
    s.pass = static_cast<std::size_t>(r * 10 + 0.5);
    s.fail = s.items - s.pass;
    out[level_from_ordinal(k++)] = s;
  }
  return out;
}

int ordinal_or_zero(std::optional<CognitionLevel> l) { return l ? ordinal(*l) : 0; }

class FlakyAgent : public AgentAdapter {
 public:
  explicit FlakyAgent(const std::vector<QuestionInstance>& items, std::string broken)
      : inner_(items), broken_(std::move(broken)) {}
  std::string name() const override { return "flaky"; }
  std::string answer(const std::string& p, const AgentMetadata& m) override {
    if (m.item_id == broken_) throw TransportError("connection reset");
    return inner_.answer(p, m);
  }

 private:
  OracleAgent inner_;
  std::string broken_;
};

}  // namespace

TEST(Competence, Examples) {
  EXPECT_EQ(assign_competence_level(rates({1, 1, 1, 0.9, 0.2, 0})), CognitionLevel::Analyze);
  EXPECT_EQ(assign_competence_level(rates({0.5, 0.5, 0.5, 0.5, 0.5, 0.5})), std::nullopt);
  EXPECT_EQ(assign_competence_level(rates({1, 1, 1, 1, 1, 1})), CognitionLevel::Reflect);
  // a gap blocks everything above it
  EXPECT_EQ(assign_competence_level(rates({1, 0.6, 1, 1, 1, 1})), CognitionLevel::Remember);
  // exactly at threshold counts
  EXPECT_EQ(assign_competence_level(rates({0.7})), CognitionLevel::Remember);
  EXPECT_EQ(assign_competence_level(rates({0.7}), 0.71), std::nullopt);
}

TEST(Competence, UnpopulatedLevelsNeitherCountNorBlock) {
  std::map<CognitionLevel, LevelSummary> only_l2;
  only_l2[CognitionLevel::Understand] = {4, 4, 0, 0, 0, 1.0};
  EXPECT_EQ(assign_competence_level(only_l2), CognitionLevel::Understand);
  auto gappy = rates({1, 1});
  gappy[CognitionLevel::Analyze] = {2, 2, 0, 0, 0, 1.0};
  EXPECT_EQ(assign_competence_level(gappy), CognitionLevel::Analyze);
  EXPECT_EQ(assign_competence_level({}), std::nullopt);
}

// Raising every pass rate can only lift the assigned level.
TEST(CompetenceProperty, MonotoneInPassRates) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::map<CognitionLevel, LevelSummary> a;
    for (auto lvl : kAllLevels) {
      if (rng() % 5 == 0) continue;
      LevelSummary s;
      s.items = 1 + rng() % 10;
      s.pass = rng() % (s.items + 1);
      a[lvl] = s;
    }
    auto b = a;
    for (auto& [lvl, s] : b) s.pass = std::min(s.items, s.pass + static_cast<std::size_t>(rng() % 3));
    const int la = ordinal_or_zero(assign_competence_level(a));
    const int lb = ordinal_or_zero(assign_competence_level(b));
    ASSERT_LE(la, lb);
  }
}

TEST(Harness, EmptyRunIsValid) {
  OracleAgent agent({});
  const auto r = run_evaluation({}, agent);
  EXPECT_TRUE(r.items.empty());
  EXPECT_TRUE(r.levels.empty());
  EXPECT_FALSE(r.competence_level);
  EXPECT_EQ(to_json(r)["competence_level"], 0);
  EXPECT_EQ(load_report(to_json(r).dump()), r);
  EXPECT_FALSE(to_markdown(r).empty());
}

TEST(Harness, OracleAgentPassesEverything) {
  OracleAgent agent(shipped().instances);
  const auto r = run_evaluation(shipped().instances, agent);
  ASSERT_EQ(r.items.size(), shipped().instances.size());
  for (const auto& it : r.items) EXPECT_EQ(it.score.verdict, Verdict::Pass) << it.id;
  EXPECT_EQ(r.competence_level, CognitionLevel::Reflect);
  for (const auto& [lvl, s] : r.levels) EXPECT_EQ(s.pass_rate(), 1.0);
  EXPECT_EQ(r.agent, "oracle");
  EXPECT_FALSE(r.transport_exhausted());
}

TEST(Harness, OneWrongAnswerFailsOnlyThatItem) {
  const auto& items = shipped().instances;
  std::map<std::string, std::string> answers;
  for (const auto& q : items) answers[q.id] = reference_answer(q.answer_spec);
  answers["L3-no-load-rpm/1"] = "It spins at 9100 RPM.";
  ReplayAgent agent(answers);
  const auto r = run_evaluation(items, agent);
  for (const auto& it : r.items) {
    const auto want = it.id == "L3-no-load-rpm/1" ? Verdict::Fail : Verdict::Pass;
    EXPECT_EQ(it.score.verdict, want) << it.id;
  }
  const auto& l3 = r.levels.at(CognitionLevel::Apply);
  EXPECT_EQ(l3.fail, 1u);
  EXPECT_EQ(l3.pass, l3.items - 1);
}

TEST(Harness, SummaryCountsAddUp) {
  const auto r = run_evaluation(shipped().instances, *std::make_unique<ReplayAgent>(
                                                         ReplayAgent::from_json_text(testpaths::slurp(
                                                             testpaths::data("sample_answers.json")))));
  std::size_t total = 0;
  for (const auto& [lvl, s] : r.levels) {
    EXPECT_EQ(s.pass + s.partial + s.fail + s.unscorable, s.items);
    EXPECT_GE(s.mean_value, 0.0);
    EXPECT_LE(s.mean_value, 1.0);
    total += s.items;
  }
  EXPECT_EQ(total, r.items.size());
  for (const auto& it : r.items) EXPECT_TRUE(consistent(it.score)) << it.id;
}

TEST(Harness, ReportRoundTrip) {
  auto r = run_evaluation(shipped().instances, *std::make_unique<ReplayAgent>(ReplayAgent::from_json_text(
                                                   testpaths::slurp(testpaths::data("sample_answers.json")))));
  r.run_id = "test-run";
  r.run = {{"mode", "curriculum"}, {"seed", 9}};
  const auto back = load_report(to_json(r).dump(2));
  EXPECT_EQ(back, r);
  EXPECT_EQ(to_json(back), to_json(r));
}

TEST(Harness, ReportRejectsInconsistentDocs) {
  OracleAgent agent(shipped().instances);
  json doc = to_json(run_evaluation(shipped().instances, agent));
  json bad = doc;
  bad["items"][0]["value"] = 0.5;
  EXPECT_THROW(load_report(bad.dump()), BankError);
  bad = doc;
  bad["schema_version"] = 99;
  EXPECT_THROW(load_report(bad.dump()), BankError);
  EXPECT_THROW(load_report("[]"), BankError);
  EXPECT_THROW(load_report("{"), BankError);
}

TEST(Harness, MarkdownHasOneRowPerLevel) {
  OracleAgent agent(shipped().instances);
  const auto md = to_markdown(run_evaluation(shipped().instances, agent));
  for (auto lvl : kAllLevels) {
    const std::string row = "| " + std::to_string(ordinal(lvl)) + " " + std::string(to_string(lvl)) + " |";
    std::size_t count = 0;
    for (auto p = md.find(row); p != std::string::npos; p = md.find(row, p + 1)) ++count;
    EXPECT_EQ(count, 1u) << row;
  }
}

TEST(Harness, TransportFailureScoresUnscorable) {
  const auto& items = shipped().instances;
  FlakyAgent agent(items, "L2-voltage-range");
  const auto r = run_evaluation(items, agent);
  for (const auto& it : r.items) {
    if (it.id == "L2-voltage-range") {
      EXPECT_EQ(it.score.verdict, Verdict::Unscorable);
      ASSERT_TRUE(it.transport_error);
      EXPECT_NE(it.transport_error->find("connection reset"), std::string::npos);
    } else {
      EXPECT_EQ(it.score.verdict, Verdict::Pass) << it.id;
      EXPECT_FALSE(it.transport_error);
    }
  }
  EXPECT_TRUE(r.transport_exhausted());
  EXPECT_EQ(load_report(to_json(r).dump()), r);
}

TEST(Harness, FailFastRethrows) {
  FlakyAgent agent(shipped().instances, "L1-kv-rpm");
  RunOptions opts;
  opts.fail_fast = true;
  EXPECT_THROW(run_evaluation(shipped().instances, agent, opts), TransportError);
}

TEST(Harness, ConcurrencyDoesNotChangeResults) {
  const auto answers = ReplayAgent::from_json_text(testpaths::slurp(testpaths::data("sample_answers.json")));
  auto strip = [](EvaluationReport r) {
    r.elapsed_ms = 0;
    return r;
  };
  RunOptions serial;
  serial.max_in_flight = 1;
  ReplayAgent a = answers;
  const auto base = strip(run_evaluation(shipped().instances, a, serial));
  for (std::size_t k : {2u, 8u, 64u}) {
    RunOptions o;
    o.max_in_flight = k;
    ReplayAgent b = answers;
    EXPECT_EQ(strip(run_evaluation(shipped().instances, b, o)), base) << k;
  }
}

TEST(Harness, ThresholdIsRecorded) {
  const auto answers = ReplayAgent::from_json_text(testpaths::slurp(testpaths::data("sample_answers.json")));
  ReplayAgent a = answers;
  RunOptions strict;
  strict.threshold = 1.0;
  const auto r = run_evaluation(shipped().instances, a, strict);
  EXPECT_EQ(r.threshold, 1.0);
  EXPECT_EQ(r.competence_level, assign_competence_level(r.levels, 1.0));
}
