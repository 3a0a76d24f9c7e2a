#include <gtest/gtest.h>

#include <random>

#include "eagi/question_bank.hpp"
#include "eagi/scoring.hpp"
#include "support/paths.hpp"
#include "support/reference.hpp"

using namespace eagi;

namespace {

const QuestionBank& shipped() {
  static const QuestionBank bank = load_bank(testpaths::bank_text());
  return bank;
}

const QuestionInstance& item(const std::string& id) {
  for (const auto& q : shipped().instances)
    if (q.id == id) return q;
  throw std::out_of_range(id);
}

std::string fenced(const json& j) { return "```eagi\n" + j.dump() + "\n```"; }

std::string patch_answer(const json& patch) { return fenced({{"patch", patch}}); }
std::string design_answer(const json& design) { return fenced({{"design", design}}); }

const Evidence* find_evidence(const Score& s, const std::string& check) {
  for (const auto& e : s.evidence)
    if (e.check == check) return &e;
  return nullptr;
}

}  // namespace

TEST(Score, Invariant) {
  EXPECT_TRUE(consistent({1.0, Verdict::Pass, {{"a", "pass", "", ""}}}));
  EXPECT_FALSE(consistent({0.9, Verdict::Pass, {{"a", "pass", "", ""}}}));
  EXPECT_FALSE(consistent({0.5, Verdict::Fail, {{"a", "fail", "", ""}}}));
  EXPECT_FALSE(consistent({1.0, Verdict::Partial, {{"a", "fail", "", ""}}}));
  EXPECT_FALSE(consistent({0.0, Verdict::Partial, {{"a", "fail", "", ""}}}));
  EXPECT_FALSE(consistent({1.0, Verdict::Pass, {}}));
  EXPECT_TRUE(consistent({0.0, Verdict::Unscorable, {}}));
  for (auto v : {Verdict::Pass, Verdict::Partial, Verdict::Fail, Verdict::Unscorable})
    EXPECT_EQ(parse_verdict(to_string(v)), v);
}

TEST(ScoreNumeric, Examples) {
  const NumericSpec rpm{8436, "RPM", 0.02};
  EXPECT_EQ(score_answer(extract("8436 RPM", rpm), rpm).verdict, Verdict::Pass);
  const NumericSpec thrust{26.4, "N", 0.02};
  EXPECT_EQ(score_answer(extract("26.4 N", thrust), thrust).verdict, Verdict::Pass);
  const auto s = score_answer(extract("30.0 N", thrust), thrust);
  EXPECT_EQ(s.verdict, Verdict::Fail);
  EXPECT_EQ(s.value, 0.0);
}

TEST(ScoreNumeric, ToleranceBandEdges) {
  const NumericSpec spec{100, "N", 0.02};
  EXPECT_EQ(score_answer(extract("101.99 N", spec), spec).verdict, Verdict::Pass);
  EXPECT_EQ(score_answer(extract("98.01 N", spec), spec).verdict, Verdict::Pass);
  EXPECT_EQ(score_answer(extract("102.01 N", spec), spec).verdict, Verdict::Fail);
}

TEST(ScoreNumeric, UnitNormalization) {
  const NumericSpec dia{0.508, "m", 0.02};
  EXPECT_EQ(score_answer(extract("20 in", dia), dia).verdict, Verdict::Pass);
  EXPECT_EQ(score_answer(extract(fenced({{"value", 508}, {"unit", "mm"}}), dia), dia).verdict, Verdict::Pass);
  const NumericSpec ratio{1.524, "ratio", 0.02};
  EXPECT_EQ(score_answer(extract("about 152.4%", ratio), ratio).verdict, Verdict::Pass);
}

TEST(ScoreNumeric, UnitMismatchFailsWithUnitEvidence) {
  const NumericSpec rpm{8436, "RPM", 0.02};
  const auto s = score_answer(extract(fenced({{"value", 8436}, {"unit", "N"}}), rpm), rpm);
  EXPECT_EQ(s.verdict, Verdict::Fail);
  bool unit_row = false;
  for (const auto& e : s.evidence) unit_row = unit_row || e.check.find("unit") != std::string::npos;
  EXPECT_TRUE(unit_row);
}

TEST(ScoreNumeric, NoNumberIsUnscorable) {
  const NumericSpec rpm{8436, "RPM", 0.02};
  const auto s = score_answer(extract("no idea", rpm), rpm);
  EXPECT_EQ(s.verdict, Verdict::Unscorable);
  EXPECT_EQ(s.value, 0.0);
}

TEST(ScoreFact, FormulaSynonyms) {
  const auto& q = item("L1-thrust-equation");
  EXPECT_EQ(score(q, "T = Ct * rho * n^2 * D^4").verdict, Verdict::Pass);
  EXPECT_EQ(score(q, "T = C_T \xc2\xb7 \xcf\x81 \xc2\xb7 n\xc2\xb2 \xc2\xb7 D\xe2\x81\xb4").verdict, Verdict::Pass);
  EXPECT_EQ(score(q, fenced({{"answer", "$T = C_T \\rho n^2 D^4$"}})).verdict, Verdict::Fail)
      << "implicit multiplication is not normalized";
  EXPECT_EQ(score(q, "T = Ct * rho * n^2 * D^3").verdict, Verdict::Fail);
  EXPECT_EQ(score(q, "T = C_T x rho x n**2 x D**4").verdict, Verdict::Pass);
  EXPECT_EQ(normalize_formula("T = C_T \\cdot \\rho \\cdot n^{2}"), normalize_formula("t=ct*rho*n^2"));
}

TEST(ScoreFact, Aliases) {
  const auto& q = item("L1-kv-meaning");
  EXPECT_EQ(score(q, "RPM per volt").verdict, Verdict::Pass);
  EXPECT_EQ(score(q, "rpm/V").verdict, Verdict::Pass);
  EXPECT_EQ(score(q, "torque per amp").verdict, Verdict::Fail);
}

TEST(ScoreStructured, PropellerFields) {
  const auto& q = item("L2-prop-parameters");
  const auto all = score(q, fenced({{"fields", {{"diameter", {{"value", 18}, {"unit", "in"}}},
                                                {"pitch", {{"value", 6}, {"unit", "in"}}},
                                                {"type", "fixed-pitch"}}}}));
  EXPECT_EQ(all.verdict, Verdict::Pass);
  EXPECT_EQ(all.value, 1.0);
  const auto two = score(q, fenced({{"fields", {{"diameter", {{"value", 18}, {"unit", "in"}}},
                                                {"pitch", {{"value", 7}, {"unit", "in"}}},
                                                {"type", "fixed"}}}}));
  EXPECT_EQ(two.verdict, Verdict::Partial);
  EXPECT_NEAR(two.value, 2.0 / 3.0, 1e-12);
  const auto none = score(q, fenced({{"fields", {{"diameter", 3}}}}));
  EXPECT_EQ(none.verdict, Verdict::Fail);
}

TEST(ScoreStructured, ProsePathAndMissingFields) {
  const auto& q = item("L2-prop-parameters");
  const auto s = score(q, "The propeller diameter is 18 inches and the pitch is 6 inches; it is fixed pitch.");
  EXPECT_EQ(s.verdict, Verdict::Pass);
  const auto half = score(q, "The diameter is 18 inches.");
  EXPECT_EQ(half.verdict, Verdict::Partial);
  EXPECT_NEAR(half.value, 1.0 / 3.0, 1e-12);
}

TEST(ScoreDiagnosis, Examples) {
  const auto& q = item("L4-thrust-diagnosis");
  EXPECT_EQ(score(q, "The props cannot lift 12 kg at 7500 RPM.").verdict, Verdict::Pass);
  EXPECT_EQ(score(q, "Battery voltage too low.").verdict, Verdict::Fail);
  EXPECT_EQ(score(q, fenced({{"cause", "insufficient-rpm-thrust"}})).verdict, Verdict::Pass);
  EXPECT_EQ(score(q, "The paint is blue.").verdict, Verdict::Unscorable);
}

TEST(ScoreDiagnosis, AnyAcceptedCauseIsFullCredit) {
  const auto& q = item("L4-overcurrent-diagnosis");
  for (const auto& c : std::get<DiagnosisSpec>(q.answer_spec).accepted_causes) {
    const auto s = score(q, fenced({{"cause", c}}));
    EXPECT_EQ(s.verdict, Verdict::Pass) << c;
    EXPECT_EQ(s.value, 1.0);
  }
}

TEST(ScoreFix, ThrustFixPatchesFlip) {
  const auto& q = item("L4-thrust-fix");
  const auto& spec = std::get<FixSpec>(q.answer_spec);
  for (const json& patch : {json{{"prop_diameter_in", 19}}, json{{"prop_pitch_in", 7}}}) {
    SCOPED_TRACE(patch.dump());
    const auto s = score(q, patch_answer(patch));
    EXPECT_EQ(s.verdict, Verdict::Pass);
    // re-run the oracle independently: the failing requirement now holds
    const auto patched = apply_patch(spec.base_design, codec::patch_from_json(Node(patch, "")), spec.propellers,
                                     is_patchable_field);
    const auto r = oracle::evaluate_design(patched, spec.environment, spec.requirements);
    EXPECT_TRUE(r.check(spec.failing_requirement)->passed);
    const auto* ev = find_evidence(s, "thrust");
    ASSERT_NE(ev, nullptr);
    EXPECT_NE(ev->measured.find("->"), std::string::npos);
  }
}

TEST(ScoreFix, PitchUsesDeclaredCoefficient) {
  const auto& spec = std::get<FixSpec>(item("L4-thrust-fix").answer_spec);
  const auto patched = apply_patch(spec.base_design, {{"prop_pitch_in", 7}}, spec.propellers, is_patchable_field);
  EXPECT_DOUBLE_EQ(patched.thrust_coefficient, spec.propellers.find("18x7")->ct);
  const auto r = oracle::evaluate_design(patched, spec.environment, {});
  EXPECT_NEAR(r.static_thrust_per_motor,
              static_cast<double>(ref::thrust(spec.propellers.find("18x7")->ct, 1.225L, 7500, 18 * ref::kInch)), 1e-9);
}

TEST(ScoreFix, IdentityPatchFails) {
  const auto& q = item("L4-thrust-fix");
  EXPECT_EQ(score(q, patch_answer({{"prop_diameter_in", 18}})).verdict, Verdict::Fail);
  EXPECT_EQ(score(q, patch_answer(json::object())).verdict, Verdict::Unscorable);
}

TEST(ScoreFix, UnknownFieldUnscorableWithName) {
  const auto& q = item("L4-thrust-fix");
  const auto s = score(q, patch_answer({{"wing_area_m2", 2}}));
  EXPECT_EQ(s.verdict, Verdict::Unscorable);
  bool named = false;
  for (const auto& e : s.evidence) named = named || e.measured.find("wing_area_m2") != std::string::npos;
  EXPECT_TRUE(named);
}

TEST(ScoreFix, RegressionFails) {
  // a far bigger prop fixes thrust but the current check must not regress;
  // dropping to 2 motors doubles per-motor current past 25 A
  const auto& q = item("L4-thrust-fix");
  const auto s = score(q, patch_answer({{"prop_diameter_in", 19}, {"n_motors", 2}}));
  EXPECT_EQ(s.verdict, Verdict::Fail);
  EXPECT_EQ(find_evidence(s, "current")->outcome, "fail");
}

// Lowering Kv is an accepted textual fix for overcurrent, but hover current in
// this oracle is momentum power over bus voltage and carries no Kv term, so
// the current check cannot flip; a larger prop does flip it.
TEST(ScoreFix, OvercurrentLowerKvCannotFlipCurrent) {
  const auto& q = item("L4-overcurrent-fix");
  const auto kv = score(q, patch_answer({{"kv_rpm_per_v", 340}}));
  EXPECT_EQ(kv.verdict, Verdict::Fail);
  const auto* cur = find_evidence(kv, "current");
  ASSERT_NE(cur, nullptr);
  EXPECT_EQ(cur->outcome, "fail");
  const auto prop = score(q, patch_answer({{"prop_diameter_in", 20}}));
  EXPECT_EQ(prop.verdict, Verdict::Pass);
}

TEST(ScoreDesign, FourteenKgRecommendationPasses) {
  const auto& q = item("L5-quad-14kg");
  const auto s = score(q, design_answer({{"kv_rpm_per_v", 340}, {"prop_diameter_in", 20}, {"prop_pitch_in", 6},
                                         {"battery_cells", 6}, {"battery_capacity_ah", 12}}));
  EXPECT_EQ(s.verdict, Verdict::Pass);
  EXPECT_EQ(s.value, 1.0);
  EXPECT_NE(find_evidence(s, "pareto"), nullptr);
}

TEST(ScoreDesign, SmallPropHighKvIsPartial) {
  const auto& q = item("L5-quad-14kg");
  const auto& spec = std::get<DesignSynthesisSpec>(q.answer_spec);
  const json answer = {{"kv_rpm_per_v", 420}, {"prop_diameter_in", 16}, {"battery_cells", 6}};
  // check infeasibility with the oracle first
  const auto d = apply_patch(spec.base_design, codec::patch_from_json(Node(answer, "")), spec.propellers,
                             is_design_answer_field);
  const auto r = oracle::evaluate_design(d, spec.environment, spec.requirements);
  EXPECT_FALSE(r.check("thrust")->passed);
  const auto s = score(q, design_answer(answer));
  EXPECT_EQ(s.verdict, Verdict::Partial);
  EXPECT_LE(s.value, 0.7);
  EXPECT_GT(s.value, 0.0);
  EXPECT_TRUE(consistent(s));
}

TEST(ScoreDesign, EmptyRequirementsPassTrivially) {
  auto spec = std::get<DesignSynthesisSpec>(item("L5-quad-14kg").answer_spec);
  spec.requirements.clear();
  const auto s = score_answer(extract(design_answer({{"kv_rpm_per_v", 420}, {"prop_diameter_in", 16}}), spec), spec);
  EXPECT_EQ(s.verdict, Verdict::Pass);
}

TEST(ScoreDesign, InvalidDesignUnscorable) {
  const auto& q = item("L5-quad-14kg");
  EXPECT_EQ(score(q, design_answer({{"kv_rpm_per_v", -340}, {"prop_diameter_in", 20}})).verdict, Verdict::Unscorable);
  EXPECT_EQ(score(q, design_answer({{"mtow_kg", 3}})).verdict, Verdict::Unscorable);  // not a design choice
}

TEST(ScoreDesign, ParetoTermBounds) {
  using design_space::ObjectiveVector;
  const std::vector<ObjectiveVector> grid = {{10, 5, 12}, {14, 2, 8}};
  // dominated answer at the grid's worst corner
  const auto worst = pareto_term({14, 2, 8}, grid, {true, true});
  EXPECT_TRUE(worst.dominated);
  EXPECT_NEAR(worst.value, 0.0, 1e-12);
  const auto best = pareto_term({10, 5, 12}, grid, {true, true});
  EXPECT_FALSE(best.dominated);
  EXPECT_EQ(best.value, 1.0);
  const auto mid = pareto_term({12, 3.5, 10}, grid, {true, true});
  EXPECT_NEAR(mid.value, 0.5, 1e-12);
  EXPECT_EQ(pareto_term({14, 2, 8}, grid, {false, false}).value, 1.0);  // empty reference set
}

// Adding a requirement the answer meets never lowers its value; adding one
// it violates never raises it.
TEST(ScoreDesignProperty, Monotonicity) {
  auto base = std::get<DesignSynthesisSpec>(item("L5-quad-14kg").answer_spec);
  std::mt19937_64 rng(11);
  const double kvs[] = {320, 340, 360, 380, 400, 420};
  const double dias[] = {16, 18, 20, 21};
  for (int trial = 0; trial < 40; ++trial) {
    auto spec = base;
    const std::size_t keep = rng() % (spec.requirements.size() + 1);
    spec.requirements.resize(keep);
    const json answer = {{"kv_rpm_per_v", kvs[rng() % 6]}, {"prop_diameter_in", dias[rng() % 4]}};
    const auto text = design_answer(answer);
    const auto before = score_answer(extract(text, spec), spec);
    ASSERT_TRUE(consistent(before));
    const auto d = apply_patch(spec.base_design, codec::patch_from_json(Node(answer, "")), spec.propellers,
                               is_design_answer_field);
    const auto r = oracle::evaluate_design(d, spec.environment, {});
    auto met = spec, violated = spec;
    met.requirements.push_back({"extra", oracle::RequirementKind::MaxCurrentPerMotor, r.hover_current_per_motor + 1});
    violated.requirements.push_back({"extra", oracle::RequirementKind::MaxCurrentPerMotor, r.hover_current_per_motor / 2});
    const auto up = score_answer(extract(text, met), met);
    const auto down = score_answer(extract(text, violated), violated);
    EXPECT_GE(up.value, before.value - 1e-12) << answer.dump() << " keep=" << keep;
    EXPECT_LE(down.value, before.value + 1e-12) << answer.dump() << " keep=" << keep;
    EXPECT_TRUE(consistent(up));
    EXPECT_TRUE(consistent(down));
  }
}

TEST(ScoreRubric, ReferenceAnswerCoversEverything) {
  for (const char* id : {"L6-high-altitude", "L6-battery-transfer", "L6-low-fidelity"}) {
    const auto& q = item(id);
    const auto& spec = std::get<RubricSpec>(q.answer_spec);
    const auto s = score(q, spec.reference_answer);
    EXPECT_EQ(s.verdict, Verdict::Pass) << id;
    const auto* cov = find_evidence(s, "coverage (heuristic)");
    ASSERT_NE(cov, nullptr);
    EXPECT_EQ(cov->measured, "1") << id;
  }
}

TEST(ScoreRubric, AirDensityOnlyIsQuarterCoverage) {
  const auto& q = item("L6-high-altitude");
  ASSERT_EQ(std::get<RubricSpec>(q.answer_spec).checklist.size(), 4u);
  const auto s = score(q, "The thin air density at altitude was ignored.");
  EXPECT_EQ(s.verdict, Verdict::Fail);
  EXPECT_EQ(s.value, 0.0);
  EXPECT_EQ(find_evidence(s, "coverage (heuristic)")->measured, "0.25");
}

TEST(ScoreRubric, EmptyAnswerUnscorable) {
  EXPECT_EQ(score(item("L6-high-altitude"), "").verdict, Verdict::Unscorable);
}

TEST(ScoreRubric, JudgeSeamReplacesHeuristic) {
  ScoringOptions opts;
  int calls = 0;
  opts.rubric_judge = [&](const std::string&, const RubricSpec&) {
    ++calls;
    return Score{0.5, Verdict::Partial, {{"judge", "info", "0.5", ""}}};
  };
  const auto s = score(item("L6-high-altitude"), "anything", opts);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(s.verdict, Verdict::Partial);
  // objective items ignore the judge
  score(item("L3-no-load-rpm/1"), "8436 RPM", opts);
  EXPECT_EQ(calls, 1);
}

// Every shipped item: its reference answer passes and every score, for a
// handful of junk answers too, satisfies the invariant.
TEST(ScoreProperty, ReferenceAnswersPassAndScoresStayConsistent) {
  const char* junk[] = {"", "no idea", "42", "```eagi\n{}\n```", "```eagi\n[1,2]\n```", "330 Kv, 17x5 on 4S", "-1 N"};
  for (const auto& q : shipped().instances) {
    SCOPED_TRACE(q.id);
    const auto s = score(q, reference_answer(q.answer_spec));
    EXPECT_EQ(s.verdict, Verdict::Pass);
    EXPECT_TRUE(consistent(s));
    for (const char* j : junk) {
      const auto t = score(q, j);
      EXPECT_TRUE(consistent(t)) << j;
      EXPECT_GE(t.value, 0.0);
      EXPECT_LE(t.value, 1.0);
    }
    EXPECT_EQ(score(q, reference_answer(q.answer_spec)), s) << "scoring is not deterministic";
  }
}
