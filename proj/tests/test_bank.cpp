#include <gtest/gtest.h>

#include <map>
#include <regex>

#include "eagi/question_bank.hpp"
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

// Minimal bank with one template; `tpl` is spliced in verbatim.
std::string one_template_bank(const std::string& tpl) {
  return "{\n"
         "  \"schema_version\": 1,\n"
         "  \"contexts\": [{\"id\": \"c\", \"design\": {\"kv_rpm_per_v\": 380, \"current_limit_a\": 25,\n"
         "     \"battery_cells\": 6, \"battery_capacity_ah\": 10, \"prop_diameter_in\": 18, \"prop_pitch_in\": 6,\n"
         "     \"n_motors\": 4, \"mtow_kg\": 12, \"thrust_coefficient\": 0.0316}}],\n"
         "  \"templates\": [\n" +
         tpl +
         "\n  ]\n"
         "}\n";
}

int line_of(const std::string& text, const std::string& needle) {
  const auto pos = text.find(needle);
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

}  // namespace

TEST(Bank, ShippedBankCoversAllLevels) {
  const auto& bank = shipped();
  EXPECT_GE(bank.templates.size(), 22u);
  std::map<CognitionLevel, int> per_level;
  for (const auto& t : bank.templates) ++per_level[t.level];
  for (auto lvl : kAllLevels) EXPECT_GE(per_level[lvl], 3) << to_string(lvl);
  EXPECT_GE(bank.instances.size(), bank.templates.size());
  for (const auto& q : bank.instances) {
    EXPECT_FALSE(q.tags.domains.empty()) << q.id;
    EXPECT_TRUE(bank_detail::placeholders(q.prompt).empty()) << q.id;
    static const std::regex unbound(R"(\{[A-Za-z_][A-Za-z0-9_]*\})");
    const std::string spec = to_json(q.answer_spec).dump();
    EXPECT_FALSE(std::regex_search(spec, unbound)) << q.id << ": " << spec;
  }
}

TEST(Bank, UnknownSystemTypeNamesFieldAndLine) {
  const std::string text = one_template_bank(
      "    {\"id\": \"x\", \"level\": \"Remember\",\n"
      "     \"tags\": {\"system_type\": \"Submarine\", \"design_scope\": \"Component\", \"domains\": [\"Thermal\"]},\n"
      "     \"pattern\": \"p\", \"answer\": {\"kind\": \"fact\", \"canonical\": \"a\"}}");
  try {
    load_bank(text);
    FAIL() << "Submarine accepted";
  } catch (const BankError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("system_type"), std::string::npos) << msg;
    EXPECT_NE(msg.find("Submarine"), std::string::npos) << msg;
    EXPECT_EQ(e.line(), line_of(text, "Submarine"));
  }
}

TEST(Bank, EmptyTemplateListIsValid) {
  const auto bank = load_bank(one_template_bank(""));
  EXPECT_TRUE(bank.templates.empty());
  EXPECT_TRUE(bank.instances.empty());
}

TEST(Bank, RejectsBadDocuments) {
  const std::string fact = "\"answer\": {\"kind\": \"fact\", \"canonical\": \"a\"}";
  const std::string tags = "\"tags\": {\"system_type\": \"eVTOL\", \"design_scope\": \"Component\", \"domains\": [\"Thermal\"]}";
  // unbound placeholder
  EXPECT_THROW(load_bank(one_template_bank("{\"id\": \"x\", \"level\": 1, " + tags + ", \"pattern\": \"at {rpm} RPM\", " + fact + "}")),
               BankError);
  // duplicate id
  const std::string t = "{\"id\": \"x\", \"level\": 1, " + tags + ", \"pattern\": \"p\", " + fact + "}";
  EXPECT_THROW(load_bank(one_template_bank(t + ",\n" + t)), BankError);
  // empty domains
  EXPECT_THROW(load_bank(one_template_bank("{\"id\": \"x\", \"level\": 1, \"tags\": {\"system_type\": \"eVTOL\", "
                                           "\"design_scope\": \"Component\", \"domains\": []}, \"pattern\": \"p\", " +
                                           fact + "}")),
               BankError);
  // unknown context
  EXPECT_THROW(load_bank(one_template_bank("{\"id\": \"x\", \"level\": 1, \"context\": \"nope\", " + tags +
                                           ", \"pattern\": \"p\", " + fact + "}")),
               BankError);
  // schema version mandatory
  EXPECT_THROW(load_bank("{\"templates\": []}"), BankError);
  EXPECT_THROW(load_bank("{\"schema_version\": 9, \"templates\": []}"), BankError);
  // oracle domain error surfaces with placeholder name
  try {
    load_bank(one_template_bank("{\"id\": \"x\", \"level\": 3, " + tags +
                                ", \"pattern\": \"kv {k}\", \"bindings\": [{\"k\": -5}], \"answer\": {\"kind\": \"numeric\", "
                                "\"unit\": \"RPM\", \"value\": {\"op\": \"no_load_rpm\", \"args\": {\"kv\": \"{k}\", "
                                "\"voltage_v\": 22.2}}}}"));
    FAIL() << "negative kv accepted";
  } catch (const BankError& e) {
    EXPECT_NE(std::string(e.what()).find("kv"), std::string::npos) << e.what();
  }
}

TEST(Bank, ZeroPlaceholderPromptIsPattern) {
  const auto& t = shipped().templates.front();
  ASSERT_TRUE(bank_detail::placeholders(t.pattern).empty());
  EXPECT_EQ(item(t.id).prompt, t.pattern);
}

TEST(Bank, NoLoadRpmInstance) {
  const auto& q = item("L3-no-load-rpm/1");
  const auto& spec = std::get<NumericSpec>(q.answer_spec);
  EXPECT_NEAR(spec.value, 8436, 1e-9);
  EXPECT_EQ(spec.unit, "RPM");
  EXPECT_NE(q.prompt.find("380"), std::string::npos);
  EXPECT_NE(q.prompt.find("22.2"), std::string::npos);
  EXPECT_EQ(q.provenance.template_id, "L3-no-load-rpm");
  EXPECT_EQ(q.provenance.bindings.at("motor_kv"), 380);
}

TEST(Bank, DiameterScalingInstance) {
  const auto& spec = std::get<NumericSpec>(item("L3-diameter-scaling").answer_spec);
  EXPECT_NEAR(spec.value, 1.52, 0.005);
  EXPECT_EQ(spec.unit, "ratio");
  EXPECT_DOUBLE_EQ(spec.rel_tol, 0.02);
}

TEST(Bank, InstantiateWithFreshBindings) {
  const auto& bank = shipped();
  const auto& t = *std::find_if(bank.templates.begin(), bank.templates.end(),
                                [](const auto& t) { return t.id == "L3-no-load-rpm"; });
  const auto inst = instantiate(bank, t, {{"motor_kv", 420}}, "probe");
  EXPECT_NEAR(std::get<NumericSpec>(inst.answer_spec).value, static_cast<double>(ref::rpm_no_load(420, 22.2L)), 1e-9);
  EXPECT_THROW(instantiate(bank, t, {}, "unbound"), SchemaError);
}

// Every numeric ground truth in the shipped bank, re-derived independently.
TEST(BankProperty, GroundTruthMatchesIndependentOracle) {
  const long double d18 = 18 * ref::kInch;
  const long double ct = ref::ct_from(26.4L, 1.225L, 7500, d18);
  std::map<std::string, long double> numeric = {
      {"L1-pack-voltage/1", 6 * 3.7L},
      {"L1-pack-voltage/2", 4 * 3.7L},
      {"L3-diameter-scaling", std::pow(20.0L / 18.0L, 4.0L)},
      {"L3-hover-current", ref::hover(12, 4, d18, 1.225L, 22.2L, 10).current_a},
      {"L3-no-load-rpm/1", ref::rpm_no_load(380, 22.2L)},
      {"L3-no-load-rpm/2", ref::rpm_no_load(400, 22.2L)},
      {"L3-required-thrust/1", ref::per_motor_weight(12, 4)},
      {"L3-required-thrust/2", ref::per_motor_weight(14, 4)},
      {"L3-required-thrust/3", ref::per_motor_weight(11, 8)},
      {"L3-thrust-at-rpm", ref::thrust(ct, 1.225L, 8436, d18)},
  };
  std::map<std::string, std::map<std::string, long double>> fields = {
      {"L2-prop-parameters", {{"diameter", 18}, {"pitch", 6}}},
      {"L2-torque-parameters", {{"torque_constant", ref::kt(380)}, {"current_limit", 25}, {"max_torque", 25 * ref::kt(380)}}},
      {"L2-voltage-range", {{"min_voltage", 6 * 3.3L}, {"max_voltage", 6 * 4.2L}, {"nominal_voltage", 6 * 3.7L}}},
      {"L3-kv-torque", {{"kt_before", ref::kt(380)}, {"kt_after", ref::kt(420)}, {"torque_drop", 1 - ref::kt(420) / ref::kt(380)}}},
      {"L4-thrust-shortfall", {{"required_thrust", ref::per_motor_weight(12, 4)}, {"available_thrust", 26.4L}}},
  };
  std::size_t checked = 0;
  for (const auto& q : shipped().instances) {
    SCOPED_TRACE(q.id);
    if (const auto* n = std::get_if<NumericSpec>(&q.answer_spec)) {
      ASSERT_TRUE(numeric.contains(q.id)) << "numeric item without an independent derivation";
      const double want = static_cast<double>(numeric.at(q.id));
      EXPECT_LE(std::abs(n->value - want), 1e-9 * std::abs(want));
      EXPECT_GT(n->rel_tol, 0.0);
      EXPECT_LE(n->rel_tol, 0.1);
      ++checked;
    } else if (const auto* s = std::get_if<StructuredSpec>(&q.answer_spec)) {
      ASSERT_TRUE(fields.contains(q.id));
      for (const auto& f : s->fields) {
        if (!f.numeric()) continue;
        ASSERT_TRUE(fields.at(q.id).contains(f.name)) << f.name;
        const double want = static_cast<double>(fields.at(q.id).at(f.name));
        EXPECT_LE(std::abs(std::get<double>(f.expected) - want), 1e-9 * std::abs(want)) << f.name;
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, numeric.size() + 13);
}

// Requirement bounds derived from MTOW also agree with the independent oracle.
TEST(BankProperty, RequirementBoundsMatchIndependentOracle) {
  const std::map<std::string, long double> thrust_bound = {
      {"L4-thrust-fix", ref::per_motor_weight(12, 4)},
      {"L4-overcurrent-fix", ref::per_motor_weight(12, 4)},
      {"L4-climb-fix", 1.1L * ref::per_motor_weight(12, 4)},
      {"L5-quad-14kg", ref::per_motor_weight(14, 4)},
      {"L5-coax-11kg", ref::per_motor_weight(11, 8)},
      {"L5-highalt-9kg", ref::per_motor_weight(9, 4)},
  };
  for (const auto& [id, want] : thrust_bound) {
    SCOPED_TRACE(id);
    const auto& spec = item(id).answer_spec;
    const auto& reqs = std::holds_alternative<FixSpec>(spec) ? std::get<FixSpec>(spec).requirements
                                                             : std::get<DesignSynthesisSpec>(spec).requirements;
    const auto it = std::find_if(reqs.begin(), reqs.end(),
                                 [](const auto& r) { return r.kind == oracle::RequirementKind::MinThrustPerMotor; });
    ASSERT_NE(it, reqs.end());
    EXPECT_NEAR(it->bound, static_cast<double>(want), 1e-9);
  }
}

TEST(BankProperty, FixItemsStartFailing) {
  for (const auto& q : shipped().instances) {
    const auto* f = std::get_if<FixSpec>(&q.answer_spec);
    if (!f) continue;
    SCOPED_TRACE(q.id);
    const auto r = oracle::evaluate_design(f->base_design, f->environment, f->requirements);
    ASSERT_NE(r.check(f->failing_requirement), nullptr);
    EXPECT_FALSE(r.check(f->failing_requirement)->passed);
  }
}
