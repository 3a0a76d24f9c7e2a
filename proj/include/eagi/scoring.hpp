#pragma once

// Scorers, one per answer kind, plus the dispatcher used by the harness.
// Every score satisfies: value in [0, 1]; Pass => value == 1; Fail and
// Unscorable => value == 0; Partial => 0 < value < 1. Graded credit that a
// threshold turns into Pass or Fail (rubric coverage, design Pareto term) is
// kept in the evidence.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "eagi/answer_spec.hpp"
#include "eagi/codec.hpp"
#include "eagi/design_space.hpp"
#include "eagi/errors.hpp"
#include "eagi/extract.hpp"
#include "eagi/json_util.hpp"
#include "eagi/oracle.hpp"
#include "eagi/question_bank.hpp"
#include "eagi/units.hpp"

namespace eagi {

enum class Verdict { Pass, Partial, Fail, Unscorable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Partial: return "partial";
    case Verdict::Fail: return "fail";
    case Verdict::Unscorable: return "unscorable";
  }
  return "?";
}

inline std::optional<Verdict> parse_verdict(std::string_view s) {
  for (auto v : {Verdict::Pass, Verdict::Partial, Verdict::Fail, Verdict::Unscorable})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

struct Evidence {
  std::string check;
  std::string outcome;  // "pass", "fail" or "info"
  std::string measured;
  std::string expected;

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct Score {
  double value = 0;
  Verdict verdict = Verdict::Unscorable;
  std::vector<Evidence> evidence;

  friend bool operator==(const Score&, const Score&) = default;
};

inline bool consistent(const Score& s) {
  if (!(s.value >= 0.0 && s.value <= 1.0)) return false;
  if (s.verdict != Verdict::Unscorable && s.evidence.empty()) return false;
  switch (s.verdict) {
    case Verdict::Pass: return s.value == 1.0;
    case Verdict::Fail:
    case Verdict::Unscorable: return s.value == 0.0;
    case Verdict::Partial: return s.value > 0.0 && s.value < 1.0;
  }
  return false;
}

namespace scoring_detail {

inline Score from_fraction(double f, std::vector<Evidence> ev) {
  f = std::clamp(f, 0.0, 1.0);
  const Verdict v = f >= 1.0 ? Verdict::Pass : f <= 0.0 ? Verdict::Fail : Verdict::Partial;
  return {f, v, std::move(ev)};
}

inline Score pass(std::vector<Evidence> ev) { return {1.0, Verdict::Pass, std::move(ev)}; }
inline Score fail(std::vector<Evidence> ev) { return {0.0, Verdict::Fail, std::move(ev)}; }

inline Score unscorable(std::string check, std::string why) {
  return {0.0, Verdict::Unscorable, {{std::move(check), "fail", std::move(why), ""}}};
}

inline std::string with_unit(double v, std::string_view unit) {
  std::string s = format_sig(v, 6);
  if (!unit.empty()) {
    s.push_back(' ');
    s.append(unit);
  }
  return s;
}

inline void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size()))
    s.replace(at, from.size(), to);
}

}  // namespace scoring_detail

// Formula-aware text normalization: symbol synonyms, case and whitespace
// folding. Applied to both the answer and the accepted forms.
inline std::string normalize_formula(std::string_view text) {
  using scoring_detail::replace_all;
  std::string s(text);
  static const std::pair<std::string_view, std::string_view> kSynonyms[] = {
      {"\xcf\x81", "rho"},         // U+03C1
      {"\\rho", "rho"},
      {"\xc2\xb7", "*"},           // U+00B7 middle dot
      {"\xe2\x8b\x85", "*"},       // U+22C5 dot operator
      {"\xc3\x97", "*"},           // U+00D7
      {"\\cdot", "*"},
      {"\\times", "*"},
      {"\xc2\xb2", "^2"},          // U+00B2
      {"\xc2\xb3", "^3"},          // U+00B3
      {"\xe2\x81\xb4", "^4"},      // U+2074
      {"\xe2\x88\x92", "-"},       // U+2212
      {"**", "^"},
      {" x ", "*"},
  };
  for (const auto& [from, to] : kSynonyms) replace_all(s, from, to);
  std::string out;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '$' || c == '{' || c == '}') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  replace_all(out, "c_t", "ct");
  replace_all(out, "c_t", "ct");
  while (!out.empty() && (out.back() == '.' || out.back() == ',' || out.back() == ';')) out.pop_back();
  return out;
}

inline Score score_fact(const AgentAnswer& a, const FactSpec& spec) {
  using namespace scoring_detail;
  const auto* t = a.envelope ? std::get_if<TextPayload>(&*a.envelope) : nullptr;
  if (!t) return unscorable("extraction", a.path);
  const std::string answer = normalize_formula(t->text);
  std::vector<std::string> forms{spec.canonical};
  forms.insert(forms.end(), spec.accepted_aliases.begin(), spec.accepted_aliases.end());
  for (const auto& f : forms) {
    const std::string nf = normalize_formula(f);
    if (!nf.empty() && answer.find(nf) != std::string::npos) return pass({{"fact", "pass", f, spec.canonical}});
  }
  return fail({{"fact", "fail", t->text, spec.canonical}});
}

// Compares one measured quantity against an expected value in `unit`.
// Returns the evidence row; `ok` reports the outcome.
inline Evidence compare_quantity(const std::string& check, const NumericPayload& got, double expected,
                                 const std::string& unit, double rel_tol, bool& ok) {
  using scoring_detail::with_unit;
  ok = false;
  const auto to = units::lookup(unit);
  double value = got.value;
  if (got.unit && !got.unit->empty() && to) {
    const auto from = units::lookup(*got.unit);
    if (!from || !units::compatible(*from, *to))
      return {check + ":unit", "fail", with_unit(got.value, *got.unit), with_unit(expected, unit)};
    value = *units::convert(got.value, *from, *to);
  }
  ok = std::abs(value - expected) <= rel_tol * std::abs(expected);
  return {check, ok ? "pass" : "fail", with_unit(value, unit),
          with_unit(expected, unit) + " \xc2\xb1" + format_sig(rel_tol * 100, 3) + "%"};
}

inline Score score_numeric(const AgentAnswer& a, const NumericSpec& spec) {
  using namespace scoring_detail;
  const auto* q = a.envelope ? std::get_if<NumericPayload>(&*a.envelope) : nullptr;
  if (!q) return unscorable("extraction", a.path);
  bool ok = false;
  auto ev = compare_quantity("value", *q, spec.value, spec.unit, spec.rel_tol, ok);
  return ok ? pass({ev}) : fail({ev});
}

inline bool text_field_matches(const StructuredField& f, const std::string& got) {
  const std::string g = extract_detail::fold_text(got);
  std::vector<std::string> forms = f.accepted;
  forms.push_back(std::get<std::string>(f.expected));
  for (const auto& form : forms)
    if (extract_detail::fold_text(form) == g || normalize_formula(form) == normalize_formula(got)) return true;
  // A longer answer containing an accepted phrase ("fixed pitch propeller").
  for (const auto& form : forms)
    if (extract_detail::contains_phrase(g, form)) return true;
  return false;
}

inline Score score_structured(const AgentAnswer& a, const StructuredSpec& spec) {
  using namespace scoring_detail;
  const auto* fields = a.envelope ? std::get_if<FieldMap>(&*a.envelope) : nullptr;
  if (!fields) return unscorable("extraction", a.path);
  std::vector<Evidence> ev;
  std::size_t correct = 0;
  for (const auto& f : spec.fields) {
    auto it = fields->find(f.name);
    if (it == fields->end()) {
      ev.push_back({f.name, "fail", "missing", f.numeric() ? with_unit(std::get<double>(f.expected), f.unit)
                                                            : std::get<std::string>(f.expected)});
      continue;
    }
    bool ok = false;
    if (f.numeric()) {
      std::optional<NumericPayload> got;
      if (auto* n = std::get_if<NumericPayload>(&it->second.value)) got = *n;
      else if (auto qs = extract_detail::quantities(std::get<std::string>(it->second.value)); !qs.empty())
        got = NumericPayload{qs.front().value, qs.front().unit ? std::optional(qs.front().unit_text) : std::nullopt};
      if (!got) {
        ev.push_back({f.name, "fail", std::get<std::string>(it->second.value), with_unit(std::get<double>(f.expected), f.unit)});
        continue;
      }
      ev.push_back(compare_quantity(f.name, *got, std::get<double>(f.expected), f.unit, f.rel_tol, ok));
    } else {
      std::string got;
      if (auto* s = std::get_if<std::string>(&it->second.value)) got = *s;
      else got = format_number(std::get<NumericPayload>(it->second.value).value);
      ok = text_field_matches(f, got);
      ev.push_back({f.name, ok ? "pass" : "fail", got, std::get<std::string>(f.expected)});
    }
    if (ok) ++correct;
  }
  return from_fraction(spec.fields.empty() ? 0.0 : static_cast<double>(correct) / spec.fields.size(), std::move(ev));
}

inline Score score_diagnosis(const AgentAnswer& a, const DiagnosisSpec& spec) {
  using namespace scoring_detail;
  const auto* c = a.envelope ? std::get_if<CausePayload>(&*a.envelope) : nullptr;
  if (!c) return unscorable("extraction", a.path);
  std::string cause = c->cause;
  if (!spec.cause_keywords.contains(cause)) {
    // Free-text cause inside an envelope: map it onto the vocabulary.
    auto mapped = extract_detail::match_cause(cause, spec.cause_keywords);
    if (!mapped) return unscorable("cause", "'" + cause + "' names no known cause");
    cause = *mapped;
  }
  std::string accepted;
  for (const auto& s : spec.accepted_causes) accepted += (accepted.empty() ? "" : " | ") + s;
  const bool ok = std::find(spec.accepted_causes.begin(), spec.accepted_causes.end(), cause) != spec.accepted_causes.end();
  Evidence ev{"cause", ok ? "pass" : "fail", cause, accepted};
  return ok ? pass({ev}) : fail({ev});
}

// Applies a patch over `base`. Changing prop geometry re-resolves the thrust
// coefficient from the catalog. Throws SchemaError for unknown or malformed
// fields and DomainError for physically invalid results.
inline oracle::Design apply_patch(const oracle::Design& base, const Patch& patch, const PropellerCatalog& props,
                                  bool (*allowed)(const std::string&)) {
  for (const auto& [k, v] : patch)
    if (!allowed(k)) throw SchemaError("/" + pointer_escape(k), "field '" + k + "' cannot be changed by an answer");
  const json j = codec::patch_to_json(patch);
  oracle::Design d = base;
  codec::apply_design_fields(Node(j, ""), d);
  if (d.prop_diameter_m != base.prop_diameter_m || d.prop_pitch_m != base.prop_pitch_m) props.apply(d);
  oracle::validate(d);
  return d;
}

inline std::string describe_check(const oracle::RequirementCheck& c) {
  return c.measured ? scoring_detail::with_unit(*c.measured, oracle::bound_unit(c.kind)) : std::string("undeclared");
}

inline std::string describe_bound(const oracle::RequirementCheck& c) {
  const bool upper = c.kind == oracle::RequirementKind::MaxCurrentPerMotor || c.kind == oracle::RequirementKind::MaxMTOW ||
                     c.kind == oracle::RequirementKind::FootprintMax;
  const char* rel = c.kind == oracle::RequirementKind::VoltageClass ? "== " : upper ? "<= " : ">= ";
  return rel + scoring_detail::with_unit(c.bound, oracle::bound_unit(c.kind));
}

inline Score score_fix(const AgentAnswer& a, const FixSpec& spec) {
  using namespace scoring_detail;
  const auto* p = a.envelope ? std::get_if<PatchPayload>(&*a.envelope) : nullptr;
  if (!p) return unscorable("extraction", a.path);
  if (p->patch.empty()) return unscorable("patch", "empty patch");
  oracle::Design patched;
  try {
    patched = apply_patch(spec.base_design, p->patch, spec.propellers, is_patchable_field);
  } catch (const SchemaError& e) {
    return unscorable("patch", e.what());
  } catch (const DomainError& e) {
    return unscorable("patch", e.what());
  }
  const auto before = oracle::evaluate_design(spec.base_design, spec.environment, spec.requirements);
  const auto after = oracle::evaluate_design(patched, spec.environment, spec.requirements);
  std::vector<Evidence> ev;
  bool flipped = false, regressed = false;
  for (std::size_t i = 0; i < after.requirement_checks.size(); ++i) {
    const auto& b = before.requirement_checks[i];
    const auto& c = after.requirement_checks[i];
    std::string outcome;
    if (c.id == spec.failing_requirement) {
      flipped = !b.passed && c.passed;
      outcome = flipped ? "pass" : "fail";
    } else if (b.passed && !c.passed) {
      regressed = true;
      outcome = "fail";
    } else {
      outcome = c.passed ? "pass" : "info";
    }
    ev.push_back({c.id, outcome, describe_check(b) + " -> " + describe_check(c), describe_bound(c)});
  }
  return flipped && !regressed ? pass(std::move(ev)) : fail(std::move(ev));
}

// Pareto term of a design answer: 1 minus the additive epsilon by which the
// best reference design beats it, with each objective normalized by its
// range over the grid plus the answer. 1 when nothing in the reference set
// dominates the answer.
struct ParetoTerm {
  double value = 1.0;
  std::size_t reference_count = 0;
  bool dominated = false;
};

inline ParetoTerm pareto_term(const design_space::ObjectiveVector& answer,
                              const std::vector<design_space::ObjectiveVector>& grid,
                              const std::vector<bool>& in_reference) {
  ParetoTerm t;
  const auto a = answer.oriented();
  std::array<double, 3> lo = a, hi = a;
  for (const auto& g : grid) {
    const auto o = g.oriented();
    for (std::size_t i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], o[i]);
      hi[i] = std::max(hi[i], o[i]);
    }
  }
  double gap = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!in_reference[k]) continue;
    ++t.reference_count;
    if (design_space::dominates(grid[k], answer)) t.dominated = true;
    const auto f = grid[k].oriented();
    double lead = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 3; ++i) {
      const double range = hi[i] - lo[i];
      const double d = range > 0 ? std::max(0.0, f[i] - a[i]) / range : 0.0;
      lead = std::min(lead, d);
    }
    gap = std::max(gap, lead);
  }
  t.value = t.dominated ? 1.0 - std::clamp(gap, 0.0, 1.0) : 1.0;
  return t;
}

inline Score score_design(const AgentAnswer& a, const DesignSynthesisSpec& spec) {
  using namespace scoring_detail;
  const auto* p = a.envelope ? std::get_if<PatchPayload>(&*a.envelope) : nullptr;
  if (!p) return unscorable("extraction", a.path);
  oracle::Design design;
  try {
    design = apply_patch(spec.base_design, p->patch, spec.propellers, is_design_answer_field);
  } catch (const SchemaError& e) {
    return unscorable("design", e.what());
  } catch (const DomainError& e) {
    return unscorable("design", e.what());
  }
  const auto report = oracle::evaluate_design(design, spec.environment, spec.requirements);
  std::vector<Evidence> ev;
  std::size_t satisfied = 0;
  for (const auto& c : report.requirement_checks) {
    if (c.passed) ++satisfied;
    ev.push_back({c.id, c.passed ? "pass" : "fail", describe_check(c), describe_bound(c)});
  }
  const double frac = spec.requirements.empty() ? 1.0 : static_cast<double>(satisfied) / spec.requirements.size();

  const auto grid = design_space::enumerate(spec.grid, spec.base_design, spec.propellers);
  std::vector<design_space::ObjectiveVector> objs;
  std::vector<bool> in_reference;
  objs.reserve(grid.size());
  for (const auto& g : grid) {
    const auto r = oracle::evaluate_design(g, spec.environment, spec.requirements);
    objs.push_back(design_space::objectives(r));
    bool covers = true;  // g meets every requirement the answer meets
    for (std::size_t i = 0; i < r.requirement_checks.size(); ++i)
      if (report.requirement_checks[i].passed && !r.requirement_checks[i].passed) covers = false;
    in_reference.push_back(covers);
  }
  const auto term = pareto_term(design_space::objectives(report), objs, in_reference);
  ev.push_back({"pareto", term.dominated ? "info" : "pass", format_sig(term.value, 4),
                "non-dominated among " + std::to_string(term.reference_count) + " grid designs"});

  if (satisfied == spec.requirements.size()) return pass(std::move(ev));
  const double w = spec.constraint_weight;
  const double v = w * frac + (1.0 - w) * term.value;
  ev.push_back({"credit", "info", format_sig(v, 4), format_sig(w, 3) + " * constraints + " + format_sig(1 - w, 3) + " * pareto"});
  if (v <= 0.0) return fail(std::move(ev));
  return {std::min(v, std::nextafter(1.0, 0.0)), Verdict::Partial, std::move(ev)};
}

// Keyword-coverage heuristic for open-ended answers. A judge can be plugged
// in through RubricJudge; when absent, this is what scores.
inline Score score_rubric_heuristic(const AgentAnswer& a, const RubricSpec& spec) {
  using namespace scoring_detail;
  const auto* t = a.envelope ? std::get_if<TextPayload>(&*a.envelope) : nullptr;
  if (!t || extract_detail::blank(t->text)) return unscorable("extraction", a.path);
  const std::string folded = extract_detail::fold_text(t->text);
  std::vector<Evidence> ev;
  std::size_t covered = 0;
  for (const auto& c : spec.checklist) {
    std::string hit;
    for (const auto& phrase : c.any_of)
      if (extract_detail::contains_phrase(folded, phrase)) {
        hit = phrase;
        break;
      }
    if (!hit.empty()) ++covered;
    ev.push_back({c.key, hit.empty() ? "fail" : "pass", hit.empty() ? "absent" : hit, "mentioned"});
  }
  const double coverage = spec.checklist.empty() ? 0.0 : static_cast<double>(covered) / spec.checklist.size();
  const bool ok = coverage >= spec.pass_threshold;
  ev.push_back({"coverage (heuristic)", ok ? "pass" : "fail", format_sig(coverage, 4), ">= " + format_sig(spec.pass_threshold, 3)});
  return ok ? pass(std::move(ev)) : fail(std::move(ev));
}

// Optional external judge for rubric items. Must return a consistent Score.
using RubricJudge = std::function<Score(const std::string& answer_text, const RubricSpec& spec)>;

struct ScoringOptions {
  RubricJudge rubric_judge;
};

inline Score score_answer(const AgentAnswer& a, const AnswerSpec& spec, const ScoringOptions& opts = {}) {
  Score s = std::visit(
      [&](const auto& sp) -> Score {
        using T = std::decay_t<decltype(sp)>;
        if constexpr (std::is_same_v<T, FactSpec>) return score_fact(a, sp);
        else if constexpr (std::is_same_v<T, NumericSpec>) return score_numeric(a, sp);
        else if constexpr (std::is_same_v<T, StructuredSpec>) return score_structured(a, sp);
        else if constexpr (std::is_same_v<T, DiagnosisSpec>) return score_diagnosis(a, sp);
        else if constexpr (std::is_same_v<T, FixSpec>) return score_fix(a, sp);
        else if constexpr (std::is_same_v<T, DesignSynthesisSpec>) return score_design(a, sp);
        else {
          if (opts.rubric_judge) return opts.rubric_judge(a.raw_text, sp);
          return score_rubric_heuristic(a, sp);
        }
      },
      spec);
  s.evidence.insert(s.evidence.begin(), Evidence{"extraction", "info", a.path, ""});
  return s;
}

inline Score score(const QuestionInstance& inst, std::string_view answer_text, const ScoringOptions& opts = {}) {
  return score_answer(extract(answer_text, inst.answer_spec), inst.answer_spec, opts);
}

// An answer that the scorer must grade Pass: the ground truth in an
// envelope (rubric items use their reference prose).
inline std::string reference_answer(const AnswerSpec& spec) {
  auto fence = [](const json& j) { return "```eagi\n" + j.dump() + "\n```"; };
  return std::visit(
      [&](const auto& sp) -> std::string {
        using T = std::decay_t<decltype(sp)>;
        if constexpr (std::is_same_v<T, FactSpec>) return fence({{"answer", sp.canonical}});
        else if constexpr (std::is_same_v<T, NumericSpec>) return fence({{"value", sp.value}, {"unit", sp.unit}});
        else if constexpr (std::is_same_v<T, StructuredSpec>) {
          json fields = json::object();
          for (const auto& f : sp.fields) {
            if (f.numeric()) fields[f.name] = {{"value", std::get<double>(f.expected)}, {"unit", f.unit}};
            else fields[f.name] = std::get<std::string>(f.expected);
          }
          return fence({{"fields", fields}});
        } else if constexpr (std::is_same_v<T, DiagnosisSpec>) return fence({{"cause", sp.accepted_causes.front()}});
        else if constexpr (std::is_same_v<T, FixSpec>) return fence({{"patch", codec::patch_to_json(sp.reference_patch)}});
        else if constexpr (std::is_same_v<T, DesignSynthesisSpec>)
          return fence({{"design", codec::patch_to_json(sp.reference_design)}});
        else return sp.reference_answer;
      },
      spec);
}

}  // namespace eagi
