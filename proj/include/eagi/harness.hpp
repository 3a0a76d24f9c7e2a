#pragma once

// Runs an agent over a set of instances, scores every reply, aggregates per
// cognition level and assigns a competence level.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "eagi/agents.hpp"
#include "eagi/errors.hpp"
#include "eagi/json_util.hpp"
#include "eagi/question_bank.hpp"
#include "eagi/scoring.hpp"
#include "eagi/taxonomy.hpp"

namespace eagi {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr double kDefaultCompetenceThreshold = 0.7;

struct ItemResult {
  std::string id;
  CognitionLevel level = CognitionLevel::Remember;
  AnswerKind kind = AnswerKind::Fact;
  std::string template_id;
  std::string answer_text;
  Score score;
  std::optional<std::string> transport_error;

  friend bool operator==(const ItemResult&, const ItemResult&) = default;
};

struct LevelSummary {
  std::size_t items = 0;
  std::size_t pass = 0;
  std::size_t partial = 0;
  std::size_t fail = 0;
  std::size_t unscorable = 0;
  double mean_value = 0;

  double pass_rate() const { return items == 0 ? 0.0 : static_cast<double>(pass) / items; }

  friend bool operator==(const LevelSummary&, const LevelSummary&) = default;
};

struct EvaluationReport {
  int schema_version = kReportSchemaVersion;
  std::string run_id;     // set by the caller; excluded from determinism checks
  double elapsed_ms = 0;  // wall time of the agent phase; likewise excluded
  std::string agent;
  double threshold = kDefaultCompetenceThreshold;
  std::optional<CognitionLevel> competence_level;  // serialized as 0..6, 0 = none
  std::map<CognitionLevel, LevelSummary> levels;  // only levels with items
  std::vector<ItemResult> items;
  json run = json::object();  // free-form run parameters (mode, seed, filter)

  bool transport_exhausted() const {
    return std::any_of(items.begin(), items.end(), [](const ItemResult& r) { return r.transport_error.has_value(); });
  }

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

struct RunOptions {
  std::size_t max_in_flight = 4;
  bool fail_fast = false;
  double threshold = kDefaultCompetenceThreshold;
  ScoringOptions scoring;
};

inline std::map<CognitionLevel, LevelSummary> summarize(const std::vector<ItemResult>& items) {
  std::map<CognitionLevel, LevelSummary> out;
  std::map<CognitionLevel, double> sums;
  for (const auto& r : items) {
    auto& s = out[r.level];
    ++s.items;
    sums[r.level] += r.score.value;
    switch (r.score.verdict) {
      case Verdict::Pass: ++s.pass; break;
      case Verdict::Partial: ++s.partial; break;
      case Verdict::Fail: ++s.fail; break;
      case Verdict::Unscorable: ++s.unscorable; break;
    }
  }
  for (auto& [lvl, s] : out) s.mean_value = sums[lvl] / static_cast<double>(s.items);
  return out;
}

// The highest level L such that every populated level at or below L has a
// pass rate of at least `threshold`. Levels without items neither count nor
// block. None when the lowest populated level already falls short.
inline std::optional<CognitionLevel> assign_competence_level(const std::map<CognitionLevel, LevelSummary>& levels,
                                                             double threshold = kDefaultCompetenceThreshold) {
  std::optional<CognitionLevel> best;
  for (auto lvl : kAllLevels) {
    auto it = levels.find(lvl);
    if (it == levels.end() || it->second.items == 0) continue;
    if (it->second.pass_rate() < threshold) break;
    best = lvl;
  }
  return best;
}

// Agent calls run on up to `max_in_flight` worker threads; scoring then runs
// sequentially in input order, so the report does not depend on timing.
// A transport failure scores the item Unscorable; with fail_fast the run
// stops issuing calls and rethrows.
inline EvaluationReport run_evaluation(const std::vector<QuestionInstance>& instances, AgentAdapter& agent,
                                       const RunOptions& opts = {}) {
  const std::size_t n = instances.size();
  std::vector<std::string> replies(n);
  std::vector<std::optional<std::string>> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  const auto started = std::chrono::steady_clock::now();

  auto worker = [&] {
    for (;;) {
      if (abort.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      const auto& q = instances[i];
      try {
        replies[i] = agent.answer(q.prompt, {q.id, q.level, kind_of(q.answer_spec)});
      } catch (const TransportError& e) {
        errors[i] = e.what();
        if (opts.fail_fast) abort.store(true);
      } catch (const std::exception& e) {
        errors[i] = std::string("agent error: ") + e.what();
        if (opts.fail_fast) abort.store(true);
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(opts.max_in_flight, 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (opts.fail_fast)
    for (std::size_t i = 0; i < n; ++i)
      if (errors[i]) throw TransportError(instances[i].id + ": " + *errors[i]);

  EvaluationReport report;
  report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  report.agent = agent.name();
  report.threshold = opts.threshold;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& q = instances[i];
    ItemResult r{q.id, q.level, kind_of(q.answer_spec), q.provenance.template_id, replies[i], {}, errors[i]};
    if (errors[i]) r.score = {0.0, Verdict::Unscorable, {{"transport", "fail", *errors[i], ""}}};
    else r.score = score(q, replies[i], opts.scoring);
    report.items.push_back(std::move(r));
  }
  report.levels = summarize(report.items);
  report.competence_level = assign_competence_level(report.levels, opts.threshold);
  return report;
}

// ---------------------------------------------------------------------------
// Report documents
// ---------------------------------------------------------------------------

inline std::optional<AnswerKind> parse_answer_kind(std::string_view s) {
  for (auto k : {AnswerKind::Fact, AnswerKind::Numeric, AnswerKind::Structured, AnswerKind::Diagnosis, AnswerKind::Fix,
                 AnswerKind::DesignSynthesis, AnswerKind::Rubric})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

inline json to_json(const EvaluationReport& r) {
  json levels = json::array();
  for (const auto& [lvl, s] : r.levels)
    levels.push_back({{"level", std::string(to_string(lvl))},
                      {"items", s.items},
                      {"pass", s.pass},
                      {"partial", s.partial},
                      {"fail", s.fail},
                      {"unscorable", s.unscorable},
                      {"mean_value", s.mean_value},
                      {"pass_rate", s.pass_rate()}});
  json items = json::array();
  for (const auto& it : r.items) {
    json ev = json::array();
    for (const auto& e : it.score.evidence)
      ev.push_back({{"check", e.check}, {"outcome", e.outcome}, {"measured", e.measured}, {"expected", e.expected}});
    json j = {{"id", it.id},
              {"level", std::string(to_string(it.level))},
              {"kind", to_string(it.kind)},
              {"template_id", it.template_id},
              {"answer_text", it.answer_text},
              {"value", it.score.value},
              {"verdict", to_string(it.score.verdict)},
              {"evidence", ev}};
    if (it.transport_error) j["transport_error"] = *it.transport_error;
    items.push_back(std::move(j));
  }
  return {{"schema_version", r.schema_version},
          {"run_id", r.run_id},
          {"elapsed_ms", r.elapsed_ms},
          {"agent", r.agent},
          {"threshold", r.threshold},
          {"competence_level", r.competence_level ? ordinal(*r.competence_level) : 0},
          {"levels", levels},
          {"items", items},
          {"run", r.run}};
}

inline EvaluationReport report_from_json(const Node& n) {
  n.only({"schema_version", "run_id", "elapsed_ms", "agent", "threshold", "competence_level", "levels", "items", "run"});
  EvaluationReport r;
  r.schema_version = n.at("schema_version").integer();
  if (r.schema_version != kReportSchemaVersion) n.at("schema_version").fail("unsupported report schema version");
  r.run_id = n.at("run_id").str();
  r.elapsed_ms = n.at("elapsed_ms").num();
  r.agent = n.at("agent").str();
  r.threshold = n.at("threshold").num();
  const Node level = n.at("competence_level");
  const int stored = level.integer();
  if (stored < 0 || stored > 6) level.fail("competence level must lie in 0..6");
  for (const auto& item : n.at("items").items()) {
    item.only({"id", "level", "kind", "template_id", "answer_text", "value", "verdict", "evidence", "transport_error"});
    ItemResult it;
    it.id = item.at("id").str();
    it.level = codec::enum_from<CognitionLevel>(item.at("level"), "cognition level");
    auto kind = parse_answer_kind(item.at("kind").str());
    if (!kind) item.at("kind").fail("unknown answer kind");
    it.kind = *kind;
    it.template_id = item.at("template_id").str();
    it.answer_text = item.at("answer_text").str();
    it.score.value = item.at("value").num();
    auto verdict = parse_verdict(item.at("verdict").str());
    if (!verdict) item.at("verdict").fail("unknown verdict");
    it.score.verdict = *verdict;
    for (const auto& e : item.at("evidence").items())
      it.score.evidence.push_back({e.at("check").str(), e.at("outcome").str(), e.at("measured").str(), e.at("expected").str()});
    if (!consistent(it.score)) item.fail("value, verdict and evidence disagree");
    if (auto t = item.find("transport_error")) it.transport_error = t->str();
    r.items.push_back(std::move(it));
  }
  if (auto run = n.find("run")) r.run = run->raw();
  // Aggregates are derived, never trusted from the file.
  r.levels = summarize(r.items);
  r.competence_level = assign_competence_level(r.levels, r.threshold);
  if (stored != (r.competence_level ? ordinal(*r.competence_level) : 0))
    level.fail("competence level disagrees with the item verdicts");
  return r;
}

inline EvaluationReport load_report(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw BankError(LineIndex::line_at(text, e.byte > 0 ? e.byte - 1 : 0), std::string("malformed JSON: ") + e.what());
  }
  try {
    return report_from_json(Node(doc, ""));
  } catch (const SchemaError& e) {
    throw BankError(LineIndex(text).line_of(e.path()), e.what());
  }
}

namespace report_detail {

inline std::string cell(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out.push_back(c);
  }
  return out;
}

}  // namespace report_detail

inline std::string to_markdown(const EvaluationReport& r) {
  using report_detail::cell;
  std::ostringstream md;
  md << "# Evaluation report\n\n";
  if (!r.run_id.empty()) md << "- Run: " << r.run_id << "\n";
  md << "- Agent: " << r.agent << "\n";
  md << "- Items: " << r.items.size() << "\n";
  md << "- Competence threshold: " << format_sig(r.threshold, 3) << "\n";
  md << "- Competence level: "
     << (r.competence_level ? std::string(to_string(*r.competence_level)) + " (" +
                                  std::to_string(ordinal(*r.competence_level)) + ")"
                            : std::string("0 (none)"))
     << "\n\n";
  md << "| Level | Items | Pass | Partial | Fail | Unscorable | Mean value | Pass rate |\n";
  md << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& [lvl, s] : r.levels)
    md << "| " << ordinal(lvl) << " " << to_string(lvl) << " | " << s.items << " | " << s.pass << " | " << s.partial
       << " | " << s.fail << " | " << s.unscorable << " | " << format_sig(s.mean_value, 3) << " | "
       << format_sig(100 * s.pass_rate(), 3) << "% |\n";
  bool header = false;
  for (const auto& it : r.items) {
    if (it.score.verdict == Verdict::Pass) continue;
    if (!header) {
      md << "\n## Items not passed\n";
      header = true;
    }
    md << "\n### " << it.id << " (" << to_string(it.level) << ", " << to_string(it.kind) << ")\n\n";
    md << "Verdict: " << to_string(it.score.verdict) << ", value " << format_sig(it.score.value, 3) << "\n\n";
    md << "| Check | Outcome | Measured | Expected |\n|---|---|---|---|\n";
    for (const auto& e : it.score.evidence)
      md << "| " << cell(e.check) << " | " << e.outcome << " | " << cell(e.measured) << " | " << cell(e.expected) << " |\n";
  }
  return md.str();
}

}  // namespace eagi
