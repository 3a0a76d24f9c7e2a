// eagi: generate question sets, run agents over them, score and report.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 bank or document
// error, 3 agent transport retries exhausted.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "eagi/eagi.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBank = 2;
constexpr int kExitTransport = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

struct Selection {
  std::string bank;
  std::string filter;
  std::string mode = "stratified";
  std::string n = "all";
  std::uint64_t seed = 0;
};

void add_selection(CLI::App* cmd, Selection& s) {
  cmd->add_option("--bank", s.bank, "question bank JSON")->required();
  cmd->add_option("--filter", s.filter, "tag filter, e.g. 'domains=Aerodynamics;level=1-4'");
  cmd->add_option("--mode", s.mode, "targeted | stratified | curriculum");
  cmd->add_option("--n", s.n, "number of items, or 'all'");
  cmd->add_option("--seed", s.seed, "sampling seed");
}

std::vector<eagi::QuestionInstance> select(const Selection& s, const eagi::QuestionBank& bank) {
  const auto mode = eagi::parse_sample_mode(s.mode);
  if (!mode) throw UsageError("unknown mode '" + s.mode + "'");
  eagi::TagFilter filter;
  try {
    filter = eagi::codec::parse_filter(s.filter);
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad --filter: ") + e.what());
  }
  std::size_t n = 0;
  if (s.n == "all") {
    for (const auto& q : bank.instances)
      if (eagi::matches(q.tags, q.level, filter)) ++n;
  } else {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s.n, &used);
      if (used != s.n.size() || v < 0) throw std::invalid_argument("n");
      n = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw UsageError("--n must be a non-negative integer or 'all'");
    }
  }
  try {
    return eagi::sample(bank, filter, n, *mode, s.seed);
  } catch (const eagi::SampleSizeError& e) {
    throw UsageError(e.what());
  }
}

eagi::json selection_snapshot(const Selection& s) {
  return {{"bank", s.bank}, {"filter", s.filter}, {"mode", s.mode}, {"n", s.n}, {"seed", s.seed}};
}

std::string make_run_id() {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return "run-" + std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(now).count());
}

std::string render(const eagi::EvaluationReport& r, const std::string& format) {
  if (format == "markdown" || format == "md") return eagi::to_markdown(r);
  if (format == "json") return eagi::to_json(r).dump(2) + "\n";
  throw UsageError("unknown --format '" + format + "'");
}

std::unique_ptr<eagi::AgentAdapter> make_agent(const std::string& spec, const std::vector<eagi::QuestionInstance>& items,
                                               int timeout_s, int attempts) {
  if (spec == "oracle") return std::make_unique<eagi::OracleAgent>(items);
  if (spec.rfind("replay:", 0) == 0) {
    const std::string path = spec.substr(7);
    return std::make_unique<eagi::ReplayAgent>(eagi::ReplayAgent::from_json_text(read_file(path), "replay:" + path));
  }
  if (spec == "remote") {
    try {
      auto cfg = eagi::RemoteConfig::from_env();
      cfg.timeout_s = timeout_s;
      cfg.attempts = attempts;
      return std::make_unique<eagi::RemoteAgent>(cfg);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  throw UsageError("unknown --agent '" + spec + "' (expected oracle, replay:PATH or remote)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Engineering competence benchmark: items, agents, scores."};
  app.require_subcommand(1);

  Selection gen_sel;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "sample instances from a bank");
  add_selection(gen, gen_sel);
  gen->add_option("--out", gen_out, "instances file (default stdout)");

  std::string sc_instances, sc_answers, sc_out, sc_format = "json";
  double sc_threshold = eagi::kDefaultCompetenceThreshold;
  auto* sc = app.add_subcommand("score", "score recorded answers against an instances file");
  sc->add_option("--instances", sc_instances, "instances file")->required();
  sc->add_option("--answers", sc_answers, "answers file {schema_version, answers}")->required();
  sc->add_option("--threshold", sc_threshold, "competence pass-rate threshold")->check(CLI::Range(0.0, 1.0));
  sc->add_option("--out", sc_out, "report file (default stdout)");
  sc->add_option("--format", sc_format, "json | markdown");

  Selection run_sel;
  std::string run_instances, run_agent = "oracle", run_out, run_format = "json";
  double run_threshold = eagi::kDefaultCompetenceThreshold;
  std::size_t run_in_flight = 4;
  int run_timeout = 60, run_attempts = 3;
  bool run_fail_fast = false;
  auto* run = app.add_subcommand("run", "sample, ask an agent, score and report");
  run->add_option("--bank", run_sel.bank, "question bank JSON");
  run->add_option("--instances", run_instances, "use a generated instances file instead of sampling");
  run->add_option("--filter", run_sel.filter, "tag filter");
  run->add_option("--mode", run_sel.mode, "targeted | stratified | curriculum");
  run->add_option("--n", run_sel.n, "number of items, or 'all'");
  run->add_option("--seed", run_sel.seed, "sampling seed");
  run->add_option("--agent", run_agent, "oracle | replay:PATH | remote");
  run->add_option("--threshold", run_threshold, "competence pass-rate threshold")->check(CLI::Range(0.0, 1.0));
  run->add_option("--max-in-flight", run_in_flight, "concurrent agent calls")->check(CLI::PositiveNumber);
  run->add_option("--timeout", run_timeout, "remote request timeout, seconds")->check(CLI::PositiveNumber);
  run->add_option("--attempts", run_attempts, "remote attempts per item")->check(CLI::PositiveNumber);
  run->add_flag("--fail-fast", run_fail_fast, "abort on the first transport failure");
  run->add_option("--out", run_out, "report file (default stdout)");
  run->add_option("--format", run_format, "json | markdown");

  std::string rep_in, rep_out, rep_format = "markdown";
  auto* rep = app.add_subcommand("report", "render a JSON report");
  rep->add_option("--in", rep_in, "report JSON")->required();
  rep->add_option("--out", rep_out, "output file (default stdout)");
  rep->add_option("--format", rep_format, "markdown | json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      const auto bank = eagi::load_bank(read_file(gen_sel.bank));
      const auto items = select(gen_sel, bank);
      write_output(gen_out, eagi::instances_to_json(items).dump(2) + "\n");
      return kExitOk;
    }
    if (*sc) {
      const auto items = eagi::load_instances(read_file(sc_instances));
      auto agent = eagi::ReplayAgent::from_json_text(read_file(sc_answers), "replay:" + sc_answers);
      eagi::RunOptions opts;
      opts.threshold = sc_threshold;
      opts.max_in_flight = 1;
      auto report = eagi::run_evaluation(items, agent, opts);
      report.run_id = make_run_id();
      report.run = {{"instances", sc_instances}, {"answers", sc_answers}, {"threshold", sc_threshold}};
      write_output(sc_out, render(report, sc_format));
      return kExitOk;
    }
    if (*run) {
      std::vector<eagi::QuestionInstance> items;
      eagi::json snapshot;
      if (!run_instances.empty()) {
        if (!run_sel.bank.empty()) throw UsageError("give either --bank or --instances, not both");
        items = eagi::load_instances(read_file(run_instances));
        snapshot = {{"instances", run_instances}};
      } else {
        if (run_sel.bank.empty()) throw UsageError("run needs --bank or --instances");
        const auto bank = eagi::load_bank(read_file(run_sel.bank));
        items = select(run_sel, bank);
        snapshot = selection_snapshot(run_sel);
      }
      auto agent = make_agent(run_agent, items, run_timeout, run_attempts);
      eagi::RunOptions opts;
      opts.threshold = run_threshold;
      opts.max_in_flight = run_in_flight;
      opts.fail_fast = run_fail_fast;
      eagi::EvaluationReport report;
      try {
        report = eagi::run_evaluation(items, *agent, opts);
      } catch (const eagi::TransportError& e) {
        std::cerr << "eagi: transport failure: " << e.what() << "\n";
        return kExitTransport;
      }
      report.run_id = make_run_id();
      snapshot["agent"] = run_agent;
      snapshot["threshold"] = run_threshold;
      snapshot["fail_fast"] = run_fail_fast;
      report.run = snapshot;
      write_output(run_out, render(report, run_format));
      if (report.transport_exhausted()) {
        std::cerr << "eagi: some items exhausted transport retries\n";
        return kExitTransport;
      }
      return kExitOk;
    }
    if (*rep) {
      const auto report = eagi::load_report(read_file(rep_in));
      write_output(rep_out, render(report, rep_format));
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "eagi: " << e.what() << "\n";
    return kExitUsage;
  } catch (const eagi::BankError& e) {
    std::cerr << "eagi: " << e.what() << "\n";
    return kExitBank;
  } catch (const std::exception& e) {
    std::cerr << "eagi: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
