#pragma once

// Agents answer prompts. Implementations must tolerate concurrent calls.

#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "eagi/answer_spec.hpp"
#include "eagi/errors.hpp"
#include "eagi/json_util.hpp"
#include "eagi/question_bank.hpp"
#include "eagi/scoring.hpp"

namespace eagi {

struct AgentMetadata {
  std::string item_id;
  CognitionLevel level = CognitionLevel::Remember;
  AnswerKind kind = AnswerKind::Fact;
};

class AgentAdapter {
 public:
  virtual ~AgentAdapter() = default;
  virtual std::string name() const = 0;
  // Throws TransportError when no answer could be obtained.
  virtual std::string answer(const std::string& prompt, const AgentMetadata& meta) = 0;
};

// How to phrase a machine-readable reply, per answer kind.
inline std::string envelope_instructions(AnswerKind kind) {
  std::string shape;
  switch (kind) {
    case AnswerKind::Fact: shape = R"({"answer": "<statement or formula>"})"; break;
    case AnswerKind::Numeric: shape = R"({"value": <number>, "unit": "<unit>"})"; break;
    case AnswerKind::Structured: shape = R"({"fields": {"<name>": <number> | "<text>" | {"value": <number>, "unit": "<unit>"}}})"; break;
    case AnswerKind::Diagnosis: shape = R"({"cause": "<cause id>"})"; break;
    case AnswerKind::Fix: shape = R"({"patch": {"<design field>": <number>}})"; break;
    case AnswerKind::DesignSynthesis: shape = R"({"design": {"<design field>": <number>}})"; break;
    case AnswerKind::Rubric: shape = R"({"text": "<your answer>"})"; break;
  }
  return "Explain briefly, then end with a fenced ```eagi block holding " + shape + ".";
}

// Answers every item with its ground truth. Used to check the pipeline end to
// end: every item it answers must score Pass.
class OracleAgent : public AgentAdapter {
 public:
  explicit OracleAgent(const std::vector<QuestionInstance>& items) {
    for (const auto& q : items) answers_[q.id] = reference_answer(q.answer_spec);
  }

  std::string name() const override { return "oracle"; }

  std::string answer(const std::string&, const AgentMetadata& meta) override {
    auto it = answers_.find(meta.item_id);
    if (it == answers_.end()) throw TransportError("oracle has no reference for '" + meta.item_id + "'");
    return it->second;
  }

 private:
  std::map<std::string, std::string> answers_;
};

// Recorded answers: {"schema_version": 1, "answers": {"<item id>": "<text>"}}.
// Items without a recording get an empty answer, which scores Unscorable.
class ReplayAgent : public AgentAdapter {
 public:
  explicit ReplayAgent(std::map<std::string, std::string> answers, std::string label = "replay")
      : answers_(std::move(answers)), label_(std::move(label)) {}

  static ReplayAgent from_json_text(std::string_view text, std::string label = "replay") {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw BankError(LineIndex::line_at(text, e.byte > 0 ? e.byte - 1 : 0), std::string("malformed JSON: ") + e.what());
    }
    try {
      const Node n(doc, "");
      n.only({"schema_version", "answers"});
      if (n.at("schema_version").integer() != 1) n.at("schema_version").fail("unsupported answers schema version");
      std::map<std::string, std::string> answers;
      for (const auto& [id, v] : n.at("answers").members()) answers[id] = v.str();
      return ReplayAgent(std::move(answers), std::move(label));
    } catch (const SchemaError& e) {
      throw BankError(LineIndex(text).line_of(e.path()), e.what());
    }
  }

  std::string name() const override { return label_; }

  std::string answer(const std::string&, const AgentMetadata& meta) override {
    auto it = answers_.find(meta.item_id);
    return it == answers_.end() ? std::string() : it->second;
  }

  const std::map<std::string, std::string>& answers() const { return answers_; }

 private:
  std::map<std::string, std::string> answers_;
  std::string label_;
};

struct RemoteConfig {
  std::string url;    // http://host[:port]/path
  std::string token;  // sent as a bearer token when set
  std::string model = "default";
  int timeout_s = 60;
  int attempts = 3;
  int backoff_ms = 500;

  // EAGI_REMOTE_URL (required), EAGI_REMOTE_TOKEN, EAGI_REMOTE_MODEL.
  static RemoteConfig from_env() {
    RemoteConfig c;
    const char* url = std::getenv("EAGI_REMOTE_URL");
    if (!url || !*url) throw std::invalid_argument("EAGI_REMOTE_URL is not set");
    c.url = url;
    if (const char* t = std::getenv("EAGI_REMOTE_TOKEN")) c.token = t;
    if (const char* m = std::getenv("EAGI_REMOTE_MODEL"); m && *m) c.model = m;
    return c;
  }
};

// Chat-completions style endpoint: POST {model, messages}, read
// choices[0].message.content.
class RemoteAgent : public AgentAdapter {
 public:
  explicit RemoteAgent(RemoteConfig cfg) : cfg_(std::move(cfg)) {
    const auto scheme_end = cfg_.url.find("://");
    if (scheme_end == std::string::npos || cfg_.url.substr(0, scheme_end) != "http")
      throw std::invalid_argument("remote URL must start with http:// (got '" + cfg_.url + "')");
    const auto path_start = cfg_.url.find('/', scheme_end + 3);
    origin_ = cfg_.url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : cfg_.url.substr(path_start);
    if (cfg_.attempts < 1) throw std::invalid_argument("remote attempts must be at least 1");
  }

  std::string name() const override { return "remote:" + cfg_.model; }

  std::string answer(const std::string& prompt, const AgentMetadata& meta) override {
    const json body = {{"model", cfg_.model},
                       {"messages",
                        {{{"role", "system"}, {"content", envelope_instructions(meta.kind)}},
                         {{"role", "user"}, {"content", prompt}}}}};
    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 1; attempt <= cfg_.attempts; ++attempt) {
      if (attempt > 1) std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.backoff_ms * (attempt - 1)));
      httplib::Client cli(origin_);
      cli.set_connection_timeout(cfg_.timeout_s, 0);
      cli.set_read_timeout(cfg_.timeout_s, 0);
      cli.set_write_timeout(cfg_.timeout_s, 0);
      httplib::Headers headers;
      if (!cfg_.token.empty()) headers.emplace("Authorization", "Bearer " + cfg_.token);
      auto res = cli.Post(path_, headers, payload, "application/json");
      if (!res) {
        last_error = "request failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300)
        throw TransportError(meta.item_id + ": HTTP " + std::to_string(res->status));
      const json reply = json::parse(res->body, nullptr, false);
      if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
          reply["choices"].empty() || !reply["choices"][0].contains("message") ||
          !reply["choices"][0]["message"].contains("content") ||
          !reply["choices"][0]["message"]["content"].is_string()) {
        last_error = "malformed response body";
        continue;
      }
      return reply["choices"][0]["message"]["content"].get<std::string>();
    }
    throw TransportError(meta.item_id + ": " + last_error + " after " + std::to_string(cfg_.attempts) + " attempts");
  }

 private:
  RemoteConfig cfg_;
  std::string origin_;
  std::string path_;
};

}  // namespace eagi
