#pragma once

// Instance files: the output of `eagi generate`, the input of `score` and
// `run`. Each instance carries its resolved answer spec, so scoring never
// needs the bank again.
//
//   {"schema_version": 1, "instances": [{id, level, tags, prompt, answer_spec, provenance}]}

#include <string>
#include <string_view>
#include <vector>

#include "eagi/answer_spec.hpp"
#include "eagi/codec.hpp"
#include "eagi/errors.hpp"
#include "eagi/json_util.hpp"
#include "eagi/question_bank.hpp"

namespace eagi {

inline constexpr int kInstanceSchemaVersion = 1;

inline json to_json(const QuestionInstance& q) {
  json bindings = json::object();
  for (const auto& [k, v] : q.provenance.bindings) bindings[k] = v;
  return {{"id", q.id},
          {"level", std::string(to_string(q.level))},
          {"tags", codec::to_json(q.tags)},
          {"prompt", q.prompt},
          {"answer_spec", to_json(q.answer_spec)},
          {"provenance", {{"template_id", q.provenance.template_id}, {"bindings", bindings}}}};
}

inline QuestionInstance instance_from_json(const Node& n) {
  n.only({"id", "level", "tags", "prompt", "answer_spec", "provenance"});
  QuestionInstance q;
  q.id = n.at("id").str();
  q.level = codec::enum_from<CognitionLevel>(n.at("level"), "cognition level");
  q.tags = codec::tags_from_json(n.at("tags"));
  q.prompt = n.at("prompt").str();
  q.answer_spec = answer_spec_from_json(n.at("answer_spec"));
  const Node p = n.at("provenance");
  p.only({"template_id", "bindings"});
  q.provenance.template_id = p.at("template_id").str();
  for (const auto& [k, v] : p.at("bindings").members()) q.provenance.bindings[k] = v.raw();
  return q;
}

inline json instances_to_json(const std::vector<QuestionInstance>& items) {
  json arr = json::array();
  for (const auto& q : items) arr.push_back(to_json(q));
  return {{"schema_version", kInstanceSchemaVersion}, {"instances", arr}};
}

inline std::vector<QuestionInstance> instances_from_json(const Node& n) {
  n.only({"schema_version", "instances"});
  const Node v = n.at("schema_version");
  if (v.integer() != kInstanceSchemaVersion)
    v.fail("unsupported instance schema version " + std::to_string(v.integer()));
  std::vector<QuestionInstance> out;
  std::set<std::string> ids;
  for (const auto& item : n.at("instances").items()) {
    out.push_back(instance_from_json(item));
    if (!ids.insert(out.back().id).second) item.at("id").fail("duplicate instance id '" + out.back().id + "'");
  }
  return out;
}

// Parses an instance file; errors carry the offending source line.
inline std::vector<QuestionInstance> load_instances(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw BankError(LineIndex::line_at(text, e.byte > 0 ? e.byte - 1 : 0), std::string("malformed JSON: ") + e.what());
  }
  try {
    return instances_from_json(Node(doc, ""));
  } catch (const SchemaError& e) {
    throw BankError(LineIndex(text).line_of(e.path()), e.what());
  }
}

}  // namespace eagi
