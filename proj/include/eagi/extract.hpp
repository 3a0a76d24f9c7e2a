#pragma once

// Turns an agent's raw reply into a typed payload.
//
// A fenced block opened by a line starting with ```eagi (or ```json) and
// closed by a line starting with ``` takes precedence over the prose; its
// body must be one JSON object carrying the key required for the expected
// answer kind (see docs/answer_envelope.md). Without a usable block, the
// plain-text rules below apply. The path taken is recorded on the result.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eagi/answer_spec.hpp"
#include "eagi/json_util.hpp"
#include "eagi/units.hpp"

namespace eagi {

struct NumericPayload {
  double value = 0;
  std::optional<std::string> unit;

  friend bool operator==(const NumericPayload&, const NumericPayload&) = default;
};

// Structured answers: field name -> number (with optional unit) or text.
struct FieldValue {
  std::variant<NumericPayload, std::string> value;

  friend bool operator==(const FieldValue&, const FieldValue&) = default;
};
using FieldMap = std::map<std::string, FieldValue>;

struct CausePayload {
  std::string cause;

  friend bool operator==(const CausePayload&, const CausePayload&) = default;
};

struct PatchPayload {
  Patch patch;

  friend bool operator==(const PatchPayload&, const PatchPayload&) = default;
};

struct TextPayload {
  std::string text;

  friend bool operator==(const TextPayload&, const TextPayload&) = default;
};

using Payload = std::variant<NumericPayload, FieldMap, CausePayload, PatchPayload, TextPayload>;

struct AgentAnswer {
  std::string raw_text;
  std::optional<Payload> envelope;
  std::string path;  // "envelope", "plain:<rule>", or "none:<reason>"
};

namespace extract_detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Lowercase with runs of whitespace folded to single spaces.
inline std::string fold_text(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

inline bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

struct Fence {
  std::string body;
};

// Bodies of ```eagi blocks, then ```json blocks, each in document order.
inline std::vector<Fence> fences(std::string_view text) {
  std::vector<Fence> eagi_blocks, json_blocks;
  std::size_t pos = 0;
  std::vector<Fence>* current = nullptr;
  std::string body;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    std::string_view trimmed = line;
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t')) trimmed.remove_prefix(1);
    if (!current) {
      if (trimmed.starts_with("```eagi")) current = &eagi_blocks, body.clear();
      else if (trimmed.starts_with("```json")) current = &json_blocks, body.clear();
    } else if (trimmed.starts_with("```")) {
      current->push_back({body});
      current = nullptr;
    } else {
      body.append(line);
      body.push_back('\n');
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  eagi_blocks.insert(eagi_blocks.end(), json_blocks.begin(), json_blocks.end());
  return eagi_blocks;
}

// The text with every ```eagi / ```json block removed. Prose fallbacks read
// only this, so numbers inside a rejected envelope are never taken as prose.
inline std::string outside_fences(std::string_view text) {
  std::string out, held;  // held: an open block, restored if it never closes
  bool inside = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    std::string_view trimmed = line;
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t')) trimmed.remove_prefix(1);
    std::string& sink = inside ? held : out;
    sink.append(line);
    if (eol != std::string_view::npos) sink.push_back('\n');
    if (!inside && (trimmed.starts_with("```eagi") || trimmed.starts_with("```json"))) {
      out.resize(out.size() - line.size() - (eol != std::string_view::npos));
      held.assign(line);
      held.push_back('\n');
      inside = true;
    } else if (inside && trimmed.starts_with("```")) {
      held.clear();
      inside = false;
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out + held;
}

// ---------------------------------------------------------------------------
// Numbers with units in prose
// ---------------------------------------------------------------------------

struct Quantity {
  double value;
  std::optional<units::Unit> unit;
  std::string unit_text;
  std::size_t pos;  // byte offset of the number
  std::size_t end;  // byte offset after number and unit
  bool operand = false;  // right-hand side of "a x b", "a * b", "a / b": an input, not a result
};

// True when text[0:pos) ends in an arithmetic operator that follows a value.
inline bool after_operator(std::string_view text, std::size_t pos) {
  std::size_t k = pos;
  while (k > 0 && text[k - 1] == ' ') --k;
  std::size_t op_len = 0;
  if (k >= 1 && (text[k - 1] == '*' || text[k - 1] == 'x' || text[k - 1] == 'X' || text[k - 1] == '/')) op_len = 1;
  else if (k >= 2 && static_cast<unsigned char>(text[k - 2]) == 0xC3 && static_cast<unsigned char>(text[k - 1]) == 0x97)
    op_len = 2;  // U+00D7
  if (op_len == 0) return false;
  k -= op_len;
  // "x" inside a word ("max 25") is not an operator.
  if (op_len == 1 && (text[k] == 'x' || text[k] == 'X') && k > 0 && std::isalpha(static_cast<unsigned char>(text[k - 1])))
    return false;
  while (k > 0 && text[k - 1] == ' ') --k;
  return k > 0 && std::isalnum(static_cast<unsigned char>(text[k - 1]));
}

inline bool unit_char(unsigned char c) {
  return std::isalpha(c) || c == '%' || c == '"' || c == '/' || c == '^' || c == '*' || c >= 0x80;
}

inline std::vector<Quantity> quantities(std::string_view text) {
  std::vector<Quantity> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto digit = [&](std::size_t k) { return k < n && std::isdigit(static_cast<unsigned char>(text[k])); };
  while (i < n) {
    std::size_t start = i;
    bool neg = false;
    if ((text[i] == '-' || text[i] == '+') && (digit(i + 1) || (i + 2 < n && text[i + 1] == '.' && digit(i + 2)))) {
      // A sign only counts when it does not follow a value ("19.8V - 25.2V").
      std::size_t back = i;
      while (back > 0 && text[back - 1] == ' ') --back;
      const bool after_value = back > 0 && (std::isalnum(static_cast<unsigned char>(text[back - 1])));
      if (!after_value) {
        neg = text[i] == '-';
        ++i;
      }
    }
    if (!(digit(i) || (i + 1 < n && text[i] == '.' && digit(i + 1)))) {
      i = start + 1;
      continue;
    }
    // Reject digits glued to a preceding letter or digit run (identifiers like "R1").
    if (start > 0 && !neg && std::isalpha(static_cast<unsigned char>(text[start - 1])) && text[start - 1] != 'x' &&
        text[start - 1] != 'X') {
      while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
      continue;
    }
    std::string digits;
    while (i < n) {
      if (digit(i)) {
        digits.push_back(text[i++]);
      } else if (text[i] == ',' && digit(i + 1) && digit(i + 2) && digit(i + 3) && !digit(i + 4) &&
                 digits.find('.') == std::string::npos) {
        ++i;  // thousands separator
      } else if (text[i] == '.' && digit(i + 1) && digits.find('.') == std::string::npos) {
        digits.push_back(text[i++]);
      } else {
        break;
      }
    }
    if (i < n && (text[i] == 'e' || text[i] == 'E') && (digit(i + 1) || ((text[i + 1] == '-' || text[i + 1] == '+') && digit(i + 2)))) {
      digits.push_back(text[i++]);
      if (text[i] == '-' || text[i] == '+') digits.push_back(text[i++]);
      while (digit(i)) digits.push_back(text[i++]);
    }
    double value = 0;
    try {
      value = std::stod(digits);
    } catch (const std::exception&) {
      continue;
    }
    if (neg) value = -value;
    // Unit: at most one space, then unit characters.
    std::size_t u = i;
    if (u < n && text[u] == ' ') ++u;
    std::size_t ue = u;
    while (ue < n && (unit_char(static_cast<unsigned char>(text[ue])) ||
                      (text[ue] == '-' && ue + 1 < n && std::isalpha(static_cast<unsigned char>(text[ue + 1]))) ||
                      (text[ue] == '.' && ue + 1 < n && std::isalpha(static_cast<unsigned char>(text[ue + 1]))) ||
                      ((text[ue] == '2' || text[ue] == '3') && ue > u && text[ue - 1] == '^')))
      ++ue;
    std::string unit_text(text.substr(u, ue - u));
    std::optional<units::Unit> unit;
    // Longest prefix that names a unit ("Nm/A," -> "Nm/A", "inches)" -> "inches").
    for (std::size_t len = unit_text.size(); len > 0 && !unit; --len) {
      unit = units::lookup(unit_text.substr(0, len));
      if (unit) {
        // The prefix must end on a token boundary, not inside a word ("minimum").
        const bool boundary = len == unit_text.size() || !std::isalpha(static_cast<unsigned char>(unit_text[len]));
        if (!boundary) unit.reset();
        else unit_text.resize(len);
      }
    }
    if (!unit) unit_text.clear();
    out.push_back({value, unit, unit_text, start, unit ? u + unit_text.size() : i, after_operator(text, start)});
    i = unit ? u + unit_text.size() : i;
  }
  return out;
}

inline std::optional<Payload> plain_numeric(std::string_view text, const NumericSpec& spec, std::string& path) {
  const auto expected = units::lookup(spec.unit);
  const auto qs = quantities(text);
  const Quantity* with_unit = nullptr;
  const Quantity* bare = nullptr;
  const Quantity* mismatched = nullptr;
  for (const auto& q : qs) {
    if (q.operand) continue;
    if (q.unit && expected && units::compatible(*q.unit, *expected)) with_unit = &q;
    else if (!q.unit) bare = &q;
    else mismatched = &q;
  }
  if (with_unit) {
    path = "plain:last-number-with-unit";
    return NumericPayload{with_unit->value, with_unit->unit_text};
  }
  if (bare) {
    path = "plain:last-bare-number";
    return NumericPayload{bare->value, std::nullopt};
  }
  if (mismatched) {
    path = "plain:number-with-other-unit";
    return NumericPayload{mismatched->value, mismatched->unit_text};
  }
  return std::nullopt;
}

// Text normalization for phrase matching.
inline bool contains_phrase(const std::string& folded_text, std::string_view phrase) {
  const std::string p = fold_text(phrase);
  return !p.empty() && folded_text.find(p) != std::string::npos;
}

inline std::optional<Payload> plain_structured(std::string_view text, const StructuredSpec& spec, std::string& path) {
  const std::string folded = lower(text);
  FieldMap fields;
  for (const auto& f : spec.fields) {
    if (f.numeric()) {
      std::vector<std::string> keys = f.keywords;
      if (keys.empty()) keys.push_back(f.name);
      // Every keyword occurrence, earliest first; the first one followed
      // closely by a number of a compatible unit wins.
      std::vector<std::size_t> anchors;
      for (const auto& k : keys) {
        const std::string lk = lower(k);
        if (lk.empty()) continue;
        for (auto at = folded.find(lk); at != std::string::npos; at = folded.find(lk, at + 1))
          anchors.push_back(at + lk.size());
      }
      std::sort(anchors.begin(), anchors.end());
      const auto expected = units::lookup(f.unit);
      for (std::size_t anchor : anchors) {
        bool found = false;
        for (const auto& q : quantities(text.substr(anchor, 80))) {
          if (q.operand) continue;
          if (q.unit && expected && !units::compatible(*q.unit, *expected)) continue;
          fields[f.name] = FieldValue{NumericPayload{q.value, q.unit ? std::optional(q.unit_text) : std::nullopt}};
          found = true;
          break;
        }
        if (found) break;
      }
    } else {
      const std::string ftext = fold_text(text);
      std::vector<std::string> phrases = f.accepted;
      phrases.push_back(std::get<std::string>(f.expected));
      for (const auto& p : phrases)
        if (contains_phrase(ftext, p)) {
          fields[f.name] = FieldValue{p};
          break;
        }
    }
  }
  if (fields.empty()) return std::nullopt;
  path = "plain:field-keywords";
  return fields;
}

// Cause with the most keyword hits; ties go to the earliest mention.
inline std::optional<std::string> match_cause(std::string_view text,
                                              const std::map<std::string, std::vector<std::string>>& vocab) {
  const std::string folded = fold_text(text);
  std::optional<std::string> best;
  int best_hits = 0;
  std::size_t best_pos = std::string::npos;
  for (const auto& [id, keywords] : vocab) {
    int hits = 0;
    std::size_t first = std::string::npos;
    auto count = [&](std::string_view phrase) {
      const std::string p = fold_text(phrase);
      if (p.empty()) return;
      const auto at = folded.find(p);
      if (at != std::string::npos) {
        ++hits;
        first = std::min(first, at);
      }
    };
    count(id);
    for (const auto& k : keywords) count(k);
    if (hits > best_hits || (hits == best_hits && hits > 0 && first < best_pos)) {
      best = id;
      best_hits = hits;
      best_pos = first;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Design changes in prose
// ---------------------------------------------------------------------------

struct Suggestion {
  std::size_t pos;
  Patch patch;
};

inline double to_number(const std::string& s) {
  std::string digits;
  for (char c : s)
    if (c != ',') digits.push_back(c);
  return std::stod(digits);
}

inline std::vector<Suggestion> design_mentions(const std::string& text) {
  using std::regex;
  static const regex prop(R"((\d+(?:\.\d+)?)\s*(?:x|\xc3\x97|by)\s*(\d+(?:\.\d+)?)(?!\d|\.\d))", regex::icase);
  static const regex kv(R"((\d+(?:\.\d+)?)\s*(?:-|\xe2\x80\x93|to)?\s*(?:\d+(?:\.\d+)?)?\s*kv\b)", regex::icase);
  static const regex kv_prefix(R"(\bkv\s*(?:of|to|=|:)?\s*(\d+(?:\.\d+)?))", regex::icase);
  static const regex diameter(R"(diameter\s*(?:to|of|=|:|is)?\s*(\d+(?:\.\d+)?)\s*(?:in\b|inch|inches|"))", regex::icase);
  static const regex diameter_post(R"((\d+(?:\.\d+)?)\s*(?:-\s*)?(?:in\b|inch|inches|")\s*(?:diameter|props?\b|propellers?))", regex::icase);
  static const regex pitch(R"(pitch\s*(?:to|of|=|:|is)?\s*(\d+(?:\.\d+)?)\s*(?:in\b|inch|inches|")?)", regex::icase);
  static const regex mass(R"((?:weight|mtow|mass)\s*(?:to|of|=|:|is)?\s*(\d+(?:\.\d+)?)\s*kg)", regex::icase);
  static const regex rpm(R"((?:rpm)\s*(?:to|of|=|:)\s*(\d[\d,]*(?:\.\d+)?))", regex::icase);
  static const regex cells(R"((\d+)\s*S\b)");
  static const regex mah(R"((\d[\d,]*(?:\.\d+)?)\s*mah\b)", regex::icase);
  static const regex ah(R"((\d+(?:\.\d+)?)\s*ah\b)", regex::icase);
  static const regex motors(R"((\d+)\s*(?:motors|rotors|props|propellers)\b)", regex::icase);
  static const regex quad(R"(\bquad(?:rotor|copter)?\b)", regex::icase);
  static const regex coax(R"(\bcoaxial\s+quad)", regex::icase);
  static const regex hexa(R"(\bhexa(?:rotor|copter)?\b)", regex::icase);
  static const regex octo(R"(\bocto(?:rotor|copter)?\b)", regex::icase);

  std::vector<Suggestion> out;
  auto scan = [&](const regex& re, auto&& make) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
      Patch p = make(*it);
      if (!p.empty()) out.push_back({static_cast<std::size_t>(it->position(0)), std::move(p)});
    }
  };
  scan(prop, [](const std::smatch& m) {
    return Patch{{"prop_diameter_in", to_number(m[1])}, {"prop_pitch_in", to_number(m[2])}};
  });
  scan(kv, [](const std::smatch& m) { return Patch{{"kv_rpm_per_v", to_number(m[1])}}; });
  scan(kv_prefix, [](const std::smatch& m) { return Patch{{"kv_rpm_per_v", to_number(m[1])}}; });
  scan(diameter, [](const std::smatch& m) { return Patch{{"prop_diameter_in", to_number(m[1])}}; });
  scan(diameter_post, [](const std::smatch& m) { return Patch{{"prop_diameter_in", to_number(m[1])}}; });
  scan(pitch, [](const std::smatch& m) { return Patch{{"prop_pitch_in", to_number(m[1])}}; });
  scan(mass, [](const std::smatch& m) { return Patch{{"mtow_kg", to_number(m[1])}}; });
  scan(rpm, [](const std::smatch& m) { return Patch{{"loaded_rpm", to_number(m[1])}}; });
  scan(cells, [](const std::smatch& m) { return Patch{{"battery_cells", to_number(m[1])}}; });
  scan(mah, [](const std::smatch& m) { return Patch{{"battery_capacity_ah", to_number(m[1]) / 1000.0}}; });
  scan(ah, [](const std::smatch& m) { return Patch{{"battery_capacity_ah", to_number(m[1])}}; });
  scan(motors, [](const std::smatch& m) { return Patch{{"n_motors", to_number(m[1])}}; });
  scan(coax, [](const std::smatch&) { return Patch{{"n_motors", 8}}; });
  scan(quad, [](const std::smatch&) { return Patch{{"n_motors", 4}}; });
  scan(hexa, [](const std::smatch&) { return Patch{{"n_motors", 6}}; });
  scan(octo, [](const std::smatch&) { return Patch{{"n_motors", 8}}; });
  std::stable_sort(out.begin(), out.end(), [](const Suggestion& a, const Suggestion& b) { return a.pos < b.pos; });
  return out;
}

// Value of a patch key on a design, in the key's unit.
inline std::optional<double> current_value(const oracle::Design& d, const std::string& key) {
  if (key == "kv_rpm_per_v") return d.kv_rpm_per_v;
  if (key == "prop_diameter_in") return d.prop_diameter_m / units::kMetersPerInch;
  if (key == "prop_pitch_in") return d.prop_pitch_m / units::kMetersPerInch;
  if (key == "mtow_kg") return d.mtow_kg;
  if (key == "loaded_rpm") return d.loaded_rpm;
  if (key == "battery_cells") return d.battery_cells;
  if (key == "battery_capacity_ah") return d.battery_capacity_ah;
  if (key == "n_motors") return d.n_motors;
  return std::nullopt;
}

// The first change the prose proposes: mentions that restate the base
// design's current values are skipped.
inline std::optional<Payload> plain_fix(const std::string& text, const FixSpec& spec, std::string& path) {
  for (auto& s : design_mentions(text)) {
    Patch changed;
    for (const auto& [k, v] : s.patch) {
      const auto cur = current_value(spec.base_design, k);
      if (!cur || std::abs(*cur - v) > 1e-9) changed[k] = v;
    }
    if (changed.empty()) continue;
    if (changed.size() == 1 && changed.contains("n_motors")) continue;  // platform words, not a fix
    path = "plain:first-suggested-change";
    return PatchPayload{changed};
  }
  return std::nullopt;
}

// First mention of each design choice.
inline std::optional<Payload> plain_design(const std::string& text, std::string& path) {
  Patch p;
  for (const auto& s : design_mentions(text))
    for (const auto& [k, v] : s.patch)
      if (!p.contains(k)) p[k] = v;
  if (!p.contains("kv_rpm_per_v") && !p.contains("prop_diameter_in")) return std::nullopt;
  path = "plain:design-mentions";
  return PatchPayload{p};
}

// ---------------------------------------------------------------------------
// Envelopes
// ---------------------------------------------------------------------------

inline std::optional<NumericPayload> numeric_from_json(const json& j) {
  if (j.is_number()) return NumericPayload{j.get<double>(), std::nullopt};
  if (j.is_object() && j.contains("value") && j["value"].is_number()) {
    NumericPayload p{j["value"].get<double>(), std::nullopt};
    if (j.contains("unit") && j["unit"].is_string()) p.unit = j["unit"].get<std::string>();
    return p;
  }
  if (j.is_string()) {
    const auto qs = quantities(j.get<std::string>());
    if (qs.size() == 1) return NumericPayload{qs[0].value, qs[0].unit ? std::optional(qs[0].unit_text) : std::nullopt};
  }
  return std::nullopt;
}

inline std::optional<Payload> envelope_payload(const json& j, AnswerKind kind, std::string& why) {
  if (!j.is_object()) {
    why = "envelope is not a JSON object";
    return std::nullopt;
  }
  auto need = [&](const char* key) {
    if (!j.contains(key)) why = std::string("envelope lacks '") + key + "'";
    return j.contains(key);
  };
  switch (kind) {
    case AnswerKind::Fact:
      if (need("answer") && j["answer"].is_string()) return TextPayload{j["answer"].get<std::string>()};
      break;
    case AnswerKind::Rubric:
      if (need("text") && j["text"].is_string()) return TextPayload{j["text"].get<std::string>()};
      break;
    case AnswerKind::Numeric:
      if (need("value"))
        if (auto p = numeric_from_json(j)) return *p;
      break;
    case AnswerKind::Structured:
      if (need("fields") && j["fields"].is_object()) {
        FieldMap out;
        for (auto it = j["fields"].begin(); it != j["fields"].end(); ++it) {
          if (it->is_string()) out[it.key()] = FieldValue{it->get<std::string>()};
          else if (auto p = numeric_from_json(*it)) out[it.key()] = FieldValue{*p};
        }
        return out;
      }
      break;
    case AnswerKind::Diagnosis:
      if (need("cause") && j["cause"].is_string()) return CausePayload{j["cause"].get<std::string>()};
      break;
    case AnswerKind::Fix:
    case AnswerKind::DesignSynthesis: {
      const char* key = kind == AnswerKind::Fix ? "patch" : "design";
      if (need(key) && j[key].is_object()) {
        Patch p;
        for (auto it = j[key].begin(); it != j[key].end(); ++it) {
          if (!it->is_number()) {
            why = "field '" + it.key() + "' is not a number";
            return std::nullopt;
          }
          p[it.key()] = it->get<double>();
        }
        return PatchPayload{p};
      }
      break;
    }
  }
  if (why.empty()) why = "envelope value has the wrong type";
  return std::nullopt;
}

}  // namespace extract_detail

inline AgentAnswer extract(std::string_view answer_text, const AnswerSpec& spec) {
  using namespace extract_detail;
  AgentAnswer a;
  a.raw_text = std::string(answer_text);
  const AnswerKind kind = kind_of(spec);

  std::string rejected;
  for (const auto& f : fences(answer_text)) {
    json j = json::parse(f.body, nullptr, false);
    if (j.is_discarded()) {
      rejected = "envelope is not valid JSON";
      continue;
    }
    std::string why;
    if (auto p = envelope_payload(j, kind, why)) {
      a.envelope = std::move(p);
      a.path = "envelope";
      return a;
    }
    rejected = why;
  }

  std::string path;
  std::optional<Payload> p;
  const std::string text = outside_fences(answer_text);
  switch (kind) {
    case AnswerKind::Fact:
    case AnswerKind::Rubric:
      if (!blank(text)) {
        p = TextPayload{text};
        path = "plain:text";
      }
      break;
    case AnswerKind::Numeric: p = plain_numeric(text, std::get<NumericSpec>(spec), path); break;
    case AnswerKind::Structured: p = plain_structured(text, std::get<StructuredSpec>(spec), path); break;
    case AnswerKind::Diagnosis:
      if (auto c = match_cause(text, std::get<DiagnosisSpec>(spec).cause_keywords)) {
        p = CausePayload{*c};
        path = "plain:cause-keywords";
      }
      break;
    case AnswerKind::Fix: p = plain_fix(text, std::get<FixSpec>(spec), path); break;
    case AnswerKind::DesignSynthesis: p = plain_design(text, path); break;
  }
  if (p) {
    a.envelope = std::move(p);
    a.path = rejected.empty() ? path : path + " (" + rejected + ")";
  } else {
    a.path = "none:" + (rejected.empty() ? std::string("no extractable payload") : rejected);
  }
  return a;
}

}  // namespace eagi
