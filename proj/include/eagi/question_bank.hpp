#pragma once

// Question bank loading and template instantiation.
//
// The bank stores bindings, never answers: every numeric ground truth is an
// oracle expression evaluated when a template is instantiated. See
// docs/bank_schema.md for the document format.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eagi/answer_spec.hpp"
#include "eagi/codec.hpp"
#include "eagi/errors.hpp"
#include "eagi/json_util.hpp"
#include "eagi/oracle.hpp"
#include "eagi/propellers.hpp"
#include "eagi/taxonomy.hpp"

namespace eagi {

inline constexpr int kBankSchemaVersion = 1;

using Bindings = std::map<std::string, json>;  // placeholder -> number or string

struct DesignContext {
  std::string id;
  std::string description;
  oracle::Design design;
  oracle::Environment environment;
  Bindings vars;  // extra named values available to templates
};

struct QuestionTemplate {
  std::string id;
  CognitionLevel level = CognitionLevel::Remember;
  TagSet tags;
  std::string pattern;
  json answer_template;
  std::optional<std::string> context_ref;
  std::vector<Bindings> bindings;  // one instance per entry
  std::string source_path;         // JSON pointer of the template in its bank file
};

struct Provenance {
  std::string template_id;
  Bindings bindings;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct QuestionInstance {
  std::string id;
  CognitionLevel level = CognitionLevel::Remember;
  TagSet tags;
  std::string prompt;
  AnswerSpec answer_spec;
  Provenance provenance;

  friend bool operator==(const QuestionInstance&, const QuestionInstance&) = default;
};

struct QuestionBank {
  int schema_version = kBankSchemaVersion;
  PropellerCatalog propellers;
  std::map<std::string, std::vector<std::string>> causes;
  std::map<std::string, DesignContext> contexts;
  std::map<std::string, design_space::DesignGrid> grids;
  std::vector<QuestionTemplate> templates;
  std::vector<QuestionInstance> instances;  // every template x binding, in bank order

  const DesignContext* context(const std::string& id) const {
    auto it = contexts.find(id);
    return it == contexts.end() ? nullptr : &it->second;
  }
};

// ---------------------------------------------------------------------------
// Placeholders
// ---------------------------------------------------------------------------

namespace bank_detail {

// Names of `{name}` placeholders in order of appearance.
inline std::vector<std::string> placeholders(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    const auto close = text.find('}', pos);
    if (close == std::string_view::npos) break;
    out.emplace_back(text.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return out;
}

inline std::string render_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return format_number(v.get<double>());
  return v.dump();
}

inline std::string substitute(const std::string& text, const Bindings& vars, const Node& where) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find('{', pos);
    if (open == std::string::npos) break;
    const auto close = text.find('}', open);
    if (close == std::string::npos) where.fail("unterminated placeholder in '" + text + "'");
    const std::string name = text.substr(open + 1, close - open - 1);
    auto it = vars.find(name);
    if (it == vars.end()) where.fail("unbound placeholder {" + name + "}");
    out += text.substr(pos, open - pos);
    out += render_value(it->second);
    pos = close + 1;
  }
  out += text.substr(pos);
  return out;
}

inline std::optional<std::string> whole_placeholder(const std::string& s) {
  if (s.size() >= 3 && s.front() == '{' && s.back() == '}' && s.find('{', 1) == std::string::npos) return s.substr(1, s.size() - 2);
  return std::nullopt;
}

inline Bindings context_vars(const DesignContext& c) {
  const auto& d = c.design;
  Bindings v = {
      {"kv", d.kv_rpm_per_v},
      {"voltage", d.battery_voltage_v},
      {"cells", d.battery_cells},
      {"capacity_ah", d.battery_capacity_ah},
      {"diameter_in", d.prop_diameter_m / units::kMetersPerInch},
      {"pitch_in", d.prop_pitch_m / units::kMetersPerInch},
      {"n_motors", d.n_motors},
      {"mtow_kg", d.mtow_kg},
      {"current_limit_a", d.current_limit_a},
      {"air_density", c.environment.air_density},
  };
  if (d.loaded_rpm) v["loaded_rpm"] = *d.loaded_rpm;
  for (const auto& [k, val] : c.vars) v[k] = val;
  return v;
}

// ---------------------------------------------------------------------------
// Oracle expressions: {"op": name, "args": {...}}
// ---------------------------------------------------------------------------

class Evaluator {
 public:
  Evaluator(const QuestionBank& bank, const Bindings& vars) : bank_(bank), vars_(vars) {}

  double eval(const Node& n) const {
    const json& j = n.raw();
    if (j.is_number()) return n.num();
    if (j.is_string()) {
      const auto name = whole_placeholder(j.get<std::string>());
      if (!name) n.fail("expected a number, placeholder or oracle expression");
      auto it = vars_.find(*name);
      if (it == vars_.end()) n.fail("unbound placeholder {" + *name + "}");
      if (!it->second.is_number()) n.fail("placeholder {" + *name + "} is not numeric");
      return it->second.get<double>();
    }
    if (j.is_object() && j.contains("op")) return op(n);
    n.fail("expected a number, placeholder or oracle expression");
  }

  std::string text(const Node& n) const {
    if (!n.raw().is_string()) n.fail("expected a string");
    const std::string s = n.str();
    if (auto name = whole_placeholder(s)) {
      auto it = vars_.find(*name);
      if (it == vars_.end()) n.fail("unbound placeholder {" + *name + "}");
      return render_value(it->second);
    }
    return s;
  }

 private:
  struct Args {
    const Evaluator& ev;
    Node node;

    double num(std::string_view key) const { return ev.eval(node.at(key)); }
    std::optional<double> opt(std::string_view key) const {
      if (auto n = node.find(key)) return ev.eval(*n);
      return std::nullopt;
    }
    std::string str(std::string_view key) const { return ev.text(node.at(key)); }
    int integer(std::string_view key) const {
      const double v = num(key);
      if (std::floor(v) != v) node.at(key).fail("expected an integer");
      return static_cast<int>(v);
    }
    double length_m(std::string_view stem) const {
      std::optional<double> out;
      for (const auto& s : codec::kLengthSpellings) {
        const std::string key = std::string(stem) + std::string(s.suffix);
        if (auto n = node.find(key)) {
          if (out) n->fail("'" + key + "' duplicates another unit spelling");
          out = ev.eval(*n) * s.factor;
        }
      }
      if (!out) node.fail("missing '" + std::string(stem) + "_in' or '" + std::string(stem) + "_m'");
      return *out;
    }
  };

  double ct_arg(const Args& a) const {
    if (a.node.has("ct")) return a.num("ct");
    if (a.node.has("prop")) {
      const std::string id = a.str("prop");
      const auto* p = bank_.propellers.find(id);
      if (!p) a.node.at("prop").fail("unknown propeller '" + id + "'");
      return p->ct;
    }
    return bank_.propellers.default_ct();
  }

  oracle::Design context_design(const Args& a) const {
    const std::string id = a.str("context");
    const auto* c = bank_.context(id);
    if (!c) a.node.at("context").fail("unknown context '" + id + "'");
    oracle::Design d = c->design;
    if (auto o = a.node.find("override")) {
      codec::apply_design_fields(*o, d);
      if (!o->has("thrust_coefficient")) bank_.propellers.apply(d);
    }
    return d;
  }

  double op(const Node& n) const {
    n.only({"op", "args"});
    const std::string name = n.at("op").str();
    const Args a{*this, n.find("args") ? n.at("args") : n};
    const double env_rho = oracle::kDefaultAirDensity;
    const double env_g = oracle::kDefaultGravity;
    auto rho = [&] { return a.opt("air_density").value_or(env_rho); };
    try {
      if (name == "no_load_rpm") return oracle::no_load_rpm(a.num("kv"), a.num("voltage_v"));
      if (name == "torque_constant") return oracle::torque_constant(a.num("kv"));
      if (name == "max_torque") return oracle::max_torque(a.num("kv"), a.num("current_a"));
      if (name == "static_thrust") return oracle::static_thrust(ct_arg(a), rho(), a.num("rpm"), a.length_m("diameter"));
      if (name == "calibrate_ct") return oracle::calibrate_ct(a.num("thrust_n"), rho(), a.num("rpm"), a.length_m("diameter"));
      if (name == "prop_ct") return ct_arg(a);
      if (name == "thrust_scale_factor") return oracle::thrust_scale_factor(a.length_m("d1"), a.length_m("d2"));
      if (name == "required_thrust_per_motor")
        return oracle::required_thrust_per_motor(a.num("mtow_kg"), a.integer("n_motors"), a.opt("gravity").value_or(env_g));
      if (name == "disk_area_total") return a.integer("n_motors") * oracle::disk_area(a.length_m("diameter"));
      if (name == "ideal_hover_power")
        return oracle::ideal_hover_power(a.num("total_thrust_n"), rho(), a.num("disk_area_total_m2"), a.num("eta"));
      if (name == "hover_endurance")
        return oracle::hover_endurance(a.num("capacity_ah"), a.num("voltage_v"), a.num("eta_batt"), a.num("power_w"));
      if (name == "pack_nominal_voltage") return oracle::pack_nominal_voltage(a.integer("cells"));
      if (name == "pack_min_voltage") return oracle::pack_min_voltage(a.integer("cells"));
      if (name == "pack_max_voltage") return oracle::pack_max_voltage(a.integer("cells"));
      if (name == "design_metric") return design_metric(a);
      if (name == "mul") return a.num("a") * a.num("b");
      if (name == "div") {
        const double b = a.num("b");
        if (b == 0.0) a.node.at("b").fail("division by zero");
        return a.num("a") / b;
      }
      if (name == "sub") return a.num("a") - a.num("b");
      if (name == "relative_drop") {
        const double from = a.num("from");
        if (from == 0.0) a.node.at("from").fail("relative change from zero");
        return (from - a.num("to")) / from;
      }
    } catch (const DomainError& e) {
      std::string fed;
      for (const auto& [key, arg] : a.node.members())
        if (arg.raw().is_string())
          if (auto ph = whole_placeholder(arg.raw().get<std::string>())) fed += (fed.empty() ? "" : ", ") + ("{" + *ph + "}");
      n.fail("oracle op '" + name + "' failed" + (fed.empty() ? "" : " (placeholders " + fed + ")") + ": " + e.what());
    }
    n.at("op").fail("unknown oracle op '" + name + "'");
  }

  double design_metric(const Args& a) const {
    const std::string id = a.str("context");
    const auto* c = bank_.context(id);
    if (!c) a.node.at("context").fail("unknown context '" + id + "'");
    const auto d = context_design(a);
    const auto p = oracle::evaluate_design(d, c->environment, {});
    const std::string m = a.str("metric");
    if (m == "no_load_rpm") return p.no_load_rpm;
    if (m == "torque_constant") return p.torque_constant;
    if (m == "max_torque") return p.max_torque;
    if (m == "static_thrust_per_motor") return p.static_thrust_per_motor;
    if (m == "required_thrust_per_motor") return p.required_thrust_per_motor;
    if (m == "thrust_margin") return p.thrust_margin();
    if (m == "disk_area_total") return p.disk_area_total;
    if (m == "hover_power_total") return p.hover_power_total;
    if (m == "hover_current_per_motor") return p.hover_current_per_motor;
    if (m == "endurance_min") return p.endurance_min;
    a.node.at("metric").fail("unknown design metric '" + m + "'");
  }

  const QuestionBank& bank_;
  const Bindings& vars_;
};

// Walks an answer template: oracle expressions become numbers, whole-string
// numeric placeholders become numbers, other strings are substituted.
inline json ground(const Node& n, const Evaluator& ev, const Bindings& vars) {
  const json& j = n.raw();
  if (j.is_object()) {
    if (j.contains("op")) return ev.eval(n);
    json out = json::object();
    for (const auto& [key, child] : n.members()) out[key] = ground(child, ev, vars);
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& child : n.items()) out.push_back(ground(child, ev, vars));
    return out;
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (auto name = whole_placeholder(s)) {
      auto it = vars.find(*name);
      if (it == vars.end()) n.fail("unbound placeholder {" + *name + "}");
      return it->second;
    }
    return substitute(s, vars, n);
  }
  return j;
}

// Resolves bank references inside fix / design answers: base designs given
// as {"context": id, "override": {...}}, grid ids, and the default
// environment and propeller catalog.
inline void expand_references(json& answer, const Node& where, const QuestionBank& bank,
                              const DesignContext* ctx) {
  const std::string kind = answer.value("kind", "");
  if (kind != "fix" && kind != "design") return;

  const DesignContext* base_ctx = ctx;
  if (answer.contains("base_design")) {
    json& base = answer["base_design"];
    if (base.is_object() && base.contains("context")) {
      const std::string id = base["context"].get<std::string>();
      base_ctx = bank.context(id);
      if (!base_ctx) where.fail("unknown context '" + id + "'");
    } else if (!base.is_object()) {
      where.fail("base_design must be an object");
    } else {
      base_ctx = nullptr;
    }
  }
  oracle::Design design;
  if (base_ctx) {
    design = base_ctx->design;
    if (answer.contains("base_design") && answer["base_design"].contains("override")) {
      const json override = answer["base_design"]["override"];
      codec::apply_design_fields(Node(override, where.path() + "/base_design/override"), design);
      if (!override.contains("thrust_coefficient")) bank.propellers.apply(design);
    }
  } else if (answer.contains("base_design")) {
    const json raw = answer["base_design"];
    design = codec::design_from_json(Node(raw, where.path() + "/base_design"));
    if (!raw.contains("thrust_coefficient")) bank.propellers.apply(design);
  } else {
    where.fail("answer needs 'base_design' or a template context");
  }
  answer["base_design"] = codec::to_json(design);

  if (!answer.contains("environment"))
    answer["environment"] = codec::to_json(base_ctx ? base_ctx->environment : oracle::Environment{});
  if (!answer.contains("propellers")) answer["propellers"] = codec::to_json(bank.propellers);

  if (kind == "design" && answer.contains("grid") && answer["grid"].is_string()) {
    const std::string id = answer["grid"].get<std::string>();
    auto it = bank.grids.find(id);
    if (it == bank.grids.end()) where.fail("unknown grid '" + id + "'");
    answer["grid"] = codec::to_json(it->second);
  }
}

}  // namespace bank_detail

// Grounds one template against its context and a binding map.
inline QuestionInstance instantiate(const QuestionBank& bank, const QuestionTemplate& t, const Bindings& bindings,
                                    std::string instance_id = {}) {
  const Node where(t.answer_template, t.source_path + "/answer");
  const DesignContext* ctx = nullptr;
  if (t.context_ref) {
    ctx = bank.context(*t.context_ref);
    if (!ctx) throw SchemaError(t.source_path + "/context", "unknown context '" + *t.context_ref + "'");
  }
  Bindings vars = ctx ? bank_detail::context_vars(*ctx) : Bindings{};
  for (const auto& [k, v] : bindings) vars[k] = v;

  QuestionInstance inst;
  inst.id = instance_id.empty() ? t.id : std::move(instance_id);
  inst.level = t.level;
  inst.tags = t.tags;
  const json pattern_json = t.pattern;
  inst.prompt = bank_detail::substitute(t.pattern, vars, Node(pattern_json, t.source_path + "/pattern"));
  if (ctx && !ctx->description.empty()) inst.prompt = ctx->description + "\n\n" + inst.prompt;

  const bank_detail::Evaluator ev(bank, vars);
  json grounded = bank_detail::ground(where, ev, vars);
  bank_detail::expand_references(grounded, where, bank, ctx);
  if (grounded.value("kind", "") == "diagnosis" && !grounded.contains("cause_keywords"))
    grounded["cause_keywords"] = bank.causes;

  try {
    inst.answer_spec = answer_spec_from_json(Node(grounded, where.path()));
  } catch (const DomainError& e) {
    where.fail(e.what());
  }
  inst.provenance = {t.id, bindings};
  return inst;
}

// Bank-level checks that need the oracle: fix items must start failing, and
// synthesis items must have a usable base design.
inline void validate_instance(const QuestionInstance& inst, const std::string& path) {
  try {
    if (const auto* fix = std::get_if<FixSpec>(&inst.answer_spec)) {
      const auto report = oracle::evaluate_design(fix->base_design, fix->environment, fix->requirements);
      if (report.check(fix->failing_requirement)->passed)
        throw SchemaError(path + "/answer/failing_requirement", "requirement '" + fix->failing_requirement +
                                                                    "' already passes on the base design");
    }
    if (const auto* syn = std::get_if<DesignSynthesisSpec>(&inst.answer_spec)) oracle::validate(syn->base_design);
  } catch (const DomainError& e) {
    throw SchemaError(path + "/answer", std::string("base design: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

namespace bank_detail {

inline PropellerCatalog catalog(const Node& n) {
  std::vector<PropellerEntry> entries;
  std::set<std::string> ids;
  for (const auto& e : n.at("entries").items()) {
    e.only({"id", "diameter_in", "diameter_m", "diameter_mm", "pitch_in", "pitch_m", "pitch_mm", "ct", "calibration",
            "note"});
    PropellerEntry p;
    p.id = e.at("id").str();
    if (!ids.insert(p.id).second) e.at("id").fail("duplicate propeller id '" + p.id + "'");
    if (auto v = codec::read_suffixed(e, "diameter", codec::kLengthSpellings)) p.diameter_m = *v;
    else e.fail("missing diameter");
    if (auto v = codec::read_suffixed(e, "pitch", codec::kLengthSpellings)) p.pitch_m = *v;
    else e.fail("missing pitch");
    if (e.has("ct") == e.has("calibration")) e.fail("give exactly one of 'ct' or 'calibration'");
    try {
      if (auto c = e.find("ct")) {
        p.ct = c->num();
      } else {
        const Node cal = e.at("calibration");
        cal.only({"thrust_n", "rpm", "air_density_kg_m3"});
        const double rho = cal.find("air_density_kg_m3") ? cal.at("air_density_kg_m3").num() : oracle::kDefaultAirDensity;
        p.ct = oracle::calibrate_ct(cal.at("thrust_n").num(), rho, cal.at("rpm").num(), p.diameter_m);
      }
      if (!(p.ct > 0)) e.fail("ct must be positive");
    } catch (const DomainError& err) {
      e.fail(err.what());
    }
    entries.push_back(std::move(p));
  }
  const Node def = n.at("default");
  const std::string default_id = def.str();
  for (const auto& p : entries)
    if (p.id == default_id) return PropellerCatalog(entries, p.ct);
  def.fail("default propeller '" + default_id + "' is not in the catalog");
}

inline Bindings bindings_from(const Node& n) {
  Bindings b;
  for (const auto& [k, v] : n.members()) {
    if (!v.raw().is_number() && !v.raw().is_string()) v.fail("binding values must be numbers or strings");
    b[k] = v.raw();
  }
  return b;
}

}  // namespace bank_detail

inline QuestionBank load_bank_json(const json& doc) {
  const Node root(doc, "");
  root.only({"schema_version", "description", "propellers", "causes", "contexts", "grids", "templates"});
  QuestionBank bank;
  const Node ver = root.at("schema_version");
  bank.schema_version = ver.integer();
  if (bank.schema_version != kBankSchemaVersion)
    ver.fail("unsupported schema_version " + std::to_string(bank.schema_version));

  if (auto p = root.find("propellers")) bank.propellers = bank_detail::catalog(*p);

  if (auto c = root.find("causes"))
    for (const auto& [id, kw] : c->members()) {
      bank.causes[id] = kw.strings();
      if (bank.causes[id].empty()) kw.fail("cause '" + id + "' needs at least one keyword");
    }

  if (auto cs = root.find("contexts"))
    for (const auto& c : cs->items()) {
      c.only({"id", "description", "design", "environment", "vars", "note"});
      DesignContext ctx;
      ctx.id = c.at("id").str();
      if (bank.contexts.contains(ctx.id)) c.at("id").fail("duplicate context id '" + ctx.id + "'");
      if (auto d = c.find("description")) ctx.description = d->str();
      const Node dn = c.at("design");
      ctx.design = codec::design_from_json(dn);
      if (!dn.has("thrust_coefficient")) bank.propellers.apply(ctx.design);
      if (auto e = c.find("environment")) ctx.environment = codec::environment_from_json(*e);
      if (auto v = c.find("vars")) ctx.vars = bank_detail::bindings_from(*v);
      try {
        oracle::validate(ctx.design);
        oracle::validate(ctx.environment);
      } catch (const DomainError& e) {
        dn.fail(e.what());
      }
      bank.contexts.emplace(ctx.id, std::move(ctx));
    }

  if (auto gs = root.find("grids"))
    for (const auto& g : gs->items()) {
      auto grid = codec::grid_from_json(g);
      if (bank.grids.contains(grid.id)) g.at("id").fail("duplicate grid id '" + grid.id + "'");
      bank.grids.emplace(grid.id, std::move(grid));
    }

  std::set<std::string> template_ids;
  std::set<std::string> instance_ids;
  for (const auto& tn : root.at("templates").items()) {
    tn.only({"id", "level", "tags", "context", "pattern", "bindings", "answer", "note"});
    QuestionTemplate t;
    t.source_path = tn.path();
    t.id = tn.at("id").str();
    if (!template_ids.insert(t.id).second) tn.at("id").fail("duplicate template id '" + t.id + "'");
    const Node lvl = tn.at("level");
    if (lvl.raw().is_number()) {
      const int o = lvl.integer();
      if (o < 1 || o > 6) lvl.fail("level ordinal must lie in 1..6");
      t.level = level_from_ordinal(o);
    } else {
      t.level = codec::enum_from<CognitionLevel>(lvl, "cognition level");
    }
    t.tags = codec::tags_from_json(tn.at("tags"));
    if (auto c = tn.find("context")) t.context_ref = c->str();
    t.pattern = tn.at("pattern").str();
    t.answer_template = tn.at("answer").raw();
    if (auto bs = tn.find("bindings")) {
      for (const auto& b : bs->items()) t.bindings.push_back(bank_detail::bindings_from(b));
      if (t.bindings.empty()) bs->fail("bindings must not be empty when present");
    } else {
      t.bindings.push_back({});
    }
    for (std::size_t k = 0; k < t.bindings.size(); ++k) {
      std::string id = t.bindings.size() == 1 ? t.id : t.id + "/" + std::to_string(k + 1);
      auto inst = instantiate(bank, t, t.bindings[k], id);
      validate_instance(inst, t.source_path);
      if (!instance_ids.insert(inst.id).second) tn.at("id").fail("duplicate instance id '" + inst.id + "'");
      bank.instances.push_back(std::move(inst));
    }
    bank.templates.push_back(std::move(t));
  }
  return bank;
}

// Parses and validates a bank document. Any error rejects the whole file with
// the source line of the offending value.
inline QuestionBank load_bank(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw BankError(LineIndex::line_at(text, e.byte > 0 ? e.byte - 1 : 0), std::string("malformed JSON: ") + e.what());
  }
  try {
    return load_bank_json(doc);
  } catch (const SchemaError& e) {
    const LineIndex index(text);
    throw BankError(index.line_of(e.path()), e.what());
  }
}

}  // namespace eagi
