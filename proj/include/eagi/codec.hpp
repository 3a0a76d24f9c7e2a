#pragma once

// JSON encoding of the domain types. Every dimensional field carries its unit
// in the key (prop_diameter_in, prop_diameter_m, battery_capacity_mah, ...);
// a quantity spelled twice with different units is rejected.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "eagi/design_space.hpp"
#include "eagi/json_util.hpp"
#include "eagi/oracle.hpp"
#include "eagi/propellers.hpp"
#include "eagi/taxonomy.hpp"
#include "eagi/units.hpp"

namespace eagi::codec {

using oracle::Design;
using oracle::Environment;
using oracle::Requirement;
using oracle::RequirementSet;

// ---------------------------------------------------------------------------
// Unit-suffixed quantities
// ---------------------------------------------------------------------------

struct Spelling {
  std::string_view suffix;
  double factor;  // into the reference unit
};

inline constexpr Spelling kLengthSpellings[] = {{"_m", 1.0}, {"_in", units::kMetersPerInch}, {"_mm", 0.001}};
inline constexpr Spelling kCapacitySpellings[] = {{"_ah", 1.0}, {"_mah", 0.001}};

// Reads `<stem><suffix>` for exactly one suffix; nullopt when none is present.
template <std::size_t N>
std::optional<double> read_suffixed(const Node& obj, std::string_view stem, const Spelling (&spellings)[N]) {
  std::optional<double> value;
  std::string seen;
  for (const auto& s : spellings) {
    const std::string key = std::string(stem) + std::string(s.suffix);
    if (auto n = obj.find(key)) {
      if (value) n->fail("'" + key + "' conflicts with '" + seen + "'");
      value = n->num() * s.factor;
      seen = key;
    }
  }
  return value;
}

template <std::size_t N>
bool is_suffixed_key(const std::string& key, std::string_view stem, const Spelling (&spellings)[N]) {
  for (const auto& s : spellings)
    if (key == std::string(stem) + std::string(s.suffix)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Design
// ---------------------------------------------------------------------------

// A partial design: field name (as spelled in the document) -> value in that
// field's unit. Used for bank overrides, fix patches and design answers.
using Patch = std::map<std::string, double>;

inline bool is_design_key(const std::string& key) {
  static const std::set<std::string> plain = {
      "kv_rpm_per_v", "current_limit_a", "battery_cells",      "battery_voltage_v",     "n_motors",
      "mtow_kg",      "thrust_coefficient", "propulsive_efficiency", "battery_efficiency", "loaded_rpm"};
  return plain.contains(key) || is_suffixed_key(key, "prop_diameter", kLengthSpellings) ||
         is_suffixed_key(key, "prop_pitch", kLengthSpellings) || is_suffixed_key(key, "footprint", kLengthSpellings) ||
         is_suffixed_key(key, "battery_capacity", kCapacitySpellings);
}

// Applies each present field of `obj` onto `d`. Changing the cell count
// without a voltage sets the nominal LiPo voltage.
inline void apply_design_fields(const Node& obj, Design& d) {
  for (const auto& [key, n] : obj.members())
    if (!is_design_key(key)) n.fail("unknown design field '" + key + "'");
  if (auto n = obj.find("kv_rpm_per_v")) d.kv_rpm_per_v = n->num();
  if (auto n = obj.find("current_limit_a")) d.current_limit_a = n->num();
  if (auto n = obj.find("battery_cells")) {
    d.battery_cells = n->integer();
    if (!obj.has("battery_voltage_v")) d.battery_voltage_v = oracle::kLipoNominalCellVoltage * d.battery_cells;
  }
  if (auto n = obj.find("battery_voltage_v")) d.battery_voltage_v = n->num();
  if (auto v = read_suffixed(obj, "battery_capacity", kCapacitySpellings)) d.battery_capacity_ah = *v;
  if (auto v = read_suffixed(obj, "prop_diameter", kLengthSpellings)) d.prop_diameter_m = *v;
  if (auto v = read_suffixed(obj, "prop_pitch", kLengthSpellings)) d.prop_pitch_m = *v;
  if (auto n = obj.find("n_motors")) d.n_motors = n->integer();
  if (auto n = obj.find("mtow_kg")) d.mtow_kg = n->num();
  if (auto n = obj.find("thrust_coefficient")) d.thrust_coefficient = n->num();
  if (auto n = obj.find("propulsive_efficiency")) d.propulsive_efficiency = n->num();
  if (auto n = obj.find("battery_efficiency")) d.battery_efficiency = n->num();
  if (auto n = obj.find("loaded_rpm")) d.loaded_rpm = n->num();
  if (auto v = read_suffixed(obj, "footprint", kLengthSpellings)) d.footprint_m = *v;
}

inline json patch_to_json(const Patch& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

inline Patch patch_from_json(const Node& n) {
  Patch p;
  for (const auto& [key, v] : n.members()) p[key] = v.num();
  return p;
}

// SI spelling used when writing instance and report documents.
inline json to_json(const Design& d) {
  json j = {
      {"kv_rpm_per_v", d.kv_rpm_per_v},
      {"current_limit_a", d.current_limit_a},
      {"battery_cells", d.battery_cells},
      {"battery_voltage_v", d.battery_voltage_v},
      {"battery_capacity_ah", d.battery_capacity_ah},
      {"prop_diameter_m", d.prop_diameter_m},
      {"prop_pitch_m", d.prop_pitch_m},
      {"n_motors", d.n_motors},
      {"mtow_kg", d.mtow_kg},
      {"thrust_coefficient", d.thrust_coefficient},
      {"propulsive_efficiency", d.propulsive_efficiency},
      {"battery_efficiency", d.battery_efficiency},
  };
  if (d.loaded_rpm) j["loaded_rpm"] = *d.loaded_rpm;
  if (d.footprint_m) j["footprint_m"] = *d.footprint_m;
  return j;
}

inline Design design_from_json(const Node& n) {
  Design d;
  apply_design_fields(n, d);
  return d;
}

inline json to_json(const Environment& e) { return {{"air_density_kg_m3", e.air_density}, {"gravity_m_s2", e.gravity}}; }

inline Environment environment_from_json(const Node& n) {
  n.only({"air_density_kg_m3", "gravity_m_s2"});
  Environment e;
  if (auto v = n.find("air_density_kg_m3")) e.air_density = v->num();
  if (auto v = n.find("gravity_m_s2")) e.gravity = v->num();
  return e;
}

// ---------------------------------------------------------------------------
// Requirements
// ---------------------------------------------------------------------------

inline json to_json(const Requirement& r) {
  return {{"id", r.id},
          {"kind", oracle::to_string(r.kind)},
          {"bound", {{"value", r.bound}, {"unit", oracle::bound_unit(r.kind)}}}};
}

inline Requirement requirement_from_json(const Node& n) {
  n.only({"id", "kind", "bound", "note"});
  Requirement r;
  r.id = n.at("id").str();
  const Node kind = n.at("kind");
  const auto k = oracle::parse_requirement_kind(kind.str());
  if (!k) kind.fail("unknown requirement kind '" + kind.str() + "'");
  r.kind = *k;
  const Node bound = n.at("bound");
  bound.only({"value", "unit"});
  const double value = bound.at("value").num();
  const Node unit = bound.at("unit");
  const std::string u = unit.str();
  if (r.kind == oracle::RequirementKind::VoltageClass && units::lookup(u) &&
      units::lookup(u)->dimension == units::Dimension::Voltage) {
    // A voltage class given in volts names the LiPo cell count.
    r.bound = std::round(value / oracle::kLipoNominalCellVoltage);
  } else {
    const auto converted = units::convert(value, u, oracle::bound_unit(r.kind));
    if (!converted) unit.fail("unit '" + u + "' is not valid for " + kind.str());
    r.bound = *converted;
  }
  return r;
}

inline json to_json(const RequirementSet& reqs) {
  json j = json::array();
  for (const auto& r : reqs) j.push_back(to_json(r));
  return j;
}

inline RequirementSet requirements_from_json(const Node& n) {
  RequirementSet out;
  std::set<std::string> ids;
  for (const auto& item : n.items()) {
    auto r = requirement_from_json(item);
    if (!ids.insert(r.id).second) item.at("id").fail("duplicate requirement id '" + r.id + "'");
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grids and propeller catalogs
// ---------------------------------------------------------------------------

inline json to_json(const design_space::DesignGrid& g) {
  json batts = json::array();
  for (const auto& b : g.battery_options)
    batts.push_back({{"cells", b.cells}, {"voltage_v", b.voltage_v}, {"capacity_ah", b.capacity_ah}});
  return {{"id", g.id},
          {"kv_rpm_per_v", g.kv_values},
          {"prop_diameters_m", g.prop_diameters_m},
          {"prop_pitches_m", g.prop_pitches_m},
          {"batteries", batts},
          {"n_motors", g.n_motors_options}};
}

inline std::vector<double> numbers(const Node& n, double factor = 1.0) {
  std::vector<double> out;
  for (const auto& v : n.items()) out.push_back(v.num() * factor);
  return out;
}

inline design_space::DesignGrid grid_from_json(const Node& n) {
  design_space::DesignGrid g;
  g.id = n.at("id").str();
  g.kv_values = numbers(n.at("kv_rpm_per_v"));
  auto lengths = [&](std::string_view stem) {
    std::optional<std::vector<double>> out;
    for (const auto& s : kLengthSpellings) {
      const std::string key = std::string(stem) + std::string(s.suffix);
      if (auto v = n.find(key)) {
        if (out) v->fail("'" + key + "' duplicates another unit spelling");
        out = numbers(*v, s.factor);
      }
    }
    if (!out) n.fail("missing '" + std::string(stem) + "_in' or '" + std::string(stem) + "_m'");
    return *out;
  };
  g.prop_diameters_m = lengths("prop_diameters");
  g.prop_pitches_m = lengths("prop_pitches");
  for (const auto& b : n.at("batteries").items()) {
    design_space::BatteryOption opt;
    opt.cells = b.at("cells").integer();
    opt.voltage_v = b.find("voltage_v") ? b.at("voltage_v").num() : oracle::pack_nominal_voltage(opt.cells);
    if (auto c = read_suffixed(b, "capacity", kCapacitySpellings)) opt.capacity_ah = *c;
    else b.fail("missing 'capacity_ah'");
    g.battery_options.push_back(opt);
  }
  for (const auto& m : n.at("n_motors").items()) g.n_motors_options.push_back(m.integer());
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
  return g;
}

inline json to_json(const PropellerCatalog& c) {
  json entries = json::array();
  for (const auto& e : c.entries())
    entries.push_back({{"id", e.id}, {"diameter_m", e.diameter_m}, {"pitch_m", e.pitch_m}, {"ct", e.ct}});
  return {{"default_ct", c.default_ct()}, {"entries", entries}};
}

inline PropellerCatalog catalog_from_json(const Node& n) {
  std::vector<PropellerEntry> entries;
  for (const auto& e : n.at("entries").items()) {
    PropellerEntry p;
    p.id = e.at("id").str();
    if (auto v = read_suffixed(e, "diameter", kLengthSpellings)) p.diameter_m = *v;
    else e.fail("missing diameter");
    if (auto v = read_suffixed(e, "pitch", kLengthSpellings)) p.pitch_m = *v;
    else e.fail("missing pitch");
    p.ct = e.at("ct").num();
    entries.push_back(std::move(p));
  }
  return PropellerCatalog(std::move(entries), n.at("default_ct").num());
}

// ---------------------------------------------------------------------------
// Tags and filters
// ---------------------------------------------------------------------------

template <typename E>
E enum_from(const Node& n, const char* what) {
  const auto v = parse<E>(n.str());
  if (!v) n.fail("unknown " + std::string(what) + " '" + n.str() + "'");
  return *v;
}

template <typename E>
std::set<E> enum_set_from(const Node& n, const char* what) {
  std::set<E> out;
  for (const auto& item : n.items()) out.insert(enum_from<E>(item, what));
  return out;
}

template <typename E>
json names(const std::set<E>& values) {
  json j = json::array();
  for (auto v : values) j.push_back(std::string(to_string(v)));
  return j;
}

inline json to_json(const TagSet& t) {
  return {{"system_type", std::string(to_string(t.system_type))},
          {"design_scope", std::string(to_string(t.design_scope))},
          {"domains", names(t.domains)},
          {"modeling", names(t.modeling)},
          {"standards", t.standards}};
}

inline TagSet tags_from_json(const Node& n) {
  n.only({"system_type", "design_scope", "domains", "modeling", "standards"});
  TagSet t;
  t.system_type = enum_from<SystemType>(n.at("system_type"), "system_type");
  t.design_scope = enum_from<DesignScope>(n.at("design_scope"), "design_scope");
  t.domains = enum_set_from<PhysicsDomain>(n.at("domains"), "domain");
  if (t.domains.empty()) n.at("domains").fail("domains must not be empty");
  if (auto m = n.find("modeling")) t.modeling = enum_set_from<ModelingRequirement>(*m, "modeling requirement");
  if (auto s = n.find("standards")) {
    auto v = s->strings();
    t.standards = {v.begin(), v.end()};
  }
  return t;
}

inline json to_json(const TagFilter& f) {
  json j = json::object();
  if (!f.system_type.empty()) j["system_type"] = names(f.system_type);
  if (!f.design_scope.empty()) j["design_scope"] = names(f.design_scope);
  if (!f.domains.empty()) j["domains"] = names(f.domains);
  if (!f.modeling.empty()) j["modeling"] = names(f.modeling);
  if (!f.standards.empty()) j["standards"] = f.standards;
  if (f.levels) j["levels"] = {f.levels->lo, f.levels->hi};
  return j;
}

inline LevelRange level_range_from(const Node& n) {
  const auto items = n.items();
  if (items.size() != 2) n.fail("level range must be [lo, hi]");
  LevelRange r{items[0].integer(), items[1].integer()};
  if (r.lo < 1 || r.hi > 6 || r.lo > r.hi) n.fail("level range must satisfy 1 <= lo <= hi <= 6");
  return r;
}

inline TagFilter filter_from_json(const Node& n) {
  n.only({"system_type", "design_scope", "domains", "modeling", "standards", "levels"});
  TagFilter f;
  if (auto v = n.find("system_type")) f.system_type = enum_set_from<SystemType>(*v, "system_type");
  if (auto v = n.find("design_scope")) f.design_scope = enum_set_from<DesignScope>(*v, "design_scope");
  if (auto v = n.find("domains")) f.domains = enum_set_from<PhysicsDomain>(*v, "domain");
  if (auto v = n.find("modeling")) f.modeling = enum_set_from<ModelingRequirement>(*v, "modeling requirement");
  if (auto v = n.find("standards")) {
    auto s = v->strings();
    f.standards = {s.begin(), s.end()};
  }
  if (auto v = n.find("levels")) f.levels = level_range_from(*v);
  return f;
}

// Command-line filter syntax: semicolon-separated `field=v1,v2` clauses, with
// `level=3` or `level=1-4` for the level range. Example:
//   "system_type=HVAC;domains=Thermal;modeling=Transient;level=3-4"
inline TagFilter parse_filter(std::string_view text) {
  TagFilter f;
  auto split = [](std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
      const auto end = s.find(sep, start);
      const auto piece = s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
      std::string trimmed(piece);
      trimmed.erase(0, trimmed.find_first_not_of(" \t"));
      trimmed.erase(trimmed.find_last_not_of(" \t") + 1);
      if (!trimmed.empty()) out.push_back(trimmed);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    return out;
  };
  auto bad = [&](const std::string& what) { throw std::invalid_argument("filter: " + what); };
  for (const auto& clause : split(text, ';')) {
    const auto eq = clause.find('=');
    if (eq == std::string::npos) bad("clause '" + clause + "' lacks '='");
    const std::string field = clause.substr(0, eq);
    const auto values = split(std::string_view(clause).substr(eq + 1), ',');
    if (values.empty()) bad("clause '" + clause + "' has no values");
    auto add = [&]<typename E>(std::set<E>& into, const char* what) {
      for (const auto& v : values) {
        const auto e = parse<E>(v);
        if (!e) bad(std::string("unknown ") + what + " '" + v + "'");
        into.insert(*e);
      }
    };
    if (field == "system_type") add(f.system_type, "system_type");
    else if (field == "design_scope") add(f.design_scope, "design_scope");
    else if (field == "domains" || field == "domain") add(f.domains, "domain");
    else if (field == "modeling") add(f.modeling, "modeling requirement");
    else if (field == "standards" || field == "standard") f.standards.insert(values.begin(), values.end());
    else if (field == "level" || field == "levels") {
      if (values.size() != 1) bad("level takes one value or range");
      const std::string& v = values.front();
      const auto dash = v.find('-');
      int lo = 0, hi = 0;
      try {
        lo = std::stoi(v.substr(0, dash));
        hi = dash == std::string::npos ? lo : std::stoi(v.substr(dash + 1));
      } catch (const std::logic_error&) {
        bad("level range '" + v + "' is not numeric");
      }
      if (lo < 1 || hi > 6 || lo > hi) bad("level range must satisfy 1 <= lo <= hi <= 6");
      f.levels = LevelRange{lo, hi};
    } else {
      bad("unknown field '" + field + "'");
    }
  }
  return f;
}

}  // namespace eagi::codec
