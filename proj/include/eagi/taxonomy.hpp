#pragma once

// Cognition levels, complexity profiles and the metadata tag schema.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace eagi {

enum class CognitionLevel : std::uint8_t {
  Remember = 1,
  Understand = 2,
  Apply = 3,
  Analyze = 4,
  Create = 5,
  Reflect = 6,
};

inline constexpr std::array<CognitionLevel, 6> kAllLevels = {
    CognitionLevel::Remember, CognitionLevel::Understand, CognitionLevel::Apply,
    CognitionLevel::Analyze,  CognitionLevel::Create,     CognitionLevel::Reflect};

constexpr int ordinal(CognitionLevel level) { return static_cast<int>(level); }

inline CognitionLevel level_from_ordinal(int n) {
  if (n < 1 || n > 6) throw std::out_of_range("cognition level ordinal out of range: " + std::to_string(n));
  return static_cast<CognitionLevel>(n);
}

enum class Directionality : std::uint8_t { Forward, ForwardPartialInverse, ForwardInverse, Bidirectional };
enum class DesignBehavior : std::uint8_t { NotApplicable, Static, StaticDynamic };
enum class ProblemScope : std::uint8_t { ClosedWorld, SemiOpenWorld, OpenWorld };

struct ComplexityProfile {
  Directionality directionality;
  DesignBehavior behavior;
  ProblemScope scope;

  friend constexpr bool operator==(const ComplexityProfile&, const ComplexityProfile&) = default;
};

constexpr ComplexityProfile level_profile(CognitionLevel level) {
  switch (level) {
    case CognitionLevel::Remember:
      return {Directionality::Forward, DesignBehavior::NotApplicable, ProblemScope::ClosedWorld};
    case CognitionLevel::Understand:
      return {Directionality::Forward, DesignBehavior::Static, ProblemScope::ClosedWorld};
    case CognitionLevel::Apply:
      return {Directionality::Forward, DesignBehavior::StaticDynamic, ProblemScope::ClosedWorld};
    case CognitionLevel::Analyze:
      return {Directionality::ForwardPartialInverse, DesignBehavior::StaticDynamic, ProblemScope::ClosedWorld};
    case CognitionLevel::Create:
      return {Directionality::ForwardInverse, DesignBehavior::StaticDynamic, ProblemScope::SemiOpenWorld};
    case CognitionLevel::Reflect:
      return {Directionality::Bidirectional, DesignBehavior::StaticDynamic, ProblemScope::OpenWorld};
  }
  return {Directionality::Forward, DesignBehavior::NotApplicable, ProblemScope::ClosedWorld};
}

enum class SystemType : std::uint8_t { eVTOL, HVAC, Spacecraft, Energy, Robotics };
enum class DesignScope : std::uint8_t { Component, Subsystem, System };
enum class PhysicsDomain : std::uint8_t { Thermal, Electrical, Control, Structural, FluidAirflow, Aerodynamics };
enum class ModelingRequirement : std::uint8_t { SteadyState, Transient, Linear, Nonlinear, Multiphysics };

// ---------------------------------------------------------------------------
// Names. These strings are the serialized form in bank files and reports and
// are matched case-sensitively.
// ---------------------------------------------------------------------------

namespace detail {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

inline constexpr NameTable<CognitionLevel, 6> kLevelNames{{
    {CognitionLevel::Remember, "Remember"},
    {CognitionLevel::Understand, "Understand"},
    {CognitionLevel::Apply, "Apply"},
    {CognitionLevel::Analyze, "Analyze"},
    {CognitionLevel::Create, "Create"},
    {CognitionLevel::Reflect, "Reflect"},
}};

inline constexpr NameTable<Directionality, 4> kDirectionalityNames{{
    {Directionality::Forward, "Forward"},
    {Directionality::ForwardPartialInverse, "ForwardPartialInverse"},
    {Directionality::ForwardInverse, "ForwardInverse"},
    {Directionality::Bidirectional, "Bidirectional"},
}};

inline constexpr NameTable<DesignBehavior, 3> kBehaviorNames{{
    {DesignBehavior::NotApplicable, "NotApplicable"},
    {DesignBehavior::Static, "Static"},
    {DesignBehavior::StaticDynamic, "StaticDynamic"},
}};

inline constexpr NameTable<ProblemScope, 3> kScopeNames{{
    {ProblemScope::ClosedWorld, "ClosedWorld"},
    {ProblemScope::SemiOpenWorld, "SemiOpenWorld"},
    {ProblemScope::OpenWorld, "OpenWorld"},
}};

inline constexpr NameTable<SystemType, 5> kSystemTypeNames{{
    {SystemType::eVTOL, "eVTOL"},
    {SystemType::HVAC, "HVAC"},
    {SystemType::Spacecraft, "Spacecraft"},
    {SystemType::Energy, "Energy"},
    {SystemType::Robotics, "Robotics"},
}};

inline constexpr NameTable<DesignScope, 3> kDesignScopeNames{{
    {DesignScope::Component, "Component"},
    {DesignScope::Subsystem, "Subsystem"},
    {DesignScope::System, "System"},
}};

inline constexpr NameTable<PhysicsDomain, 6> kDomainNames{{
    {PhysicsDomain::Thermal, "Thermal"},
    {PhysicsDomain::Electrical, "Electrical"},
    {PhysicsDomain::Control, "Control"},
    {PhysicsDomain::Structural, "Structural"},
    {PhysicsDomain::FluidAirflow, "FluidAirflow"},
    {PhysicsDomain::Aerodynamics, "Aerodynamics"},
}};

inline constexpr NameTable<ModelingRequirement, 5> kModelingNames{{
    {ModelingRequirement::SteadyState, "SteadyState"},
    {ModelingRequirement::Transient, "Transient"},
    {ModelingRequirement::Linear, "Linear"},
    {ModelingRequirement::Nonlinear, "Nonlinear"},
    {ModelingRequirement::Multiphysics, "Multiphysics"},
}};

template <typename E, std::size_t N>
constexpr std::string_view name_of(const NameTable<E, N>& table, E value) {
  for (const auto& [e, s] : table)
    if (e == value) return s;
  return "?";
}

template <typename E, std::size_t N>
constexpr std::optional<E> parse_name(const NameTable<E, N>& table, std::string_view s) {
  for (const auto& [e, name] : table)
    if (name == s) return e;
  return std::nullopt;
}

}  // namespace detail

constexpr std::string_view to_string(CognitionLevel v) { return detail::name_of(detail::kLevelNames, v); }
constexpr std::string_view to_string(Directionality v) { return detail::name_of(detail::kDirectionalityNames, v); }
constexpr std::string_view to_string(DesignBehavior v) { return detail::name_of(detail::kBehaviorNames, v); }
constexpr std::string_view to_string(ProblemScope v) { return detail::name_of(detail::kScopeNames, v); }
constexpr std::string_view to_string(SystemType v) { return detail::name_of(detail::kSystemTypeNames, v); }
constexpr std::string_view to_string(DesignScope v) { return detail::name_of(detail::kDesignScopeNames, v); }
constexpr std::string_view to_string(PhysicsDomain v) { return detail::name_of(detail::kDomainNames, v); }
constexpr std::string_view to_string(ModelingRequirement v) { return detail::name_of(detail::kModelingNames, v); }

// parse<E>(name) returns nullopt for unknown names; callers decide how to fail.
template <typename E>
std::optional<E> parse(std::string_view s);

template <> inline std::optional<CognitionLevel> parse(std::string_view s) { return detail::parse_name(detail::kLevelNames, s); }
template <> inline std::optional<SystemType> parse(std::string_view s) { return detail::parse_name(detail::kSystemTypeNames, s); }
template <> inline std::optional<DesignScope> parse(std::string_view s) { return detail::parse_name(detail::kDesignScopeNames, s); }
template <> inline std::optional<PhysicsDomain> parse(std::string_view s) { return detail::parse_name(detail::kDomainNames, s); }
template <> inline std::optional<ModelingRequirement> parse(std::string_view s) { return detail::parse_name(detail::kModelingNames, s); }

// ---------------------------------------------------------------------------
// Tags and filters
// ---------------------------------------------------------------------------

struct TagSet {
  SystemType system_type = SystemType::eVTOL;
  DesignScope design_scope = DesignScope::Subsystem;
  std::set<PhysicsDomain> domains;
  std::set<ModelingRequirement> modeling;
  std::set<std::string> standards;

  friend bool operator==(const TagSet&, const TagSet&) = default;
};

struct LevelRange {
  int lo = 1;
  int hi = 6;

  constexpr bool contains(CognitionLevel level) const { return ordinal(level) >= lo && ordinal(level) <= hi; }
  friend constexpr bool operator==(const LevelRange&, const LevelRange&) = default;
};

// Each populated field is an any-of constraint; fields combine conjunctively.
// An empty set means "unconstrained", as does an absent level range.
struct TagFilter {
  std::set<SystemType> system_type;
  std::set<DesignScope> design_scope;
  std::set<PhysicsDomain> domains;
  std::set<ModelingRequirement> modeling;
  std::set<std::string> standards;
  std::optional<LevelRange> levels;

  bool empty() const {
    return system_type.empty() && design_scope.empty() && domains.empty() && modeling.empty() &&
           standards.empty() && !levels;
  }

  friend bool operator==(const TagFilter&, const TagFilter&) = default;
};

namespace detail {

template <typename T>
bool any_of_set(const std::set<T>& wanted, const std::set<T>& have) {
  if (wanted.empty()) return true;
  return std::any_of(wanted.begin(), wanted.end(), [&](const T& w) { return have.contains(w); });
}

template <typename T>
bool any_of_value(const std::set<T>& wanted, const T& have) {
  return wanted.empty() || wanted.contains(have);
}

}  // namespace detail

inline bool matches(const TagSet& tags, CognitionLevel level, const TagFilter& filter) {
  return detail::any_of_value(filter.system_type, tags.system_type) &&
         detail::any_of_value(filter.design_scope, tags.design_scope) &&
         detail::any_of_set(filter.domains, tags.domains) &&
         detail::any_of_set(filter.modeling, tags.modeling) &&
         detail::any_of_set(filter.standards, tags.standards) &&
         (!filter.levels || filter.levels->contains(level));
}

}  // namespace eagi
