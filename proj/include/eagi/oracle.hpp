#pragma once

// Propulsion physics oracle for the eVTOL propeller-motor matching domain.
//
// All quantities are SI except where the name says otherwise: motor speed is
// in RPM, endurance in minutes, battery capacity in ampere-hours. The thrust
// equation uses n in revolutions per second.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "eagi/errors.hpp"

namespace eagi::oracle {

inline constexpr double kDefaultAirDensity = 1.225;  // kg/m^3, sea level
inline constexpr double kDefaultGravity = 9.81;      // m/s^2
inline constexpr double kLipoNominalCellVoltage = 3.7;
inline constexpr double kLipoMinCellVoltage = 3.3;
inline constexpr double kLipoMaxCellVoltage = 4.2;

namespace detail {

inline void require_positive(double v, const char* quantity) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(quantity, "must be positive and finite, got " + std::to_string(v));
}

inline void require_efficiency(double v, const char* quantity) {
  if (!(v > 0.0 && v <= 1.0)) throw DomainError(quantity, "must lie in (0, 1], got " + std::to_string(v));
}

}  // namespace detail

inline double no_load_rpm(double kv_rpm_per_v, double voltage_v) {
  detail::require_positive(kv_rpm_per_v, "kv");
  detail::require_positive(voltage_v, "voltage");
  return kv_rpm_per_v * voltage_v;
}

// Kt = 60 / (2 pi Kv), N*m/A.
inline double torque_constant(double kv_rpm_per_v) {
  detail::require_positive(kv_rpm_per_v, "kv");
  return 60.0 / (2.0 * std::numbers::pi * kv_rpm_per_v);
}

inline double max_torque(double kv_rpm_per_v, double current_limit_a) {
  detail::require_positive(current_limit_a, "current_limit");
  return torque_constant(kv_rpm_per_v) * current_limit_a;
}

// T = C_T * rho * n^2 * D^4 with n = rpm / 60.
inline double static_thrust(double ct, double air_density, double rpm, double diameter_m) {
  detail::require_positive(ct, "thrust_coefficient");
  detail::require_positive(air_density, "air_density");
  detail::require_positive(rpm, "rpm");
  detail::require_positive(diameter_m, "prop_diameter");
  const double n = rpm / 60.0;
  const double d2 = diameter_m * diameter_m;
  return ct * air_density * n * n * d2 * d2;
}

// Inverse of static_thrust in ct.
inline double calibrate_ct(double thrust_n, double air_density, double rpm, double diameter_m) {
  detail::require_positive(thrust_n, "thrust");
  detail::require_positive(air_density, "air_density");
  detail::require_positive(rpm, "rpm");
  detail::require_positive(diameter_m, "prop_diameter");
  const double n = rpm / 60.0;
  const double d2 = diameter_m * diameter_m;
  return thrust_n / (air_density * n * n * d2 * d2);
}

// Thrust ratio at constant RPM when the diameter changes from d1 to d2.
inline double thrust_scale_factor(double d1, double d2) {
  detail::require_positive(d1, "d1");
  detail::require_positive(d2, "d2");
  const double r = d2 / d1;
  return r * r * r * r;
}

inline double required_thrust_per_motor(double mtow_kg, int n_motors, double gravity = kDefaultGravity) {
  detail::require_positive(mtow_kg, "mtow");
  detail::require_positive(gravity, "gravity");
  if (n_motors < 1) throw DomainError("n_motors", "must be at least 1, got " + std::to_string(n_motors));
  return mtow_kg * gravity / n_motors;
}

inline double disk_area(double diameter_m) {
  detail::require_positive(diameter_m, "prop_diameter");
  return std::numbers::pi * diameter_m * diameter_m / 4.0;
}

// Momentum-theory hover power divided by propulsive efficiency:
// P = T^1.5 / (sqrt(2 rho A_total) * eta).
inline double ideal_hover_power(double total_thrust_n, double air_density, double disk_area_total_m2, double eta) {
  detail::require_positive(total_thrust_n, "total_thrust");
  detail::require_positive(air_density, "air_density");
  detail::require_positive(disk_area_total_m2, "disk_area_total");
  detail::require_efficiency(eta, "propulsive_efficiency");
  return std::pow(total_thrust_n, 1.5) / (std::sqrt(2.0 * air_density * disk_area_total_m2) * eta);
}

// t = C * V * eta_batt / P, returned in minutes.
inline double hover_endurance(double capacity_ah, double voltage_v, double eta_batt, double power_w) {
  detail::require_positive(capacity_ah, "battery_capacity");
  detail::require_positive(voltage_v, "voltage");
  detail::require_efficiency(eta_batt, "battery_efficiency");
  detail::require_positive(power_w, "power");
  return 60.0 * capacity_ah * voltage_v * eta_batt / power_w;
}

inline double pack_nominal_voltage(int cells) {
  if (cells < 1) throw DomainError("battery_cells", "must be at least 1");
  return kLipoNominalCellVoltage * cells;
}
inline double pack_min_voltage(int cells) { return kLipoMinCellVoltage * pack_nominal_voltage(cells) / kLipoNominalCellVoltage; }
inline double pack_max_voltage(int cells) { return kLipoMaxCellVoltage * pack_nominal_voltage(cells) / kLipoNominalCellVoltage; }

// ---------------------------------------------------------------------------
// Designs, requirements, and whole-design evaluation
// ---------------------------------------------------------------------------

struct Design {
  double kv_rpm_per_v = 0;
  double current_limit_a = 0;
  int battery_cells = 0;
  double battery_voltage_v = 0;
  double battery_capacity_ah = 0;
  double prop_diameter_m = 0;
  double prop_pitch_m = 0;  // stored, enters no equation
  int n_motors = 0;
  double mtow_kg = 0;
  double thrust_coefficient = 0;
  double propulsive_efficiency = 0.7;
  double battery_efficiency = 0.95;
  std::optional<double> loaded_rpm;   // thrust is evaluated here when set, else at no-load RPM
  std::optional<double> footprint_m;  // declared, never computed

  friend bool operator==(const Design&, const Design&) = default;
};

struct Environment {
  double air_density = kDefaultAirDensity;
  double gravity = kDefaultGravity;

  friend bool operator==(const Environment&, const Environment&) = default;
};

inline void validate(const Design& d) {
  detail::require_positive(d.kv_rpm_per_v, "kv");
  detail::require_positive(d.current_limit_a, "current_limit");
  detail::require_positive(d.battery_voltage_v, "battery_voltage");
  detail::require_positive(d.battery_capacity_ah, "battery_capacity");
  detail::require_positive(d.prop_diameter_m, "prop_diameter");
  detail::require_positive(d.prop_pitch_m, "prop_pitch");
  detail::require_positive(d.mtow_kg, "mtow");
  detail::require_positive(d.thrust_coefficient, "thrust_coefficient");
  detail::require_efficiency(d.propulsive_efficiency, "propulsive_efficiency");
  detail::require_efficiency(d.battery_efficiency, "battery_efficiency");
  if (d.n_motors < 1) throw DomainError("n_motors", "must be at least 1");
  if (d.battery_cells < 1) throw DomainError("battery_cells", "must be at least 1");
  const double nominal = pack_nominal_voltage(d.battery_cells);
  if (std::abs(d.battery_voltage_v - nominal) > 0.05 * nominal)
    throw DomainError("battery_voltage", "must be within 5% of 3.7 V x " + std::to_string(d.battery_cells) + " cells");
  if (d.loaded_rpm) detail::require_positive(*d.loaded_rpm, "loaded_rpm");
  if (d.footprint_m) detail::require_positive(*d.footprint_m, "footprint");
}

inline void validate(const Environment& e) {
  detail::require_positive(e.air_density, "air_density");
  detail::require_positive(e.gravity, "gravity");
}

enum class RequirementKind { MinThrustPerMotor, MaxCurrentPerMotor, MinEndurance, MaxMTOW, FootprintMax, VoltageClass };

inline const char* to_string(RequirementKind k) {
  switch (k) {
    case RequirementKind::MinThrustPerMotor: return "MinThrustPerMotor";
    case RequirementKind::MaxCurrentPerMotor: return "MaxCurrentPerMotor";
    case RequirementKind::MinEndurance: return "MinEndurance";
    case RequirementKind::MaxMTOW: return "MaxMTOW";
    case RequirementKind::FootprintMax: return "FootprintMax";
    case RequirementKind::VoltageClass: return "VoltageClass";
  }
  return "?";
}

inline std::optional<RequirementKind> parse_requirement_kind(const std::string& s) {
  for (auto k : {RequirementKind::MinThrustPerMotor, RequirementKind::MaxCurrentPerMotor, RequirementKind::MinEndurance,
                 RequirementKind::MaxMTOW, RequirementKind::FootprintMax, RequirementKind::VoltageClass})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

// Reference unit each requirement bound is stored in.
inline const char* bound_unit(RequirementKind k) {
  switch (k) {
    case RequirementKind::MinThrustPerMotor: return "N";
    case RequirementKind::MaxCurrentPerMotor: return "A";
    case RequirementKind::MinEndurance: return "min";
    case RequirementKind::MaxMTOW: return "kg";
    case RequirementKind::FootprintMax: return "m";
    case RequirementKind::VoltageClass: return "S";
  }
  return "";
}

// bound is in bound_unit(kind). VoltageClass bounds are a cell count.
struct Requirement {
  std::string id;
  RequirementKind kind;
  double bound;

  friend bool operator==(const Requirement&, const Requirement&) = default;
};

using RequirementSet = std::vector<Requirement>;

struct RequirementCheck {
  std::string id;
  RequirementKind kind;
  bool passed;
  std::optional<double> measured;  // absent when the design declares nothing to check
  double bound;

  friend bool operator==(const RequirementCheck&, const RequirementCheck&) = default;
};

struct PerformanceReport {
  double no_load_rpm = 0;
  double thrust_rpm = 0;
  double torque_constant = 0;
  double max_torque = 0;
  double static_thrust_per_motor = 0;
  double required_thrust_per_motor = 0;
  double disk_area_total = 0;
  double hover_power_total = 0;
  double hover_current_per_motor = 0;
  double endurance_min = 0;
  std::vector<RequirementCheck> requirement_checks;

  double thrust_margin() const { return static_thrust_per_motor - required_thrust_per_motor; }

  const RequirementCheck* check(const std::string& id) const {
    for (const auto& c : requirement_checks)
      if (c.id == id) return &c;
    return nullptr;
  }

  bool all_passed() const {
    for (const auto& c : requirement_checks)
      if (!c.passed) return false;
    return true;
  }

  friend bool operator==(const PerformanceReport&, const PerformanceReport&) = default;
};

inline RequirementCheck check_requirement(const Requirement& r, const Design& d, const PerformanceReport& p) {
  RequirementCheck c{r.id, r.kind, false, std::nullopt, r.bound};
  switch (r.kind) {
    case RequirementKind::MinThrustPerMotor:
      c.measured = p.static_thrust_per_motor;
      c.passed = *c.measured >= r.bound;
      break;
    case RequirementKind::MaxCurrentPerMotor:
      c.measured = p.hover_current_per_motor;
      c.passed = *c.measured <= r.bound;
      break;
    case RequirementKind::MinEndurance:
      c.measured = p.endurance_min;
      c.passed = *c.measured >= r.bound;
      break;
    case RequirementKind::MaxMTOW:
      c.measured = d.mtow_kg;
      c.passed = *c.measured <= r.bound;
      break;
    case RequirementKind::FootprintMax:
      c.measured = d.footprint_m;
      c.passed = c.measured && *c.measured <= r.bound;
      break;
    case RequirementKind::VoltageClass:
      c.measured = d.battery_cells;
      c.passed = d.battery_cells == static_cast<int>(std::lround(r.bound));
      break;
  }
  return c;
}

inline PerformanceReport evaluate_design(const Design& d, const Environment& env, const RequirementSet& reqs) {
  validate(d);
  validate(env);
  PerformanceReport p;
  p.no_load_rpm = no_load_rpm(d.kv_rpm_per_v, d.battery_voltage_v);
  p.thrust_rpm = d.loaded_rpm.value_or(p.no_load_rpm);
  p.torque_constant = torque_constant(d.kv_rpm_per_v);
  p.max_torque = max_torque(d.kv_rpm_per_v, d.current_limit_a);
  p.static_thrust_per_motor = static_thrust(d.thrust_coefficient, env.air_density, p.thrust_rpm, d.prop_diameter_m);
  p.required_thrust_per_motor = required_thrust_per_motor(d.mtow_kg, d.n_motors, env.gravity);
  p.disk_area_total = d.n_motors * disk_area(d.prop_diameter_m);
  p.hover_power_total = ideal_hover_power(d.mtow_kg * env.gravity, env.air_density, p.disk_area_total,
                                          d.propulsive_efficiency);
  p.hover_current_per_motor = p.hover_power_total / (d.n_motors * d.battery_voltage_v);
  p.endurance_min = hover_endurance(d.battery_capacity_ah, d.battery_voltage_v, d.battery_efficiency, p.hover_power_total);
  p.requirement_checks.reserve(reqs.size());
  for (const auto& r : reqs) p.requirement_checks.push_back(check_requirement(r, d, p));
  return p;
}

}  // namespace eagi::oracle
