#pragma once

// Discrete design grids, feasibility filtering and Pareto fronts.

#include <algorithm>
#include <array>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eagi/oracle.hpp"
#include "eagi/propellers.hpp"

namespace eagi::design_space {

using oracle::Design;
using oracle::Environment;
using oracle::RequirementSet;

struct BatteryOption {
  int cells = 0;
  double voltage_v = 0;
  double capacity_ah = 0;

  friend bool operator==(const BatteryOption&, const BatteryOption&) = default;
};

struct DesignGrid {
  std::string id;
  std::vector<double> kv_values;
  std::vector<double> prop_diameters_m;
  std::vector<double> prop_pitches_m;
  std::vector<BatteryOption> battery_options;
  std::vector<int> n_motors_options;

  std::size_t size() const {
    return kv_values.size() * prop_diameters_m.size() * prop_pitches_m.size() * battery_options.size() *
           n_motors_options.size();
  }

  void validate() const {
    auto need = [&](bool non_empty, const char* axis) {
      if (!non_empty) throw std::invalid_argument("design grid '" + id + "': axis " + axis + " is empty");
    };
    need(!kv_values.empty(), "kv");
    need(!prop_diameters_m.empty(), "prop_diameter");
    need(!prop_pitches_m.empty(), "prop_pitch");
    need(!battery_options.empty(), "battery");
    need(!n_motors_options.empty(), "n_motors");
  }

  friend bool operator==(const DesignGrid&, const DesignGrid&) = default;
};

// Cartesian product in lexicographic order: kv, diameter, pitch, battery,
// motor count (last axis varies fastest). Fields not on the grid come from
// `base`; the thrust coefficient is re-resolved from the catalog per design.
inline std::vector<Design> enumerate(const DesignGrid& grid, const Design& base, const PropellerCatalog& props) {
  grid.validate();
  std::vector<Design> out;
  out.reserve(grid.size());
  for (double kv : grid.kv_values)
    for (double dia : grid.prop_diameters_m)
      for (double pitch : grid.prop_pitches_m)
        for (const auto& batt : grid.battery_options)
          for (int n : grid.n_motors_options) {
            Design d = base;
            d.kv_rpm_per_v = kv;
            d.prop_diameter_m = dia;
            d.prop_pitch_m = pitch;
            d.battery_cells = batt.cells;
            d.battery_voltage_v = batt.voltage_v;
            d.battery_capacity_ah = batt.capacity_ah;
            d.n_motors = n;
            props.apply(d);
            out.push_back(d);
          }
  return out;
}

inline std::vector<Design> feasible_set(std::span<const Design> designs, const Environment& env,
                                        const RequirementSet& reqs) {
  std::vector<Design> out;
  for (const auto& d : designs)
    if (oracle::evaluate_design(d, env, reqs).all_passed()) out.push_back(d);
  return out;
}

// ---------------------------------------------------------------------------
// Objectives. Current is minimized; thrust margin and endurance maximized.
// ---------------------------------------------------------------------------

struct ObjectiveVector {
  double hover_current_per_motor = 0;
  double thrust_margin = 0;
  double endurance_min = 0;

  // Components oriented so that larger is better on every axis.
  std::array<double, 3> oriented() const { return {-hover_current_per_motor, thrust_margin, endurance_min}; }

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

inline ObjectiveVector objectives(const oracle::PerformanceReport& p) {
  return {p.hover_current_per_motor, p.thrust_margin(), p.endurance_min};
}

inline ObjectiveVector objectives(const Design& d, const Environment& env) {
  return objectives(oracle::evaluate_design(d, env, {}));
}

// Exact comparison: no epsilon ties.
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  const auto x = a.oriented();
  const auto y = b.oriented();
  bool strict = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < y[i]) return false;
    if (x[i] > y[i]) strict = true;
  }
  return strict;
}

// Indices of the non-dominated vectors, ascending. Sweeps in descending
// lexicographic order of the oriented objectives: a dominator always sorts
// before what it dominates, so each candidate is only tested against the
// front built so far.
inline std::vector<std::size_t> pareto_front_indices(std::span<const ObjectiveVector> objs) {
  std::vector<std::size_t> order(objs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return objs[a].oriented() > objs[b].oriented(); });
  std::vector<std::size_t> front;
  for (std::size_t idx : order) {
    const bool dominated =
        std::any_of(front.begin(), front.end(), [&](std::size_t f) { return dominates(objs[f], objs[idx]); });
    if (!dominated) front.push_back(idx);
  }
  std::sort(front.begin(), front.end());
  return front;
}

inline std::vector<Design> pareto_front(std::span<const Design> designs, const Environment& env) {
  if (designs.empty()) throw DomainError("designs", "pareto front of an empty design set");
  std::vector<ObjectiveVector> objs;
  objs.reserve(designs.size());
  for (const auto& d : designs) objs.push_back(objectives(d, env));
  std::vector<Design> out;
  for (std::size_t i : pareto_front_indices(objs)) out.push_back(designs[i]);
  return out;
}

}  // namespace eagi::design_space
