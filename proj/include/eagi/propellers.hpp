#pragma once

// Per-propeller thrust coefficients. A catalog entry either pins C_T
// directly or derives it from a measured static-thrust datum.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "eagi/oracle.hpp"

namespace eagi {

struct PropellerEntry {
  std::string id;
  double diameter_m = 0;
  double pitch_m = 0;
  double ct = 0;

  friend bool operator==(const PropellerEntry&, const PropellerEntry&) = default;
};

class PropellerCatalog {
 public:
  PropellerCatalog() = default;
  PropellerCatalog(std::vector<PropellerEntry> entries, double default_ct)
      : entries_(std::move(entries)), default_ct_(default_ct) {}

  // Geometry matches within 1e-6 m (well under a thousandth of an inch).
  const PropellerEntry* find(double diameter_m, double pitch_m) const {
    for (const auto& e : entries_)
      if (std::abs(e.diameter_m - diameter_m) < 1e-6 && std::abs(e.pitch_m - pitch_m) < 1e-6) return &e;
    return nullptr;
  }

  const PropellerEntry* find(const std::string& id) const {
    for (const auto& e : entries_)
      if (e.id == id) return &e;
    return nullptr;
  }

  // Catalogued geometry uses its own coefficient; anything else the default.
  double ct_for(double diameter_m, double pitch_m) const {
    const auto* e = find(diameter_m, pitch_m);
    return e ? e->ct : default_ct_;
  }

  void apply(oracle::Design& d) const { d.thrust_coefficient = ct_for(d.prop_diameter_m, d.prop_pitch_m); }

  double default_ct() const { return default_ct_; }
  const std::vector<PropellerEntry>& entries() const { return entries_; }

  friend bool operator==(const PropellerCatalog&, const PropellerCatalog&) = default;

 private:
  std::vector<PropellerEntry> entries_;
  double default_ct_ = 0;
};

}  // namespace eagi
