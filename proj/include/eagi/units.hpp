#pragma once

// Unit synonym table used by the bank loader, the answer extractor and the
// numeric scorers. Every unit maps to a dimension and a factor into that
// dimension's reference unit (the first entry of each dimension below).

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace eagi::units {

enum class Dimension {
  Ratio,
  Speed,          // rpm
  Voltage,        // V
  Current,        // A
  Force,          // N
  Torque,         // N*m
  TorqueConstant, // N*m/A
  Power,          // W
  Time,           // min
  Length,         // m
  Mass,           // kg
  Charge,         // Ah
  Density,        // kg/m^3
  Area,           // m^2
  Cells,          // S
  VelocityConstant,  // rpm/V
  Acceleration,   // m/s^2
};

struct Unit {
  std::string_view canonical;
  Dimension dimension;
  double factor;  // value_in_reference = value * factor
};

namespace detail {

struct Alias {
  std::string_view spelling;
  Unit unit;
};

inline constexpr Unit kRatio{"ratio", Dimension::Ratio, 1.0};
inline constexpr Unit kPercent{"%", Dimension::Ratio, 0.01};
inline constexpr Unit kRpm{"RPM", Dimension::Speed, 1.0};
inline constexpr Unit kVolt{"V", Dimension::Voltage, 1.0};
inline constexpr Unit kAmp{"A", Dimension::Current, 1.0};
inline constexpr Unit kNewton{"N", Dimension::Force, 1.0};
inline constexpr Unit kNm{"Nm", Dimension::Torque, 1.0};
inline constexpr Unit kNmPerA{"Nm/A", Dimension::TorqueConstant, 1.0};
inline constexpr Unit kWatt{"W", Dimension::Power, 1.0};
inline constexpr Unit kKilowatt{"kW", Dimension::Power, 1000.0};
inline constexpr Unit kMinute{"min", Dimension::Time, 1.0};
inline constexpr Unit kSecond{"s", Dimension::Time, 1.0 / 60.0};
inline constexpr Unit kHour{"h", Dimension::Time, 60.0};
inline constexpr Unit kMeter{"m", Dimension::Length, 1.0};
inline constexpr Unit kInch{"in", Dimension::Length, 0.0254};
inline constexpr Unit kMillimeter{"mm", Dimension::Length, 0.001};
inline constexpr Unit kCentimeter{"cm", Dimension::Length, 0.01};
inline constexpr Unit kKilogram{"kg", Dimension::Mass, 1.0};
inline constexpr Unit kGram{"g", Dimension::Mass, 0.001};
inline constexpr Unit kAh{"Ah", Dimension::Charge, 1.0};
inline constexpr Unit kMah{"mAh", Dimension::Charge, 0.001};
inline constexpr Unit kDensity{"kg/m^3", Dimension::Density, 1.0};
inline constexpr Unit kArea{"m^2", Dimension::Area, 1.0};
inline constexpr Unit kCells{"S", Dimension::Cells, 1.0};
inline constexpr Unit kKv{"RPM/V", Dimension::VelocityConstant, 1.0};
inline constexpr Unit kAccel{"m/s^2", Dimension::Acceleration, 1.0};

// Matched exactly before the case-folded table; "S" (series cells) and "s"
// (seconds) differ only by case.
inline constexpr Alias kExact[] = {
    {"S", kCells},
    {"s", kSecond},
    {"m", kMeter},
    {"M", kMeter},
};

// Spellings are compared after lowercasing and removing spaces.
inline constexpr Alias kFolded[] = {
    {"ratio", kRatio}, {"x", kRatio}, {"times", kRatio}, {"%", kPercent}, {"percent", kPercent},
    {"rpm", kRpm}, {"rev/min", kRpm}, {"r/min", kRpm},
    {"v", kVolt}, {"volt", kVolt}, {"volts", kVolt},
    {"a", kAmp}, {"amp", kAmp}, {"amps", kAmp}, {"ampere", kAmp}, {"amperes", kAmp},
    {"n", kNewton}, {"newton", kNewton}, {"newtons", kNewton},
    {"nm", kNm}, {"n\xc2\xb7m", kNm}, {"n*m", kNm}, {"n-m", kNm}, {"n.m", kNm},
    {"newton-meter", kNm}, {"newton-meters", kNm},
    {"nm/a", kNmPerA}, {"n\xc2\xb7m/a", kNmPerA}, {"n*m/a", kNmPerA}, {"n-m/a", kNmPerA},
    {"w", kWatt}, {"watt", kWatt}, {"watts", kWatt}, {"kw", kKilowatt},
    {"min", kMinute}, {"mins", kMinute}, {"minute", kMinute}, {"minutes", kMinute},
    {"sec", kSecond}, {"seconds", kSecond}, {"h", kHour}, {"hr", kHour}, {"hours", kHour},
    {"meter", kMeter}, {"meters", kMeter}, {"in", kInch}, {"inch", kInch}, {"inches", kInch},
    {"\"", kInch}, {"mm", kMillimeter}, {"cm", kCentimeter},
    {"kg", kKilogram}, {"g", kGram},
    {"ah", kAh}, {"mah", kMah},
    {"kg/m^3", kDensity}, {"kg/m3", kDensity}, {"kg/m\xc2\xb3", kDensity},
    {"m^2", kArea}, {"m2", kArea},
    {"cells", kCells},
    {"kv", kKv}, {"rpm/v", kKv},
    {"m/s^2", kAccel},
};

inline std::string fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == ' ' || c == '\t') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace detail

inline std::optional<Unit> lookup(std::string_view spelling) {
  for (const auto& a : detail::kExact)
    if (a.spelling == spelling) return a.unit;
  const std::string folded = detail::fold(spelling);
  for (const auto& a : detail::kFolded)
    if (a.spelling == folded) return a.unit;
  return std::nullopt;
}

inline bool compatible(const Unit& a, const Unit& b) { return a.dimension == b.dimension; }

// Converts value from `from` into `to`; nullopt when dimensions differ.
inline std::optional<double> convert(double value, const Unit& from, const Unit& to) {
  if (!compatible(from, to)) return std::nullopt;
  return value * from.factor / to.factor;
}

inline std::optional<double> convert(double value, std::string_view from, std::string_view to) {
  const auto f = lookup(from);
  const auto t = lookup(to);
  if (!f || !t) return std::nullopt;
  return convert(value, *f, *t);
}

inline constexpr double kMetersPerInch = 0.0254;

}  // namespace eagi::units
