#pragma once

// Seeded selection of question instances.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by
// the C++ standard. Bounded draws use rejection sampling on the raw 64-bit
// output (never a library distribution), so a given seed selects the same
// items on every conforming platform:
//
//   draw(bound): limit = 2^64 - (2^64 mod bound); repeat x = next() until
//                x < limit; return x mod bound.
//   shuffle:     for i in 0..k-1: j = i + draw(n - i); swap(v[i], v[j]).

#include <algorithm>
#include <limits>
#include <optional>
#include <string_view>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "eagi/question_bank.hpp"
#include "eagi/taxonomy.hpp"

namespace eagi {

enum class SampleMode { Targeted, Stratified, Curriculum };

inline const char* to_string(SampleMode m) {
  switch (m) {
    case SampleMode::Targeted: return "targeted";
    case SampleMode::Stratified: return "stratified";
    case SampleMode::Curriculum: return "curriculum";
  }
  return "?";
}

inline std::optional<SampleMode> parse_sample_mode(std::string_view s) {
  if (s == "targeted") return SampleMode::Targeted;
  if (s == "stratified") return SampleMode::Stratified;
  if (s == "curriculum") return SampleMode::Curriculum;
  return std::nullopt;
}

class SampleSizeError : public std::invalid_argument {
 public:
  SampleSizeError(std::size_t requested, std::size_t population)
      : std::invalid_argument("requested " + std::to_string(requested) + " items but only " +
                              std::to_string(population) + " match the filter"),
        population_(population) {}

  std::size_t population() const noexcept { return population_; }

 private:
  std::size_t population_;
};

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t draw(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("draw bound must be positive");
    // 2^64 mod bound, computed without overflow.
    const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;  // inclusive
    std::uint64_t x;
    do {
      x = engine_();
    } while (rem != 0 && x > limit);
    return x % bound;
  }

  // Partial Fisher-Yates: the first k elements become a uniform sample.
  template <typename T>
  void partial_shuffle(std::vector<T>& v, std::size_t k) {
    for (std::size_t i = 0; i < k && i < v.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(draw(v.size() - i));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Per-level quotas: one item at a time, cycling levels in ascending order and
// skipping exhausted levels, so quotas differ by at most one wherever
// capacity allows and any remainder lands on the lowest levels.
inline std::map<CognitionLevel, std::size_t> stratified_quotas(const std::map<CognitionLevel, std::size_t>& capacity,
                                                               std::size_t n) {
  std::map<CognitionLevel, std::size_t> quota;
  std::size_t total = 0;
  for (const auto& [lvl, cap] : capacity) {
    quota[lvl] = 0;
    total += cap;
  }
  if (n > total) throw SampleSizeError(n, total);
  std::size_t assigned = 0;
  while (assigned < n) {
    for (const auto& [lvl, cap] : capacity) {
      if (assigned == n) break;
      if (quota[lvl] < cap) {
        ++quota[lvl];
        ++assigned;
      }
    }
  }
  return quota;
}

inline std::vector<QuestionInstance> sample(const QuestionBank& bank, const TagFilter& filter, std::size_t n,
                                            SampleMode mode, std::uint64_t seed) {
  std::vector<const QuestionInstance*> population;
  for (const auto& inst : bank.instances)
    if (matches(inst.tags, inst.level, filter)) population.push_back(&inst);
  if (n > population.size()) throw SampleSizeError(n, population.size());

  SeededRng rng(seed);
  std::vector<const QuestionInstance*> chosen;

  if (mode == SampleMode::Targeted) {
    rng.partial_shuffle(population, n);
    chosen.assign(population.begin(), population.begin() + static_cast<std::ptrdiff_t>(n));
  } else {
    std::map<CognitionLevel, std::vector<const QuestionInstance*>> strata;
    for (const auto* p : population) strata[p->level].push_back(p);
    std::map<CognitionLevel, std::size_t> capacity;
    for (const auto& [lvl, items] : strata) capacity[lvl] = items.size();
    const auto quota = stratified_quotas(capacity, n);
    for (auto& [lvl, items] : strata) {
      const std::size_t k = quota.at(lvl);
      rng.partial_shuffle(items, k);
      chosen.insert(chosen.end(), items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k));
    }
    if (mode == SampleMode::Curriculum) {
      std::stable_sort(chosen.begin(), chosen.end(), [](const auto* a, const auto* b) {
        if (a->level != b->level) return ordinal(a->level) < ordinal(b->level);
        if (a->provenance.template_id != b->provenance.template_id)
          return a->provenance.template_id < b->provenance.template_id;
        return a->id < b->id;
      });
    }
  }

  std::vector<QuestionInstance> out;
  out.reserve(chosen.size());
  for (const auto* p : chosen) out.push_back(*p);
  return out;
}

}  // namespace eagi
