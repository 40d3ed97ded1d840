#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "safeplan/bundle.hpp"

namespace safeplan {

inline constexpr std::size_t kNoiseLadder[] = {2, 4, 8, 16, 32, 64};

struct NoiseLevel {
  std::size_t count = 2;
  std::uint64_t seed = 0;
  /// Permits counts outside the ladder, including 0 (identity).
  bool allow_arbitrary = false;
};

/// Adds `count` distractor schemas noise_act_1..noise_act_<count>. Each one
/// toggles a fresh predicate over objects of a fresh type; `count` fresh
/// objects are added to the problem. The schema order of the result is a
/// seeded shuffle. The returned bundle is re-parsed from its rendered texts
/// and checked for vocabulary disjointness from the goal, every danger rule
/// and every original schema.
/// Errors: InvalidNoiseLevel, VocabularyCollision.
TaskBundle inject(const TaskBundle& bundle, const NoiseLevel& level);

/// Throws VocabularyCollision unless no goal conjunct, danger-rule condition
/// or non-noise schema mentions a predicate or object touched by the given
/// noise schemas, and those schemas touch nothing else.
void check_noise_isolation(const TaskBundle& bundle, const std::vector<SymbolId>& noise_schemas);

} // namespace safeplan
