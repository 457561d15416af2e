#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>

namespace eqgh {

/// Instance-size guards for the exhaustive searches.
struct SearchBounds {
  std::size_t gh_total_points = 14;   // |X| + |Y| for gh_distance_bruteforce
  std::size_t isometry_points = 64;   // n for isometry_group
  std::size_t isometry_order = 5040;  // group order cap for isometry_group
  std::size_t epgh_points = 12;       // |X|, |Y| for search_approximation
  std::size_t epgh_group = 12;        // |Gamma|, |Lambda| for search_approximation

  /// Defaults, with EQGH_SEARCH_BOUND (if set to a positive integer)
  /// replacing the epgh point and group guards.
  static SearchBounds from_env() {
    SearchBounds b;
    if (const char* env = std::getenv("EQGH_SEARCH_BOUND")) {
      char* end = nullptr;
      const unsigned long v = std::strtoul(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) {
        b.epgh_points = v;
        b.epgh_group = v;
      }
    }
    return b;
  }
};

}  // namespace eqgh
