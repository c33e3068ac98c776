#pragma once

#include <string>
#include <vector>

#include "flagcoh/cache.hpp"
#include "flagcoh/claims.hpp"

namespace flagcoh {

// Results of one grid point (p, n).
struct GridOutcome {
  uint32_t p = 0;
  int n = 0;
  std::vector<ClaimOutcome> outcomes;
};

// True when no outcome anywhere in the grid is FAILED.
bool report_clean(const std::vector<GridOutcome>& grid);

// Deterministic verification report: claim statuses, checked facts and
// trusted steps only.  Byte-identical across repeated runs of the same
// configuration; timings and cache statistics live in the meta sidecar.
std::string report_json(const std::vector<GridOutcome>& grid);
std::string report_markdown(const std::vector<GridOutcome>& grid);

// Volatile run data: wall-clock timings, cache statistics, timestamp.
std::string meta_json(const std::vector<GridOutcome>& grid,
                      const CacheStats& cache, const std::string& timestamp);

}  // namespace flagcoh
