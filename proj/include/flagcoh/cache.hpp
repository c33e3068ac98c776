#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "flagcoh/cech.hpp"

namespace flagcoh {

// Version stamp participating in cache keys; bump on any change that can
// alter computed vectors.
inline constexpr const char* kEngineVersion = "1.0.0";

// Stable 64-bit content hash (FNV-1a), rendered as 16 hex digits.
uint64_t fnv1a64(const std::string& bytes);

// Key of one cohomology computation: engine version, canonical expression
// serialization, prime, and the truncation schedule.
std::string leaf_cache_key(const std::string& engine_version,
                           const std::string& serialized_expr, uint32_t p,
                           const EngineConfig& cfg);

struct CacheStats {
  int64_t hits = 0;
  int64_t misses = 0;
  int64_t puts = 0;
};

// Content-addressed store of stabilized cohomology results.  Always holds an
// in-memory map; with a directory it also persists one JSON file per entry
// plus a plain-text index for human inspection.
class LeafCache {
 public:
  LeafCache() = default;
  explicit LeafCache(std::string dir);

  std::optional<CohomologyResult> get(const std::string& key);
  void put(const std::string& key, const std::string& description,
           const CohomologyResult& r);

  const CacheStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }
  const std::string& dir() const { return dir_; }

 private:
  bool load_disk(const std::string& key, CohomologyResult* out);
  void store_disk(const std::string& key, const std::string& description,
                  const CohomologyResult& r);

  std::string dir_;
  std::map<std::string, CohomologyResult> mem_;
  CacheStats stats_;
  std::mutex mu_;
};

}  // namespace flagcoh
