#include "flagcoh/cache.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace flagcoh {

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string leaf_cache_key(const std::string& engine_version,
                           const std::string& serialized_expr, uint32_t p,
                           const EngineConfig& cfg) {
  std::ostringstream os;
  os << engine_version << '\x1f' << serialized_expr << '\x1f' << p << '\x1f'
     << cfg.k_start << ',' << cfg.k_step << ',' << cfg.k_max;
  const uint64_t h = fnv1a64(os.str());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LeafCache::LeafCache(std::string dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::optional<CohomologyResult> LeafCache::get(const std::string& key) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = mem_.find(key);
  if (it != mem_.end()) {
    ++stats_.hits;
    return it->second;
  }
  CohomologyResult r;
  if (!dir_.empty() && load_disk(key, &r)) {
    mem_[key] = r;
    ++stats_.hits;
    return r;
  }
  ++stats_.misses;
  return std::nullopt;
}

void LeafCache::put(const std::string& key, const std::string& description,
                    const CohomologyResult& r) {
  std::lock_guard<std::mutex> lock(mu_);
  if (mem_.emplace(key, r).second) ++stats_.puts;
  if (!dir_.empty()) store_disk(key, description, r);
}

bool LeafCache::load_disk(const std::string& key, CohomologyResult* out) {
  std::ifstream in(dir_ + "/" + key + ".json");
  if (!in) return false;
  nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return false;
  try {
    auto h = j.at("h");
    if (!h.is_array() || h.size() != 5) return false;
    for (int i = 0; i < 5; ++i) out->betti.h[i] = h.at(i).get<int64_t>();
    out->p = j.at("p").get<uint32_t>();
    out->k_used = j.at("k_used").get<int>();
    out->stabilized = j.at("stabilized").get<bool>();
  } catch (const nlohmann::json::exception&) {
    return false;
  }
  return out->stabilized;  // only stabilized results are trusted from disk
}

void LeafCache::store_disk(const std::string& key, const std::string& description,
                           const CohomologyResult& r) {
  const std::string path = dir_ + "/" + key + ".json";
  if (std::filesystem::exists(path)) return;
  nlohmann::ordered_json j;
  j["description"] = description;
  j["p"] = r.p;
  j["h"] = r.betti.h;
  j["chi"] = r.betti.chi();
  j["k_used"] = r.k_used;
  j["stabilized"] = r.stabilized;
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  std::ofstream idx(dir_ + "/index.txt", std::ios::app);
  idx << key << "  " << description << '\n';
}

}  // namespace flagcoh
