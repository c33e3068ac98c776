#include "flagcoh/report.hpp"

#include <map>
#include <sstream>

#include <json.hpp>

namespace flagcoh {

namespace {

using nlohmann::ordered_json;

const std::string& statement_of(const std::string& id) {
  static const std::string unknown;
  for (const auto& c : standard_claims())
    if (c.id == id) return c.statement;
  return unknown;
}

// Trusted steps across the grid, deduplicated, first-seen order.
std::vector<TrustedStep> trusted_union(const std::vector<GridOutcome>& grid) {
  std::vector<TrustedStep> out;
  for (const auto& g : grid)
    for (const auto& o : g.outcomes)
      for (const auto& t : o.trusted) {
        bool seen = false;
        for (const auto& u : out)
          seen = seen || (u.label == t.label && u.citation == t.citation);
        if (!seen) out.push_back(t);
      }
  return out;
}

}  // namespace

bool report_clean(const std::vector<GridOutcome>& grid) {
  for (const auto& g : grid)
    for (const auto& o : g.outcomes)
      if (o.status == ClaimStatus::kFailed) return false;
  return true;
}

std::string report_json(const std::vector<GridOutcome>& grid) {
  ordered_json root;
  root["engine_version"] = kEngineVersion;
  root["grid"] = ordered_json::array();
  std::map<std::string, int64_t> tally;
  for (const auto& g : grid) {
    ordered_json jg;
    jg["p"] = g.p;
    jg["n"] = g.n;
    jg["claims"] = ordered_json::array();
    for (const auto& o : g.outcomes) {
      ordered_json jc;
      jc["id"] = o.claim;
      jc["status"] = to_string(o.status);
      jc["statement"] = statement_of(o.claim);
      jc["checks"] = o.checks;
      jc["trusted"] = ordered_json::array();
      for (const auto& t : o.trusted)
        jc["trusted"].push_back({{"label", t.label}, {"citation", t.citation}});
      jc["diagnostic"] = o.diagnostic;
      jg["claims"].push_back(std::move(jc));
      ++tally[to_string(o.status)];
    }
    root["grid"].push_back(std::move(jg));
  }
  ordered_json sum;
  sum["VERIFIED"] = tally["VERIFIED"];
  sum["VERIFIED*"] = tally["VERIFIED*"];
  sum["FAILED"] = tally["FAILED"];
  sum["SKIPPED"] = tally["SKIPPED"];
  sum["trusted_steps"] = ordered_json::array();
  for (const auto& t : trusted_union(grid))
    sum["trusted_steps"].push_back({{"label", t.label}, {"citation", t.citation}});
  root["summary"] = std::move(sum);
  return root.dump(2) + "\n";
}

std::string report_markdown(const std::vector<GridOutcome>& grid) {
  std::ostringstream os;
  os << "# Verification report\n\n";
  os << "Engine version " << kEngineVersion << ".\n";
  for (const auto& g : grid) {
    os << "\n## p = " << g.p << ", n = " << g.n << "\n\n";
    os << "| claim | status | detail |\n|---|---|---|\n";
    for (const auto& o : g.outcomes) {
      std::string detail;
      if (o.status == ClaimStatus::kFailed ||
          o.status == ClaimStatus::kSkipped)
        detail = o.diagnostic;
      else if (!o.checks.empty())
        detail = o.checks.back();
      for (auto& ch : detail)
        if (ch == '|' || ch == '\n') ch = ' ';
      os << "| " << o.claim << " | " << to_string(o.status) << " | " << detail
         << " |\n";
    }
  }
  const auto trusted = trusted_union(grid);
  os << "\n## Trusted steps\n\n";
  if (trusted.empty()) {
    os << "None.\n";
  } else {
    for (const auto& t : trusted)
      os << "- **" << t.label << "**: " << t.citation << "\n";
  }
  std::map<std::string, int64_t> tally;
  for (const auto& g : grid)
    for (const auto& o : g.outcomes) ++tally[to_string(o.status)];
  os << "\n## Summary\n\n";
  os << tally["VERIFIED"] << " verified, " << tally["VERIFIED*"]
     << " verified modulo trusted steps, " << tally["FAILED"] << " failed, "
     << tally["SKIPPED"] << " skipped.\n";
  return os.str();
}

std::string meta_json(const std::vector<GridOutcome>& grid,
                      const CacheStats& cache, const std::string& timestamp) {
  ordered_json root;
  root["generated_at"] = timestamp;
  ordered_json timings = ordered_json::array();
  for (const auto& g : grid)
    for (const auto& o : g.outcomes)
      timings.push_back({{"claim", o.claim},
                         {"p", g.p},
                         {"n", g.n},
                         {"seconds", o.seconds}});
  root["timings"] = std::move(timings);
  root["cache"] = {{"hits", cache.hits},
                   {"misses", cache.misses},
                   {"puts", cache.puts}};
  return root.dump(2) + "\n";
}

}  // namespace flagcoh
