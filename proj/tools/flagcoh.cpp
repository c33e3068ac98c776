#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "flagcoh/report.hpp"

using namespace flagcoh;

namespace {

Weight parse_weight(const std::string& text) {
  long long a = 0, b = 0;
  if (std::sscanf(text.c_str(), " ( %lld , %lld )", &a, &b) == 2 ||
      std::sscanf(text.c_str(), " %lld , %lld", &a, &b) == 2)
    return {a, b};
  throw UnsupportedExpression("cannot parse weight \"" + text +
                              "\"; expected \"(a,b)\"");
}

std::string utc_now() {
  const std::time_t tt =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return buf;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

struct EngineFlags {
  int truncation = -1;  // k_start override
  int t_max = -1;       // k_max override
  int jobs = 0;
  std::string cache_dir;
  uint64_t seed = 0;

  EngineConfig config() const {
    EngineConfig cfg;
    if (truncation >= 0) cfg.k_start = truncation;
    if (t_max >= 0) cfg.k_max = t_max;
    cfg.jobs = jobs;
    return cfg;
  }
};

void add_engine_flags(CLI::App* cmd, EngineFlags* f) {
  cmd->add_option("--truncation", f->truncation,
                  "starting truncation exponent of the section schedule")
      ->envname("FLAGCOH_TRUNCATION");
  cmd->add_option("--t-max", f->t_max, "largest truncation exponent tried")
      ->envname("FLAGCOH_T_MAX");
  cmd->add_option("--jobs", f->jobs,
                  "worker threads per cohomology computation (0 = all cores)")
      ->envname("FLAGCOH_JOBS");
  cmd->add_option("--cache-dir", f->cache_dir,
                  "persistent leaf cache directory")
      ->envname("FLAGCOH_CACHE_DIR");
  cmd->add_option("--seed", f->seed, "seed for rank-certificate sampling")
      ->envname("FLAGCOH_SEED");
}

int cmd_cohomology(const std::string& text, uint32_t p, const EngineFlags& f) {
  const ExprPtr e = parse_expr(text);
  const RewriteResult rw = rewrite(e, p);
  LeafCache cache(f.cache_dir);
  ClaimContext ctx(p, 1, f.config(), &cache, f.seed);
  const CohomologyResult r = ctx.coh(e);
  std::printf("%lld %lld %lld %lld %lld, chi=%lld, %s (T=%d)\n",
              (long long)r.betti.h[0], (long long)r.betti.h[1],
              (long long)r.betti.h[2], (long long)r.betti.h[3],
              (long long)r.betti.h[4], (long long)r.betti.chi(),
              r.stabilized ? "stabilized" : "not stabilized", r.k_used);
  for (const auto& m : rw.markers) std::printf("rewrite: %s\n", m.c_str());
  const CompiledSheaf cs = compile_sheaf(rw.expr);
  if (!cs.is_direct_sum())
    std::printf("certified: presentation matrix has constant rank %lld at "
                "sampled rational points\n",
                (long long)cs.map_rank);
  return 0;
}

int cmd_verify(std::vector<std::string> ids, bool all,
               std::vector<uint32_t> ps, std::vector<int> ns,
               const std::vector<std::string>& grid_pairs,
               const std::string& format, const std::string& out_dir,
               const EngineFlags& f) {
  if (all) ids.clear();
  if (!all && ids.empty()) {
    std::cerr << "verify: name claims (e.g. C8) or pass --all\n";
    return 1;
  }
  std::vector<std::pair<uint32_t, int>> grid;
  if (!grid_pairs.empty()) {
    for (const auto& g : grid_pairs) {
      unsigned pp = 0;
      int nn = 0;
      if (std::sscanf(g.c_str(), " %u : %d", &pp, &nn) != 2 &&
          std::sscanf(g.c_str(), " %u , %d", &pp, &nn) != 2)
        throw std::invalid_argument("bad --grid entry \"" + g +
                                    "\"; expected p:n");
      grid.emplace_back(pp, nn);
    }
  } else {
    for (uint32_t p : ps)
      for (int n : ns) grid.emplace_back(p, n);
  }

  LeafCache cache(f.cache_dir);
  std::vector<GridOutcome> results;
  for (const auto& [p, n] : grid) {
    std::cerr << "== p = " << p << ", n = " << n << " ==\n";
    ClaimContext ctx(p, n, f.config(), &cache, f.seed);
    GridOutcome g;
    g.p = p;
    g.n = n;
    g.outcomes = verify_claims(ids, ctx);
    for (const auto& o : g.outcomes) {
      std::cerr << o.claim << " @ p=" << p << " n=" << n << ": "
                << to_string(o.status);
      if (!o.diagnostic.empty()) std::cerr << " — " << o.diagnostic;
      char buf[32];
      std::snprintf(buf, sizeof buf, " (%.1fs)", o.seconds);
      std::cerr << buf << "\n";
    }
    results.push_back(std::move(g));
  }

  std::filesystem::create_directories(out_dir);
  const std::string json = report_json(results);
  const std::string md = report_markdown(results);
  write_file(out_dir + "/report.json", json);
  write_file(out_dir + "/report.md", md);
  write_file(out_dir + "/meta.json",
             meta_json(results, cache.stats(), utc_now()));
  std::cout << (format == "json" ? json : md);
  return report_clean(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "flagcoh: finite-field cohomology verification on the rank-2 "
      "symplectic flag 4-fold"};
  app.require_subcommand(1);

  auto* chi = app.add_subcommand(
      "chi", "Euler characteristic of the line bundle O(a,b)");
  std::string chi_weight;
  chi->add_option("weight", chi_weight, "weight, e.g. \"(2,3)\"")->required();

  auto* coh = app.add_subcommand(
      "cohomology", "Betti vector of a sheaf expression over F_p");
  std::string coh_expr;
  uint32_t coh_p = 3;
  EngineFlags coh_flags;
  coh->add_option("expr", coh_expr,
                  "expression, e.g. \"O(3,-3)\", \"FU2(1)\", \"SU2*(3)(0,-2)\"")
      ->required();
  coh->add_option("-p,--p", coh_p, "odd prime characteristic")
      ->envname("FLAGCOH_P");
  add_engine_flags(coh, &coh_flags);

  auto* ver = app.add_subcommand(
      "verify", "verify registered claims and write reports");
  std::vector<std::string> ver_ids;
  bool ver_all = false;
  std::vector<uint32_t> ver_p = {3};
  std::vector<int> ver_n = {1};
  std::vector<std::string> ver_grid;
  std::string ver_format = "md";
  std::string ver_out = "report";
  EngineFlags ver_flags;
  ver->add_option("ids", ver_ids, "claim ids (C1..C13)");
  ver->add_flag("--all", ver_all, "verify every registered claim");
  ver->add_option("--claims", ver_ids, "claim ids, comma separated")
      ->delimiter(',')
      ->envname("FLAGCOH_CLAIMS");
  ver->add_option("-p,--p", ver_p, "primes, comma separated")
      ->delimiter(',')
      ->envname("FLAGCOH_P");
  ver->add_option("-n,--n", ver_n, "Frobenius exponents, comma separated")
      ->delimiter(',')
      ->envname("FLAGCOH_N");
  ver->add_option("--grid", ver_grid,
                  "explicit grid points p:n (overrides --p/--n)");
  ver->add_option("--format", ver_format, "stdout report format: json or md")
      ->check(CLI::IsMember({"json", "md"}))
      ->envname("FLAGCOH_FORMAT");
  ver->add_option("--out", ver_out, "report output directory")
      ->envname("FLAGCOH_OUT");
  add_engine_flags(ver, &ver_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (chi->parsed()) {
      std::printf("%lld\n",
                  (long long)euler_characteristic(parse_weight(chi_weight)));
      return 0;
    }
    if (coh->parsed()) return cmd_cohomology(coh_expr, coh_p, coh_flags);
    if (ver->parsed())
      return cmd_verify(ver_ids, ver_all, ver_p, ver_n, ver_grid, ver_format,
                        ver_out, ver_flags);
  } catch (const NotStabilized& e) {
    std::cerr << "not stabilized: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedExpression& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
