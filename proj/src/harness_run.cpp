#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cg/catalog.hpp"
#include "cg/engine.hpp"
#include "cg/harness.hpp"

namespace cg::harness {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string file_name(const std::string& claim) { return claim + ".csv"; }

}  // namespace

const std::map<std::string, Experiment>& experiments() {
  static const std::map<std::string, Experiment> table = [] {
    std::map<std::string, Experiment> t;
    detail::register_concurrent(t);
    detail::register_branching(t);
    for (const auto& c : catalog::claims())
      if (!t.count(c.id)) throw std::logic_error("registry claim without experiment: " + c.id);
    for (const auto& [id, fn] : t)
      if (!catalog::find_claim(id)) throw std::logic_error("experiment without registry entry: " + id);
    return t;
  }();
  return table;
}

std::string csv_header() { return "claim,param_json,measured_lo,measured_hi,expected,expected_src,rule,pass,runtime_ms\n"; }

std::string to_csv(const std::vector<ResultRow>& rows, bool record_runtime) {
  std::string s = csv_header();
  for (const auto& r : rows) {
    s += csv_field(r.claim) + "," + csv_field(r.param_json) + "," + fmt(r.measured_lo) + "," + fmt(r.measured_hi) + "," +
         fmt(r.expected) + "," + csv_field(r.expected_src) + "," + csv_field(r.rule) + "," + (r.pass ? "true" : "false") +
         "," + (record_runtime ? fmt(std::round(r.runtime_ms * 1000.0) / 1000.0) : std::string("0")) + "\n";
  }
  return s;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, p);
}

std::vector<ResultRow> reproduce(const std::string& claim, const ParamMap& overrides, const RunOptions& opts) {
  const auto& table = experiments();
  auto it = table.find(claim);
  if (it == table.end()) throw std::invalid_argument("unknown claim: " + claim);
  ParamMap params = resolve_parameters(claim, overrides);
  auto t0 = std::chrono::steady_clock::now();
  auto rows = it->second(params);
  double total = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  // Rows without their own timing share the claim's wall time.
  for (auto& r : rows)
    if (r.runtime_ms == 0.0) r.runtime_ms = total / double(rows.size());
  if (!opts.out_dir.empty())
    write_atomic((std::filesystem::path(opts.out_dir) / file_name(claim)).string(), to_csv(rows, opts.record_runtime));
  return rows;
}

bool RunSummary::pass() const {
  for (const auto& c : claims)
    if (!c.pass()) return false;
  return !claims.empty();
}

std::string markdown_summary(const std::vector<ClaimSummary>& claims) {
  std::ostringstream os;
  os << "| claim | statement | rows | failed | status |\n|---|---|---|---|---|\n";
  for (const auto& c : claims) {
    auto info = catalog::find_claim(c.claim);
    os << "| " << c.claim << " | " << (info ? info->theorem_ref : "") << " | " << c.rows << " | " << c.failed << " | "
       << (c.error.empty() ? (c.pass() ? "pass" : "FAIL") : "error: " + c.error) << " |\n";
  }
  return os.str();
}

RunSummary run_all(const std::string& config_dir, const RunOptions& opts) {
  const auto& table = experiments();
  auto config = load_config_dir(config_dir);
  if (auto g = config.find(""); g != config.end() && !g->second.empty())
    throw std::invalid_argument("config: keys outside a [claim:ID] section");

  std::vector<std::string> ids;
  for (const auto& c : catalog::claims()) ids.push_back(c.id);
  RunSummary summary;
  summary.claims.resize(ids.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t k; (k = next.fetch_add(1)) < ids.size();) {
      ClaimSummary& cs = summary.claims[k];
      cs.claim = ids[k];
      auto t0 = std::chrono::steady_clock::now();
      try {
        ParamMap ov;
        if (auto f = config.find(ids[k]); f != config.end()) ov = f->second;
        auto rows = reproduce(ids[k], ov, opts);
        cs.rows = rows.size();
        for (const auto& r : rows) cs.failed += r.pass ? 0 : 1;
      } catch (const std::exception& e) {
        cs.error = e.what();
      }
      cs.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  // Claims run in parallel only when the engine has spare workers.
  unsigned workers = std::min<unsigned>(worker_threads(), unsigned(ids.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  (void)table;

  summary.markdown = markdown_summary(summary.claims);
  if (!opts.out_dir.empty()) write_atomic((std::filesystem::path(opts.out_dir) / "summary.md").string(), summary.markdown);
  return summary;
}

}  // namespace cg::harness
