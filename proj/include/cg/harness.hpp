#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cg::harness {

using ParamMap = std::map<std::string, std::string>;

struct ExperimentConfig {
  std::string claim;
  ParamMap parameters;
  std::string output_path;  // CSV file; empty: not written
};

struct ResultRow {
  std::string claim;
  std::string param_json;  // parameter snapshot of this row
  double measured_lo = 0.0;
  double measured_hi = 0.0;
  double expected = 0.0;
  std::string expected_src;  // PAPER or DERIVED
  std::string rule;          // acceptance rule as text
  bool pass = false;
  double runtime_ms = 0.0;
};

// Parsed config text: `key = value` lines, `[claim:ID]` section headers,
// '#' comments. Keys before any section go under "".
std::map<std::string, ParamMap> parse_config(std::string_view text);
std::map<std::string, ParamMap> load_config_dir(const std::string& dir);

// Registry defaults of a claim.
ParamMap default_parameters(const std::string& claim);
// Defaults with overrides applied; unknown keys throw.
ParamMap resolve_parameters(const std::string& claim, const ParamMap& overrides);
// "key=value" -> (key, value); throws on malformed text.
std::pair<std::string, std::string> parse_override(std::string_view text);

// Typed access to resolved parameters.
double get_double(const ParamMap& p, const std::string& key);
int64_t get_int(const ParamMap& p, const std::string& key);
uint64_t get_seed(const ParamMap& p, const std::string& key);
// Comma separated values; "a..b" expands to the integers a..b.
std::vector<double> get_list(const ParamMap& p, const std::string& key);
std::vector<int64_t> get_int_list(const ParamMap& p, const std::string& key);

// Rows are built through this helper so that `pass` always comes from the
// rule's predicate.
ResultRow make_row(const std::string& claim, const std::string& param_json, double lo, double hi, double expected,
                   const std::string& src, const std::string& rule, bool holds);
// {"k":v,...} with keys in the given order.
std::string json_params(const std::vector<std::pair<std::string, std::string>>& kv);
std::string fmt(double v);

using Experiment = std::function<std::vector<ResultRow>(const ParamMap&)>;
// Experiments by claim id; throws at first use if a registry id has none.
const std::map<std::string, Experiment>& experiments();

struct RunOptions {
  std::string out_dir;       // CSV and summary target; empty: nothing written
  bool record_runtime = true;  // false writes runtime_ms = 0 for byte-stable files
};

std::vector<ResultRow> reproduce(const std::string& claim, const ParamMap& overrides, const RunOptions& opts = {});

struct ClaimSummary {
  std::string claim;
  size_t rows = 0;
  size_t failed = 0;
  double runtime_ms = 0.0;
  std::string error;  // set when the experiment threw
  bool pass() const { return error.empty() && failed == 0 && rows > 0; }
};
struct RunSummary {
  std::vector<ClaimSummary> claims;
  std::string markdown;
  bool pass() const;
};

// Runs every registered claim with defaults overlaid by the config files in
// config_dir (may be empty). Failures are collected, never thrown.
RunSummary run_all(const std::string& config_dir, const RunOptions& opts = {});

std::string csv_header();
std::string to_csv(const std::vector<ResultRow>& rows, bool record_runtime = true);
std::string markdown_summary(const std::vector<ClaimSummary>& claims);

// Writes through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);

namespace detail {
// Registration tables filled by the experiment translation units.
void register_concurrent(std::map<std::string, Experiment>& out);
void register_branching(std::map<std::string, Experiment>& out);
}  // namespace detail

}  // namespace cg::harness
