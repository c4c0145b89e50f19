#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cg/catalog.hpp"
#include "cg/harness.hpp"

namespace cg::harness {

namespace {

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

const std::string& raw(const ParamMap& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw std::invalid_argument("missing parameter: " + key);
  return it->second;
}

double to_double(const std::string& key, const std::string& v) {
  size_t used = 0;
  double x;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("parameter " + key + ": not a number: " + v);
  }
  if (used != v.size()) throw std::invalid_argument("parameter " + key + ": trailing text in " + v);
  return x;
}

int64_t to_int(const std::string& key, const std::string& v) {
  size_t used = 0;
  long long x;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("parameter " + key + ": not an integer: " + v);
  }
  if (used != v.size()) throw std::invalid_argument("parameter " + key + ": trailing text in " + v);
  return x;
}

}  // namespace

std::map<std::string, ParamMap> parse_config(std::string_view text) {
  std::map<std::string, ParamMap> out;
  std::string section;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.rfind("[claim:", 0) != 0)
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad section header " + t);
      section = trim(t.substr(7, t.size() - 8));
      if (!catalog::find_claim(section)) throw std::invalid_argument("config: unknown claim " + section);
      out[section];
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string k = trim(t.substr(0, eq)), v = trim(t.substr(eq + 1));
    if (k.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    out[section][k] = v;
  }
  return out;
}

std::map<std::string, ParamMap> load_config_dir(const std::string& dir) {
  std::map<std::string, ParamMap> out;
  if (dir.empty()) return out;
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::invalid_argument("config dir not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && (e.path().extension() == ".conf" || e.path().extension() == ".cfg")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    for (auto& [sec, kv] : parse_config(ss.str()))
      for (auto& [k, v] : kv) out[sec][k] = v;
  }
  return out;
}

ParamMap default_parameters(const std::string& claim) {
  auto info = catalog::find_claim(claim);
  if (!info) throw std::invalid_argument("unknown claim: " + claim);
  ParamMap p;
  for (const auto& kv : split(info->parameters, ';')) {
    if (kv.empty()) continue;
    p.insert(parse_override(kv));
  }
  return p;
}

ParamMap resolve_parameters(const std::string& claim, const ParamMap& overrides) {
  ParamMap p = default_parameters(claim);
  for (const auto& [k, v] : overrides) {
    auto it = p.find(k);
    if (it == p.end()) throw std::invalid_argument(claim + ": unknown parameter " + k);
    it->second = v;
  }
  return p;
}

std::pair<std::string, std::string> parse_override(std::string_view text) {
  auto eq = text.find('=');
  if (eq == std::string_view::npos) throw std::invalid_argument("malformed override (want key=value): " + std::string(text));
  std::string k = trim(text.substr(0, eq)), v = trim(text.substr(eq + 1));
  if (k.empty() || v.empty()) throw std::invalid_argument("malformed override: " + std::string(text));
  return {k, v};
}

double get_double(const ParamMap& p, const std::string& key) { return to_double(key, raw(p, key)); }
int64_t get_int(const ParamMap& p, const std::string& key) { return to_int(key, raw(p, key)); }
uint64_t get_seed(const ParamMap& p, const std::string& key) {
  int64_t s = get_int(p, key);
  if (s < 0) throw std::invalid_argument("parameter " + key + ": negative seed");
  return uint64_t(s);
}

std::vector<double> get_list(const ParamMap& p, const std::string& key) {
  std::vector<double> out;
  for (const auto& part : split(raw(p, key), ',')) {
    if (auto dd = part.find(".."); dd != std::string::npos) {
      int64_t a = to_int(key, part.substr(0, dd)), b = to_int(key, part.substr(dd + 2));
      if (b < a || b - a > 1000000) throw std::invalid_argument("parameter " + key + ": bad range " + part);
      for (int64_t x = a; x <= b; ++x) out.push_back(double(x));
    } else {
      out.push_back(to_double(key, part));
    }
  }
  if (out.empty()) throw std::invalid_argument("parameter " + key + ": empty list");
  return out;
}

std::vector<int64_t> get_int_list(const ParamMap& p, const std::string& key) {
  std::vector<int64_t> out;
  for (double v : get_list(p, key)) {
    if (v != std::floor(v)) throw std::invalid_argument("parameter " + key + ": not an integer list");
    out.push_back(int64_t(v));
  }
  return out;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string json_params(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string s = "{";
  for (size_t i = 0; i < kv.size(); ++i) {
    if (i) s += ",";
    s += "\"" + kv[i].first + "\":";
    const std::string& v = kv[i].second;
    bool numeric = !v.empty() && v.find_first_not_of("0123456789.-+eE") == std::string::npos;
    s += numeric ? v : "\"" + v + "\"";
  }
  return s + "}";
}

ResultRow make_row(const std::string& claim, const std::string& param_json, double lo, double hi, double expected,
                   const std::string& src, const std::string& rule, bool holds) {
  ResultRow r;
  r.claim = claim;
  r.param_json = param_json;
  r.measured_lo = lo;
  r.measured_hi = hi;
  r.expected = expected;
  r.expected_src = src;
  r.rule = rule;
  r.pass = holds && !std::isnan(lo) && !std::isnan(hi);
  return r;
}

}  // namespace cg::harness
