#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cg/catalog.hpp"
#include "cg/harness.hpp"

using namespace cg::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("cg-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config text: sections, comments and errors") {
  auto c = parse_config("# top\n[claim:BMN-VAL]\nx_max = 3  # fewer rows\n tol=0.05\n\n[claim:WSTRASS]\ninstances=10\n");
  CHECK(c.at("BMN-VAL").at("x_max") == "3");
  CHECK(c.at("BMN-VAL").at("tol") == "0.05");
  CHECK(c.at("WSTRASS").at("instances") == "10");
  CHECK_THROWS(parse_config("[claim:NOPE]\nx=1\n"));
  CHECK_THROWS(parse_config("[section]\n"));
  CHECK_THROWS(parse_config("[claim:BMN-VAL]\njust text\n"));
  CHECK_THROWS(parse_config("[claim:BMN-VAL]\n= 3\n"));
}

TEST_CASE("parameters: defaults, overrides and typed access") {
  for (const auto& ci : cg::catalog::claims()) CHECK_FALSE(default_parameters(ci.id).empty());
  CHECK_THROWS(default_parameters("NOPE"));
  auto p = resolve_parameters("BMN-VAL", {{"x_max", "4"}});
  CHECK(get_int(p, "x_max") == 4);
  CHECK(get_double(p, "tol") == doctest::Approx(0.02));
  CHECK(get_int_list(p, "radii") == std::vector<int64_t>{20, 40, 60});
  CHECK_THROWS(resolve_parameters("BMN-VAL", {{"colour", "red"}}));

  CHECK(parse_override("a=b") == std::make_pair(std::string("a"), std::string("b")));
  CHECK(parse_override(" k = 1,2 ").second == "1,2");
  CHECK_THROWS(parse_override("novalue"));
  CHECK_THROWS(parse_override("=3"));
  CHECK_THROWS(parse_override("k="));

  ParamMap q{{"r", "1..4,9"}, {"bad", "3x"}, {"neg", "-2"}, {"backwards", "5..2"}, {"frac", "1.5,2"}};
  CHECK(get_int_list(q, "r") == std::vector<int64_t>{1, 2, 3, 4, 9});
  CHECK_THROWS(get_int(q, "bad"));
  CHECK_THROWS(get_seed(q, "neg"));
  CHECK_THROWS(get_int_list(q, "backwards"));
  CHECK_THROWS(get_int_list(q, "frac"));
  CHECK_THROWS(get_double(q, "missing"));
}

TEST_CASE("rows: json snapshots and csv quoting") {
  CHECK(json_params({{"x", "3"}, {"form", "tb"}}) == R"({"x":3,"form":"tb"})");
  auto r = make_row("BMN-VAL", R"({"x":1})", 0.25, 0.75, 0.5, "PAPER", "lo <= expected <= hi", true);
  CHECK(r.pass);
  r.runtime_ms = 12.5;
  auto csv = to_csv({r});
  CHECK(csv.rfind(csv_header(), 0) == 0);
  CHECK(csv.find(R"("{""x"":1}")") != std::string::npos);
  CHECK(csv.find(",true,12.5\n") != std::string::npos);
  CHECK(to_csv({r}, false).find(",true,0\n") != std::string::npos);
  CHECK(fmt(0.1) == "0.1");
}

TEST_CASE("every registry claim has an experiment") {
  const auto& ex = experiments();
  CHECK(ex.size() == cg::catalog::claims().size());
  for (const auto& ci : cg::catalog::claims()) CHECK(ex.count(ci.id) == 1);
}

TEST_CASE("reproduce: byte-identical files without runtimes") {
  auto a = scratch("repro-a"), b = scratch("repro-b");
  ParamMap ov{{"instances", "500"}};
  RunOptions oa{a.string(), false}, ob{b.string(), false};
  auto ra = reproduce("WSTRASS", ov, oa);
  auto rb = reproduce("WSTRASS", ov, ob);
  CHECK_FALSE(ra.empty());
  CHECK(slurp(a / "WSTRASS.csv") == slurp(b / "WSTRASS.csv"));
  CHECK(slurp(a / "WSTRASS.csv") == to_csv(ra, false));
  CHECK_THROWS(reproduce("NOPE", {}, {}));
  CHECK_THROWS(reproduce("WSTRASS", {{"instances", "many"}}, {}));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run-all: a zero tolerance fails only its own claim") {
  auto cfg = scratch("cfg"), out = scratch("out");
  {
    std::ofstream f(cfg / "tight.conf");
    f << "[claim:BMN-VAL]\ntol = 0\nx_max = 2\n";
  }
  auto s = run_all(cfg.string(), RunOptions{out.string(), false});
  REQUIRE(s.claims.size() == cg::catalog::claims().size());
  for (const auto& c : s.claims) {
    INFO(c.claim << " " << c.error);
    CHECK(c.pass() == (c.claim != "BMN-VAL"));
    CHECK(fs::exists(out / (c.claim + ".csv")));
  }
  CHECK_FALSE(s.pass());
  CHECK(fs::exists(out / "summary.md"));
  CHECK(s.markdown.find("FAIL") != std::string::npos);

  // Values stay text until an experiment reads them.
  {
    std::ofstream f(cfg / "tight.conf");
    f << "[claim:WSTRASS]\ninstances = lots\n";
  }
  auto cfg2 = load_config_dir(cfg.string());
  CHECK(cfg2.at("WSTRASS").at("instances") == "lots");
  CHECK_THROWS(load_config_dir((cfg / "missing").string()));
  fs::remove_all(cfg);
  fs::remove_all(out);
}
