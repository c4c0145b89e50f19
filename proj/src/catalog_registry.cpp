#include <sstream>

#include "cg/catalog.hpp"

namespace cg::catalog {

const std::vector<ClaimInfo>& claims() {
  static const std::vector<ClaimInfo> table = {
      {"BMZ-VAL", "Big Match on Z has value 1/2",
       "k_win=40;radii=10,20,40;tol=0.05"},
      {"BMN-VAL", "Big Match on N: val(c_x) = (x+2)/(2x+2)", "x_max=10;radii=20,40,60;tol=0.02"},
      {"BMN-ATTAIN", "Big Match on N: 1/(n+1)^2 strategy wins with >= N/(2N+2)",
       "N=1,3,5,10;x=0,1,3,10;slack=0.02"},
      {"BMN-MR-DECAY", "Big Match on N: memoryless strategies attain little from far states",
       "x=5,10,20;cap=0.1;slack=1e-9"},
      {"TB-ATTAIN", "Turn-based Big Match on N: chain length (n+1)^2 wins with >= N/(2N+2)",
       "N=1,3,5,10;x=0,1,3,10;slack=0.02"},
      {"NOMR-AS", "Infinitely branching no-MR game: almost-sure winning strategy",
       "episodes=100000;cycles=20;entries=1..8;seed=20240611;threshold=0.99;halfwidth=0.005"},
      {"NOMR-DECAY", "Infinitely branching no-MR game: every MR strategy is held to eps from u", "eps=0.1"},
      {"NOMARKOV", "Delay gadget game: every Markov strategy is held to eps from u", "eps=0.1"},
      {"OPTMAX-23", "Optimal Maximizer needs infinite memory (concurrent, value 2/3)",
       "episodes=200000;seed=20240612;tol=0.005"},
      {"OPTMIN-12", "Optimal Minimizer needs infinite memory (infinitely branching, value 1/2)",
       "random_max=20;seed=20240613;tol=0.001"},
      {"ACYCLIC-MIN", "Acyclic games: MD Minimizer strategies are eps-optimal",
       "games=50;max_states=30;eps=0.5,0.1,0.01;seed=20240614"},
      {"PLASTER-1BIT", "Uniform eps-optimal public 1-bit strategies via plastering", "radius=25;eps=0.25"},
      {"WSTRASS", "Weierstrass product inequality, product/sum duality and tail products",
       "instances=10000;seed=20240615"},
  };
  return table;
}

std::optional<ClaimInfo> find_claim(const std::string& id) {
  for (const auto& c : claims())
    if (c.id == id) return c;
  return std::nullopt;
}

std::string claims_table() {
  std::ostringstream os;
  os << "id,theorem_ref,parameters\n";
  for (const auto& c : claims()) os << c.id << ",\"" << c.theorem_ref << "\",\"" << c.parameters << "\"\n";
  return os.str();
}

}  // namespace cg::catalog
