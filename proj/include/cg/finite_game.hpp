#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cg/game.hpp"

namespace cg {

using NodeIdx = uint32_t;

struct Edge {
  NodeIdx to;
  double p;
};
using Cell = std::vector<Edge>;

// Explicit finite game in cell form. Every node has na x nb cells, cell (a,b) at
// offset a*nb+b holding a distribution over nodes. Turn nodes of Maximizer have
// nb = 1, of Minimizer na = 1; Random nodes and absorbing nodes have one cell.
class FiniteGame final : public Game {
 public:
  struct Node {
    NodeKind kind = NodeKind::Random;
    bool target = false;
    uint32_t na = 1, nb = 1;
    uint32_t cell0 = 0;
  };

  class Builder {
   public:
    explicit Builder(std::string name) : name_(std::move(name)) {}
    // Index of `s`, allocating a fresh undefined node if unseen.
    NodeIdx intern(const StateId& s);
    bool known(const StateId& s) const { return index_.count(s) != 0; }
    std::optional<NodeIdx> find(const StateId& s) const;
    size_t size() const { return ids_.size(); }
    const StateId& id(NodeIdx i) const { return ids_[i]; }
    void define(NodeIdx i, NodeKind kind, bool target, uint32_t na, uint32_t nb, std::vector<Cell> cells);
    void absorbing(NodeIdx i, bool target);
    bool defined(NodeIdx i) const { return i < defined_.size() && defined_[i]; }
    FiniteGame build() &&;

   private:
    std::string name_;
    std::vector<StateId> ids_;
    std::unordered_map<StateId, NodeIdx> index_;
    std::vector<Node> nodes_;
    std::vector<std::vector<Cell>> cells_;
    std::vector<char> defined_;
  };

  FiniteGame() = default;

  // Game interface.
  std::string name() const override { return name_; }
  NodeKind kind(const StateId& s) const override { return nodes_[at(s)].kind; }
  bool is_target(const StateId& s) const override { return nodes_[at(s)].target; }
  Count num_actions(const StateId& s, Player p) const override;
  Dist<StateId> transition(const StateId& s, uint64_t a, uint64_t b) const override;
  std::vector<Family> families() const override;

  // Index-level access used by solvers.
  size_t size() const { return nodes_.size(); }
  const Node& node(NodeIdx i) const { return nodes_[i]; }
  const StateId& id(NodeIdx i) const { return ids_[i]; }
  NodeIdx at(const StateId& s) const;
  std::optional<NodeIdx> find(const StateId& s) const;
  size_t num_cells() const { return cell_begin_.size() - 1; }
  uint32_t cell_index(NodeIdx i, uint32_t a, uint32_t b) const { return nodes_[i].cell0 + a * nodes_[i].nb + b; }
  // Edges of a cell as parallel arrays for vectorized kernels.
  uint32_t cell_begin(uint32_t c) const { return cell_begin_[c]; }
  uint32_t cell_end(uint32_t c) const { return cell_begin_[c + 1]; }
  const int32_t* edge_to() const { return edge_to_.data(); }
  const double* edge_p() const { return edge_p_.data(); }
  size_t num_edges() const { return edge_to_.size(); }

  // Set when the game has no target and no boundary reachable from its start nodes.
  bool degenerate = false;
  std::vector<NodeIdx> starts;

 private:
  std::string name_;
  std::vector<Node> nodes_;
  std::vector<StateId> ids_;
  std::unordered_map<StateId, NodeIdx> index_;
  std::vector<uint32_t> cell_begin_;
  std::vector<int32_t> edge_to_;
  std::vector<double> edge_p_;
};

enum class BoundaryPolicy {
  PessimisticMax,  // leaving the window loses for Maximizer
  OptimisticMax,   // leaving the window counts as reaching the target
  Certified,       // leaving the window enters a tail gadget when one is certified, else counts as target
};

std::string policy_name(BoundaryPolicy p);

struct Truncation {
  std::function<bool(const StateId&)> inside;
  BoundaryPolicy policy = BoundaryPolicy::PessimisticMax;
  int64_t radius = 0;
  std::vector<StateId> starts;
  std::optional<TailCertificate> certificate;
  uint64_t branch_budget = 4096;  // enumerated choices at infinitely branching nodes
  double tail_budget = 1e-15;     // unenumerated mass of countable distributions
  size_t max_states = 4000000;
};

// Boundary and gadget node ids.
StateId boundary_id();
StateId win_sink_id();
StateId lose_sink_id();

// Breadth-first exploration from the truncation's starts, restricted to its window.
FiniteGame explore(const Game& g, const Truncation& t);

// Truncation to an explicit finite window.
FiniteGame truncate(const Game& g, const std::vector<StateId>& window, BoundaryPolicy policy,
                    std::optional<TailCertificate> certificate = std::nullopt);

}  // namespace cg
