#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "canonrep/value.hpp"

namespace canonrep {

using NodeId = std::int32_t;
inline constexpr NodeId kLeaf = -1;

struct Branch {
  Value value;
  Rational prob;
  NodeId child = kLeaf;
};

struct Node {
  std::vector<Branch> branches;
};

/// A finitely supported adapted sequence of depth N stored as a node arena.
/// Each node at depth k < N carries the conditional law of step k+1 given the
/// history that reaches it. Children may be shared between branches (the
/// arena is then a DAG); every operation treats it as the unfolded tree.
class FiniteProcess {
 public:
  FiniteProcess() = default;
  FiniteProcess(std::size_t dimension, std::size_t depth, std::vector<Node> nodes, NodeId root = 0);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t depth() const noexcept { return depth_; }
  NodeId root() const noexcept { return root_; }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

 private:
  std::size_t dimension_ = 1;
  std::size_t depth_ = 0;
  std::vector<Node> nodes_;
  NodeId root_ = 0;
};

/// Incremental construction; children must be added before their parents.
class ProcessBuilder {
 public:
  explicit ProcessBuilder(std::size_t dimension) : dimension_(dimension) {}

  NodeId add(std::vector<Branch> branches);
  FiniteProcess build(NodeId root, std::size_t depth) &&;

 private:
  std::size_t dimension_;
  std::vector<Node> nodes_;
};

/// Two sequences (f_n), (g_n) on one filtration, encoded as a single process
/// whose values are the concatenations (f_n, g_n) in Q^{2d}.
class PairProcess {
 public:
  PairProcess() = default;
  explicit PairProcess(FiniteProcess joint);

  const FiniteProcess& process() const noexcept { return joint_; }
  std::size_t component_dim() const noexcept { return joint_.dimension() / 2; }
  std::size_t depth() const noexcept { return joint_.depth(); }

  /// Component 0 is f, component 1 is g.
  Value component(const Value& pair, int which) const;

 private:
  FiniteProcess joint_;
};

using PathLaw = std::map<ValuePath, Rational>;

void validate_process(const FiniteProcess& p);
void validate_law(const PathLaw& law);

PathLaw joint_law(const FiniteProcess& p);

/// Law of the next value given that the first prefix.size() values equal prefix.
DiscreteLaw conditional_law(const FiniteProcess& p, const ValuePath& prefix);

/// Equivalent process in which every node has distinct values in ascending
/// order. Branches sharing a value are merged and their subtrees mixed with
/// weights proportional to the merged probabilities, so the nodes are exactly
/// the value histories.
FiniteProcess aggregate(const FiniteProcess& p);

/// Marginal law of step k (0-based) of a path law.
DiscreteLaw step_marginal(const PathLaw& law, std::size_t k);

/// Law of the sub-paths formed by coordinates [offset, offset + len) of each value.
PathLaw component_law(const PathLaw& law, std::size_t offset, std::size_t len);

struct MdsCheck {
  bool ok = true;
  ValuePath prefix;
  Value mean;
};

MdsCheck is_mds(const FiniteProcess& p);

struct TangencyCheck {
  bool ok = true;
  ValuePath prefix;
  DiscreteLaw f_law;
  DiscreteLaw g_law;
};

TangencyCheck are_tangent(const PairProcess& pq);

enum class CiWitness { None, OtherComponentPath, Trivial };

struct CiCheck {
  bool ok = true;
  CiWitness witness = CiWitness::None;
  /// Why the sigma(other path) candidate failed, when it did.
  std::string reason;
};

/// Condition (C.I.) for the component `checked` (0 = f, 1 = g) of a pair
/// process. A witnessing sigma field G is searched among sigma(other
/// component's full path) and the trivial field; for each, the conditional
/// joint law given G must factor over steps, and the law of each step given G
/// must equal its law given the pair history before that step.
CiCheck satisfies_ci(const PairProcess& pq, int checked);

}  // namespace canonrep
