#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "canonrep/process.hpp"

namespace canonrep {

/// Half-open [lo, hi) inside [0, 1].
struct Interval {
  Rational lo;
  Rational hi;

  Rational length() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x < hi; }
  Rational midpoint() const { return (lo + hi) / 2; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// One node of a cell representation: the unit interval cut at
/// 0 = cuts[0] < cuts[1] < ... < cuts[B] = 1, cell i carrying values[i].
struct Partition {
  std::vector<Rational> cuts;
  std::vector<Value> values;
  std::vector<NodeId> children;

  std::size_t size() const noexcept { return values.size(); }
  Interval interval(std::size_t i) const { return {cuts[i], cuts[i + 1]}; }
  /// Index of the cell containing x in [0, 1); boundaries go right.
  std::size_t locate(const Rational& x) const;
  /// Index of the cell carrying value v, if any.
  std::optional<std::size_t> find(const Value& v) const;
};

/// Piecewise-constant functions g_n on [0,1]^n: walking x_1, x_2, ... through
/// nested partitions yields the value path.
class CellRepresentation {
 public:
  CellRepresentation() = default;
  /// Checks tiling and (when `require_ascending`) strictly ascending values.
  CellRepresentation(std::size_t dimension, std::size_t depth, std::vector<Partition> nodes, NodeId root = 0,
                     bool require_ascending = true);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t depth() const noexcept { return depth_; }
  NodeId root() const noexcept { return root_; }
  const Partition& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<Partition>& nodes() const noexcept { return nodes_; }

  /// Node reached by a value prefix.
  NodeId node_at(const ValuePath& prefix) const;

 private:
  std::size_t dimension_ = 1;
  std::size_t depth_ = 0;
  std::vector<Partition> nodes_;
  NodeId root_ = 0;
};

/// Pr(next value < t | prefix) under the lexicographic strict order.
Rational conditional_cdf(const FiniteProcess& p, const ValuePath& prefix, const Value& t);

/// The atom v with cdf(v) <= x < cdf(next atom), for x in (0, 1).
Value quantile_function(const FiniteProcess& p, const ValuePath& prefix, const Rational& x);

CellRepresentation canonical_representation(const FiniteProcess& p);

ValuePath evaluate(const CellRepresentation& r, std::span<const Rational> x);

PathLaw law_of_representation(const CellRepresentation& r);

/// The chain of cells whose values spell out `path`.
std::vector<Interval> coordinate_recovery(const CellRepresentation& r, const ValuePath& path);

/// The increasing affine bijection of a cell onto [0, 1).
struct TieBreak {
  Interval cell;

  Rational apply(const Rational& x) const { return (x - cell.lo) / cell.length(); }
  Rational invert(const Rational& t) const { return cell.lo + t * cell.length(); }
};

/// A cell representation with a tie-break coordinate on every branch, so the
/// step map x -> (value, tie) is strictly increasing and invertible.
class AugmentedRepresentation {
 public:
  explicit AugmentedRepresentation(CellRepresentation base);

  const CellRepresentation& base() const noexcept { return base_; }
  const TieBreak& tie_break(NodeId node, std::size_t branch) const;

  /// (value, tie) of coordinate x at a node.
  std::pair<Value, Rational> evaluate_step(NodeId node, const Rational& x) const;

 private:
  CellRepresentation base_;
  std::vector<std::vector<TieBreak>> maps_;
};

AugmentedRepresentation augment(CellRepresentation r);

}  // namespace canonrep
