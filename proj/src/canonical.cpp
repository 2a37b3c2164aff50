#include "canonrep/canonical.hpp"

#include <algorithm>
#include <functional>

#include "canonrep/error.hpp"

namespace canonrep {

std::size_t Partition::locate(const Rational& x) const {
  auto it = std::upper_bound(cuts.begin() + 1, cuts.end() - 1, x);
  return static_cast<std::size_t>(it - cuts.begin()) - 1;
}

std::optional<std::size_t> Partition::find(const Value& v) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == v) return i;
  }
  return std::nullopt;
}

CellRepresentation::CellRepresentation(std::size_t dimension, std::size_t depth, std::vector<Partition> nodes,
                                       NodeId root, bool require_ascending)
    : dimension_(dimension), depth_(depth), nodes_(std::move(nodes)), root_(root) {
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Partition& part = nodes_[id];
    const std::string where = "node " + std::to_string(id);
    if (part.values.empty() || part.cuts.size() != part.values.size() + 1 ||
        part.children.size() != part.values.size()) {
      throw Error(ErrorKind::InvalidArgument, "malformed partition", where);
    }
    if (part.cuts.front() != 0 || part.cuts.back() != 1) {
      throw Error(ErrorKind::ProbSumNotOne, "cells do not tile [0,1)", where);
    }
    for (std::size_t i = 0; i < part.values.size(); ++i) {
      if (!(part.cuts[i] < part.cuts[i + 1])) throw Error(ErrorKind::NonPositiveProb, "empty or reversed cell", where);
      if (part.values[i].dim() != dimension_) throw Error(ErrorKind::DimensionMismatch, "value dimension", where);
      if (require_ascending && i > 0 && !(part.values[i - 1] < part.values[i])) {
        throw Error(ErrorKind::InvalidArgument, "values not strictly ascending", where);
      }
    }
  }
}

NodeId CellRepresentation::node_at(const ValuePath& prefix) const {
  if (prefix.size() >= depth_) throw Error(ErrorKind::UnreachablePrefix, "prefix too long", to_string(prefix));
  NodeId id = root_;
  for (const Value& v : prefix) {
    auto i = node(id).find(v);
    if (!i) throw Error(ErrorKind::UnreachablePrefix, "prefix not realizable", to_string(prefix));
    id = node(id).children[*i];
  }
  return id;
}

Rational conditional_cdf(const FiniteProcess& p, const ValuePath& prefix, const Value& t) {
  Rational below = 0;
  for (const auto& [v, q] : conditional_law(p, prefix)) {
    if (v < t) below += q;
  }
  return below;
}

Value quantile_function(const FiniteProcess& p, const ValuePath& prefix, const Rational& x) {
  if (!(x > 0 && x < 1)) throw Error(ErrorKind::XOutOfRange, "quantile level must lie in (0,1)", to_string(x));
  const DiscreteLaw law = conditional_law(p, prefix);
  for (std::size_t i = 0; i < law.size(); ++i) {
    const Rational lo = conditional_cdf(p, prefix, law[i].first);
    const Rational hi = i + 1 < law.size() ? conditional_cdf(p, prefix, law[i + 1].first) : Rational(1);
    if (lo <= x && x < hi) return law[i].first;
  }
  return law.back().first;
}

CellRepresentation canonical_representation(const FiniteProcess& p) {
  validate_process(p);
  const FiniteProcess agg = aggregate(p);
  std::vector<Partition> nodes(agg.nodes().size());
  for (std::size_t id = 0; id < agg.nodes().size(); ++id) {
    Partition& part = nodes[id];
    Rational cum = 0;
    part.cuts.push_back(cum);
    for (const Branch& b : agg.nodes()[id].branches) {
      cum += b.prob;
      part.cuts.push_back(cum);
      part.values.push_back(b.value);
      part.children.push_back(b.child);
    }
  }
  return CellRepresentation(agg.dimension(), agg.depth(), std::move(nodes), agg.root());
}

ValuePath evaluate(const CellRepresentation& r, std::span<const Rational> x) {
  if (x.size() != r.depth()) {
    throw Error(ErrorKind::InvalidArgument,
                "expected " + std::to_string(r.depth()) + " coordinates, got " + std::to_string(x.size()));
  }
  ValuePath out;
  out.reserve(x.size());
  NodeId id = r.root();
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0 && x[k] < 1)) {
      throw Error(ErrorKind::XOutOfRange, "coordinate must lie in (0,1)", "x_" + std::to_string(k + 1) + " = " + to_string(x[k]));
    }
    const Partition& part = r.node(id);
    const std::size_t i = part.locate(x[k]);
    out.push_back(part.values[i]);
    id = part.children[i];
  }
  return out;
}

PathLaw law_of_representation(const CellRepresentation& r) {
  PathLaw law;
  ValuePath path;
  std::function<void(NodeId, const Rational&)> rec = [&](NodeId id, const Rational& weight) {
    const Partition& part = r.node(id);
    for (std::size_t i = 0; i < part.size(); ++i) {
      path.push_back(part.values[i]);
      Rational w = weight * part.interval(i).length();
      if (path.size() == r.depth()) {
        law[path] += w;
      } else {
        rec(part.children[i], w);
      }
      path.pop_back();
    }
  };
  rec(r.root(), Rational(1));
  return law;
}

std::vector<Interval> coordinate_recovery(const CellRepresentation& r, const ValuePath& path) {
  if (path.size() != r.depth()) throw Error(ErrorKind::UnreachablePath, "path length differs from depth", to_string(path));
  std::vector<Interval> cells;
  NodeId id = r.root();
  for (const Value& v : path) {
    const Partition& part = r.node(id);
    auto i = part.find(v);
    if (!i) throw Error(ErrorKind::UnreachablePath, "value " + to_string(v) + " not in cell partition", to_string(path));
    cells.push_back(part.interval(*i));
    id = part.children[*i];
  }
  return cells;
}

AugmentedRepresentation::AugmentedRepresentation(CellRepresentation base) : base_(std::move(base)) {
  maps_.reserve(base_.nodes().size());
  for (const Partition& part : base_.nodes()) {
    std::vector<TieBreak> node_maps;
    node_maps.reserve(part.size());
    for (std::size_t i = 0; i < part.size(); ++i) node_maps.push_back(TieBreak{part.interval(i)});
    maps_.push_back(std::move(node_maps));
  }
}

const TieBreak& AugmentedRepresentation::tie_break(NodeId node, std::size_t branch) const {
  return maps_.at(static_cast<std::size_t>(node)).at(branch);
}

std::pair<Value, Rational> AugmentedRepresentation::evaluate_step(NodeId node, const Rational& x) const {
  if (!(x >= 0 && x < 1)) throw Error(ErrorKind::XOutOfRange, "coordinate must lie in [0,1)", to_string(x));
  const Partition& part = base_.node(node);
  const std::size_t i = part.locate(x);
  return {part.values[i], tie_break(node, i).apply(x)};
}

AugmentedRepresentation augment(CellRepresentation r) { return AugmentedRepresentation(std::move(r)); }

}  // namespace canonrep
