#include "canonrep/mds.hpp"

#include <functional>

#include "canonrep/error.hpp"

namespace canonrep {

CellRepresentation represent_mds(const FiniteProcess& p) {
  validate_process(p);
  if (MdsCheck check = is_mds(p); !check.ok) {
    throw Error(ErrorKind::NotMartingaleDifference, "conditional mean " + to_string(check.mean) + " is not zero",
                to_string(check.prefix));
  }
  CellRepresentation r = canonical_representation(p);
  if (SectionReport report = verify_zero_sections(r); sgn(report.max_abs_deviation) != 0) {
    throw Error(ErrorKind::NotMartingaleDifference, "section integral deviates by " + to_string(report.max_abs_deviation));
  }
  return r;
}

SectionReport verify_zero_sections(const CellRepresentation& r) {
  SectionReport report;
  report.max_abs_deviation = 0;
  ValuePath prefix;
  std::function<void(NodeId)> rec = [&](NodeId id) {
    const Partition& part = r.node(id);
    Value integral = zero_value(r.dimension());
    for (std::size_t i = 0; i < part.size(); ++i) integral = integral + part.interval(i).length() * part.values[i];
    Rational dev = max_abs_coord(integral);
    if (dev > report.max_abs_deviation) report.max_abs_deviation = dev;
    report.nodes.push_back(NodeDeviation{prefix, std::move(integral)});
    if (prefix.size() + 1 == r.depth()) return;
    for (std::size_t i = 0; i < part.size(); ++i) {
      prefix.push_back(part.values[i]);
      rec(part.children[i]);
      prefix.pop_back();
    }
  };
  rec(r.root());
  return report;
}

std::pair<ValuePath, ValuePath> DecoupledRepresentation::evaluate(std::span<const Rational> x,
                                                                  std::span<const Rational> y) const {
  if (x.size() != base_.depth() || y.size() != base_.depth()) {
    throw Error(ErrorKind::InvalidArgument, "coordinate vectors must have length " + std::to_string(base_.depth()));
  }
  ValuePath u, v;
  NodeId id = base_.root();
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (const Rational* c : {&x[k], &y[k]}) {
      if (!(*c > 0 && *c < 1)) throw Error(ErrorKind::XOutOfRange, "coordinate must lie in (0,1)", to_string(*c));
    }
    const Partition& part = base_.node(id);
    const std::size_t i = part.locate(x[k]);
    u.push_back(part.values[i]);
    v.push_back(part.values[part.locate(y[k])]);
    id = part.children[i];
  }
  return {std::move(u), std::move(v)};
}

DecoupledRepresentation construct_ci_copy(CellRepresentation r) { return DecoupledRepresentation(std::move(r)); }

PairProcess pair_law(const DecoupledRepresentation& d) {
  const CellRepresentation& r = d.base();
  ProcessBuilder builder(2 * r.dimension());
  // One pair node per base node: the law of (u_n, v_n) given the pair history
  // depends only on the x-history, so branches with the same x-cell share it.
  std::vector<NodeId> built(r.nodes().size(), kLeaf);
  std::function<NodeId(NodeId, std::size_t)> rec = [&](NodeId id, std::size_t depth) -> NodeId {
    if (built[static_cast<std::size_t>(id)] != kLeaf) return built[static_cast<std::size_t>(id)];
    const Partition& part = r.node(id);
    std::vector<NodeId> children(part.size(), kLeaf);
    if (depth + 1 < r.depth()) {
      for (std::size_t i = 0; i < part.size(); ++i) children[i] = rec(part.children[i], depth + 1);
    }
    std::vector<Branch> branches;
    branches.reserve(part.size() * part.size());
    for (std::size_t i = 0; i < part.size(); ++i) {
      for (std::size_t j = 0; j < part.size(); ++j) {
        branches.push_back(Branch{concat(part.values[i], part.values[j]),
                                  part.interval(i).length() * part.interval(j).length(), children[i]});
      }
    }
    return built[static_cast<std::size_t>(id)] = builder.add(std::move(branches));
  };
  NodeId root = rec(r.root(), 0);
  return PairProcess(std::move(builder).build(root, r.depth()));
}

}  // namespace canonrep
