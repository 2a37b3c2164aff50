#include "canonrep/process.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "canonrep/error.hpp"

namespace canonrep {

FiniteProcess::FiniteProcess(std::size_t dimension, std::size_t depth, std::vector<Node> nodes, NodeId root)
    : dimension_(dimension), depth_(depth), nodes_(std::move(nodes)), root_(root) {}

NodeId ProcessBuilder::add(std::vector<Branch> branches) {
  nodes_.push_back(Node{std::move(branches)});
  return static_cast<NodeId>(nodes_.size() - 1);
}

FiniteProcess ProcessBuilder::build(NodeId root, std::size_t depth) && {
  return FiniteProcess(dimension_, depth, std::move(nodes_), root);
}

PairProcess::PairProcess(FiniteProcess joint) : joint_(std::move(joint)) {
  if (joint_.dimension() == 0 || joint_.dimension() % 2 != 0) {
    throw Error(ErrorKind::DimensionMismatch, "pair process needs an even value dimension");
  }
}

Value PairProcess::component(const Value& pair, int which) const {
  const std::size_t d = component_dim();
  return slice(pair, which == 0 ? 0 : d, d);
}

namespace {

template <class Visit>
void for_each_node(const FiniteProcess& p, Visit&& visit) {
  // visit(node, prefix) for every node of the unfolded tree above the leaves.
  ValuePath prefix;
  std::function<void(NodeId)> rec = [&](NodeId id) {
    const Node& n = p.node(id);
    visit(n, prefix);
    if (prefix.size() + 1 == p.depth()) return;
    for (const Branch& b : n.branches) {
      prefix.push_back(b.value);
      rec(b.child);
      prefix.pop_back();
    }
  };
  rec(p.root());
}

bool is_aggregated(const FiniteProcess& p) {
  for (const Node& n : p.nodes()) {
    for (std::size_t i = 1; i < n.branches.size(); ++i) {
      if (!(n.branches[i - 1].value < n.branches[i].value)) return false;
    }
  }
  return true;
}

}  // namespace

void validate_process(const FiniteProcess& p) {
  if (p.depth() == 0) throw Error(ErrorKind::RaggedDepth, "process depth must be at least 1", "[]");
  if (p.dimension() == 0) throw Error(ErrorKind::DimensionMismatch, "value dimension must be at least 1", "[]");
  const auto n_nodes = static_cast<NodeId>(p.nodes().size());
  std::set<std::pair<NodeId, std::size_t>> seen;
  ValuePath prefix;
  std::function<void(NodeId)> rec = [&](NodeId id) {
    const std::size_t depth = prefix.size();
    if (id < 0 || id >= n_nodes) {
      throw Error(ErrorKind::RaggedDepth, "path ends before depth " + std::to_string(p.depth()), to_string(prefix));
    }
    if (!seen.insert({id, depth}).second) return;
    const Node& n = p.node(id);
    if (n.branches.empty()) throw Error(ErrorKind::RaggedDepth, "node without branches", to_string(prefix));
    Rational total = 0;
    for (const Branch& b : n.branches) {
      if (b.value.dim() != p.dimension()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "value " + to_string(b.value) + " has dimension " + std::to_string(b.value.dim()) +
                        ", expected " + std::to_string(p.dimension()),
                    to_string(prefix));
      }
      if (sgn(b.prob) <= 0) {
        throw Error(ErrorKind::NonPositiveProb, "branch " + to_string(b.value) + " has probability " + to_string(b.prob),
                    to_string(prefix));
      }
      total += b.prob;
    }
    if (total != 1) {
      throw Error(ErrorKind::ProbSumNotOne, "branch probabilities sum to " + to_string(total), to_string(prefix));
    }
    for (const Branch& b : n.branches) {
      prefix.push_back(b.value);
      if (depth + 1 == p.depth()) {
        if (b.child != kLeaf) throw Error(ErrorKind::RaggedDepth, "path continues past depth " + std::to_string(p.depth()), to_string(prefix));
      } else {
        rec(b.child);
      }
      prefix.pop_back();
    }
  };
  rec(p.root());
}

void validate_law(const PathLaw& law) {
  Rational total = 0;
  for (const auto& [path, prob] : law) {
    if (sgn(prob) <= 0) throw Error(ErrorKind::NonPositiveProb, "path has probability " + to_string(prob), to_string(path));
    total += prob;
  }
  if (total != 1) throw Error(ErrorKind::ProbSumNotOne, "path law sums to " + to_string(total));
}

PathLaw joint_law(const FiniteProcess& p) {
  PathLaw law;
  ValuePath path;
  std::function<void(NodeId, const Rational&)> rec = [&](NodeId id, const Rational& weight) {
    for (const Branch& b : p.node(id).branches) {
      path.push_back(b.value);
      Rational w = weight * b.prob;
      if (path.size() == p.depth()) {
        law[path] += w;
      } else {
        rec(b.child, w);
      }
      path.pop_back();
    }
  };
  rec(p.root(), Rational(1));
  return law;
}

DiscreteLaw conditional_law(const FiniteProcess& p, const ValuePath& prefix) {
  if (prefix.size() >= p.depth()) {
    throw Error(ErrorKind::UnreachablePrefix, "prefix is as long as the process", to_string(prefix));
  }
  std::vector<std::pair<Rational, NodeId>> frontier{{Rational(1), p.root()}};
  for (const Value& v : prefix) {
    std::vector<std::pair<Rational, NodeId>> next;
    for (const auto& [w, id] : frontier) {
      for (const Branch& b : p.node(id).branches) {
        if (b.value == v) next.emplace_back(w * b.prob, b.child);
      }
    }
    if (next.empty()) throw Error(ErrorKind::UnreachablePrefix, "prefix not realizable", to_string(prefix));
    frontier = std::move(next);
  }
  Rational total = 0;
  std::vector<std::pair<Value, Rational>> atoms;
  for (const auto& [w, id] : frontier) {
    for (const Branch& b : p.node(id).branches) {
      atoms.emplace_back(b.value, w * b.prob);
      total += w * b.prob;
    }
  }
  DiscreteLaw law = aggregate_law(std::move(atoms));
  for (auto& [v, q] : law) q /= total;
  return law;
}

FiniteProcess aggregate(const FiniteProcess& p) {
  if (is_aggregated(p)) return p;
  ProcessBuilder builder(p.dimension());
  std::function<NodeId(const std::vector<std::pair<Rational, NodeId>>&, std::size_t)> merge =
      [&](const std::vector<std::pair<Rational, NodeId>>& mix, std::size_t depth) -> NodeId {
    struct Group {
      Rational mass = 0;
      std::vector<std::pair<Rational, NodeId>> children;
    };
    std::map<Value, Group> groups;
    Rational total = 0;
    for (const auto& [w, id] : mix) {
      for (const Branch& b : p.node(id).branches) {
        Rational m = w * b.prob;
        Group& g = groups[b.value];
        g.mass += m;
        g.children.emplace_back(m, b.child);
        total += m;
      }
    }
    std::vector<Branch> branches;
    branches.reserve(groups.size());
    for (auto& [value, g] : groups) {
      NodeId child = depth + 1 == p.depth() ? kLeaf : merge(g.children, depth + 1);
      branches.push_back(Branch{value, g.mass / total, child});
    }
    return builder.add(std::move(branches));
  };
  NodeId root = merge({{Rational(1), p.root()}}, 0);
  return std::move(builder).build(root, p.depth());
}

DiscreteLaw step_marginal(const PathLaw& law, std::size_t k) {
  std::vector<std::pair<Value, Rational>> atoms;
  atoms.reserve(law.size());
  for (const auto& [path, prob] : law) atoms.emplace_back(path.at(k), prob);
  return aggregate_law(std::move(atoms));
}

PathLaw component_law(const PathLaw& law, std::size_t offset, std::size_t len) {
  PathLaw out;
  for (const auto& [path, prob] : law) {
    ValuePath sub;
    sub.reserve(path.size());
    for (const Value& v : path) sub.push_back(slice(v, offset, len));
    out[sub] += prob;
  }
  return out;
}

MdsCheck is_mds(const FiniteProcess& p) {
  const FiniteProcess agg = aggregate(p);
  MdsCheck result;
  for_each_node(agg, [&](const Node& n, const ValuePath& prefix) {
    if (!result.ok) return;
    Value mean = zero_value(agg.dimension());
    for (const Branch& b : n.branches) mean = mean + b.prob * b.value;
    if (!mean.is_zero()) {
      result.ok = false;
      result.prefix = prefix;
      result.mean = mean;
    }
  });
  return result;
}

namespace {

DiscreteLaw component_marginal(const PairProcess& pq, const Node& n, int which) {
  std::vector<std::pair<Value, Rational>> atoms;
  atoms.reserve(n.branches.size());
  for (const Branch& b : n.branches) atoms.emplace_back(pq.component(b.value, which), b.prob);
  return aggregate_law(std::move(atoms));
}

}  // namespace

TangencyCheck are_tangent(const PairProcess& pq) {
  const PairProcess agg(aggregate(pq.process()));
  TangencyCheck result;
  for_each_node(agg.process(), [&](const Node& n, const ValuePath& prefix) {
    if (!result.ok) return;
    DiscreteLaw f = component_marginal(agg, n, 0);
    DiscreteLaw g = component_marginal(agg, n, 1);
    if (f != g) {
      result.ok = false;
      result.prefix = prefix;
      result.f_law = std::move(f);
      result.g_law = std::move(g);
    }
  });
  return result;
}

namespace {

struct CiData {
  std::size_t depth = 0;
  std::size_t d = 0;
  int checked = 1;
  PathLaw law;
  // Law of the checked component at step k given the pair history before it.
  std::map<ValuePath, DiscreteLaw> history_laws;
};

Value checked_part(const CiData& data, const Value& pair) {
  return slice(pair, data.checked == 0 ? 0 : data.d, data.d);
}
Value other_part(const CiData& data, const Value& pair) {
  return slice(pair, data.checked == 0 ? data.d : 0, data.d);
}

using StepMarginals = std::vector<std::map<Value, Rational>>;

StepMarginals marginals_of(const std::map<ValuePath, Rational>& joint, std::size_t depth) {
  StepMarginals m(depth);
  for (const auto& [path, prob] : joint) {
    for (std::size_t k = 0; k < depth; ++k) m[k][path[k]] += prob;
  }
  return m;
}

bool factors(const std::map<ValuePath, Rational>& joint, const StepMarginals& m) {
  for (const auto& [path, prob] : joint) {
    Rational prod = 1;
    for (std::size_t k = 0; k < m.size(); ++k) prod *= m[k].at(path[k]);
    if (prod != prob) return false;
  }
  return true;
}

DiscreteLaw as_law(const std::map<Value, Rational>& m) { return DiscreteLaw(m.begin(), m.end()); }

// Both helpers return an empty string on success and a reason otherwise.
std::string check_other_path_witness(const CiData& data) {
  std::map<ValuePath, std::map<ValuePath, Rational>> by_other;
  for (const auto& [path, prob] : data.law) {
    ValuePath c, o;
    for (const Value& v : path) {
      c.push_back(checked_part(data, v));
      o.push_back(other_part(data, v));
    }
    by_other[o][c] += prob;
  }
  std::map<ValuePath, StepMarginals> cond_marginals;
  for (auto& [o, joint] : by_other) {
    Rational total = 0;
    for (const auto& [c, prob] : joint) total += prob;
    for (auto& [c, prob] : joint) prob /= total;
    StepMarginals m = marginals_of(joint, data.depth);
    if (!factors(joint, m)) return "conditional joint law does not factor given other path " + to_string(o);
    cond_marginals.emplace(o, std::move(m));
  }
  for (const auto& [path, prob] : data.law) {
    ValuePath o;
    for (const Value& v : path) o.push_back(other_part(data, v));
    const StepMarginals& m = cond_marginals.at(o);
    ValuePath prefix;
    for (std::size_t k = 0; k < data.depth; ++k) {
      if (as_law(m[k]) != data.history_laws.at(prefix)) {
        return "step " + std::to_string(k + 1) + " law given the other path differs from its law given history " +
               to_string(prefix);
      }
      prefix.push_back(path[k]);
    }
  }
  return {};
}

std::string check_trivial_witness(const CiData& data) {
  std::map<ValuePath, Rational> joint;
  for (const auto& [path, prob] : data.law) {
    ValuePath c;
    for (const Value& v : path) c.push_back(checked_part(data, v));
    joint[c] += prob;
  }
  StepMarginals m = marginals_of(joint, data.depth);
  if (!factors(joint, m)) return "unconditional joint law does not factor";
  for (const auto& [prefix, law] : data.history_laws) {
    if (law != as_law(m[prefix.size()])) return "step law depends on history " + to_string(prefix);
  }
  return {};
}

}  // namespace

CiCheck satisfies_ci(const PairProcess& pq, int checked) {
  if (checked != 0 && checked != 1) throw Error(ErrorKind::InvalidArgument, "component index must be 0 or 1");
  const FiniteProcess agg = aggregate(pq.process());
  CiData data;
  data.depth = agg.depth();
  data.d = pq.component_dim();
  data.checked = checked;
  data.law = joint_law(agg);
  const PairProcess agg_pair(agg);
  for_each_node(agg, [&](const Node& n, const ValuePath& prefix) {
    data.history_laws.emplace(prefix, component_marginal(agg_pair, n, checked));
  });

  CiCheck result;
  result.reason = check_other_path_witness(data);
  if (result.reason.empty()) {
    result.witness = CiWitness::OtherComponentPath;
    return result;
  }
  if (check_trivial_witness(data).empty()) {
    result.witness = CiWitness::Trivial;
    return result;
  }
  result.ok = false;
  return result;
}

}  // namespace canonrep
