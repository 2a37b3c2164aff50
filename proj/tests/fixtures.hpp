#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "canonrep/process.hpp"

namespace fixtures {

using canonrep::Branch;
using canonrep::FiniteProcess;
using canonrep::NodeId;
using canonrep::ProcessBuilder;
using canonrep::Rational;
using canonrep::Value;
using canonrep::ValuePath;

inline Rational q(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// A nested description of a process tree, built with children first.
struct Tree {
  struct Arm {
    Value value;
    Rational prob;
    std::vector<Arm> sub;  // empty at the last step
  };
  std::vector<Arm> arms;
};

inline FiniteProcess build(std::size_t dim, std::size_t depth, const std::vector<Tree::Arm>& arms) {
  ProcessBuilder b(dim);
  std::function<NodeId(const std::vector<Tree::Arm>&)> rec = [&](const std::vector<Tree::Arm>& node) {
    std::vector<Branch> branches;
    for (const Tree::Arm& a : node) {
      branches.push_back(Branch{a.value, a.prob, a.sub.empty() ? canonrep::kLeaf : rec(a.sub)});
    }
    return b.add(std::move(branches));
  };
  const NodeId root = rec(arms);
  return std::move(b).build(root, depth);
}

inline FiniteProcess one_step(std::vector<std::pair<Value, Rational>> atoms) {
  std::vector<Tree::Arm> arms;
  for (auto& [v, p] : atoms) arms.push_back({v, p, {}});
  return build(atoms.front().first.dim(), 1, arms);
}

inline FiniteProcess fair_coin() { return one_step({{{q(-1)}, q(1, 2)}, {{q(1)}, q(1, 2)}}); }

/// {(+1, 2/3), (-2, 1/3)}, listed in that (non-ascending) order.
inline FiniteProcess skewed() { return one_step({{{q(1)}, q(2, 3)}, {{q(-2)}, q(1, 3)}}); }

/// f1 = +-1 fair; f2 = f1 * (independent fair sign).
inline FiniteProcess sign_times_coin() {
  std::vector<Tree::Arm> arms;
  for (long f1 : {-1L, 1L}) {
    std::vector<Tree::Arm> sub;
    for (long c : {-1L, 1L}) sub.push_back({{q(f1 * c)}, q(1, 2), {}});
    arms.push_back({{q(f1)}, q(1, 2), sub});
  }
  return build(1, 2, arms);
}

/// f1 = +-1 fair; after -1 the next step is +-1, after +1 it is +-2.
inline FiniteProcess scale_follows_sign() {
  std::vector<Tree::Arm> arms;
  arms.push_back({{q(-1)}, q(1, 2), {{{q(-1)}, q(1, 2), {}}, {{q(1)}, q(1, 2), {}}}});
  arms.push_back({{q(1)}, q(1, 2), {{{q(-2)}, q(1, 2), {}}, {{q(2)}, q(1, 2), {}}}});
  return build(1, 2, arms);
}

/// `depth` independent copies of a one-step law.
inline FiniteProcess iid(std::size_t depth, const std::vector<std::pair<Value, Rational>>& atoms) {
  std::function<std::vector<Tree::Arm>(std::size_t)> rec = [&](std::size_t left) {
    std::vector<Tree::Arm> arms;
    for (const auto& [v, p] : atoms) arms.push_back({v, p, left > 1 ? rec(left - 1) : std::vector<Tree::Arm>{}});
    return arms;
  };
  return build(atoms.front().first.dim(), depth, rec(depth));
}

/// Independent oracle for the path law: plain recursion over the unfolded tree.
inline std::map<ValuePath, Rational> enumerate_paths(const FiniteProcess& p) {
  std::map<ValuePath, Rational> out;
  ValuePath path;
  std::function<void(NodeId, const Rational&)> rec = [&](NodeId id, const Rational& w) {
    for (const Branch& b : p.node(id).branches) {
      path.push_back(b.value);
      if (b.child == canonrep::kLeaf) {
        out[path] += w * b.prob;
      } else {
        rec(b.child, w * b.prob);
      }
      path.pop_back();
    }
  };
  rec(p.root(), Rational(1));
  return out;
}

}  // namespace fixtures
