#include "canonrep/generate.hpp"

#include <algorithm>
#include <functional>

#include "canonrep/canonical.hpp"
#include "canonrep/error.hpp"
#include "canonrep/random.hpp"

namespace canonrep {

namespace {

void check_size(const GeneratorSpec& spec) {
  if (spec.depth == 0 || spec.depth > kMaxGeneratedDepth || spec.branching == 0 ||
      spec.branching > kMaxGeneratedBranching || spec.dimension == 0) {
    throw Error(ErrorKind::SizeGuard, "generator needs 1 <= depth <= " + std::to_string(kMaxGeneratedDepth) +
                                          ", 1 <= branching <= " + std::to_string(kMaxGeneratedBranching) +
                                          ", dimension >= 1");
  }
}

Rational random_coord(PhiloxStream& rng, int range) {
  static constexpr int kDenominators[] = {1, 1, 2, 3};
  const auto span = static_cast<std::uint64_t>(2 * range + 1);
  const int den = kDenominators[rng.uniform_below(4)];
  const long num = static_cast<long>(rng.uniform_below(span * static_cast<std::uint64_t>(den))) - range * den;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Value random_value(PhiloxStream& rng, const GeneratorSpec& spec) {
  std::vector<Rational> coords;
  for (std::size_t i = 0; i < spec.dimension; ++i) coords.push_back(random_coord(rng, spec.value_range));
  return Value(std::move(coords));
}

std::vector<Rational> random_probs(PhiloxStream& rng, std::size_t count) {
  std::vector<long> weights;
  long total = 0;
  for (std::size_t i = 0; i < count; ++i) {
    weights.push_back(static_cast<long>(rng.uniform_below(12)) + 1);
    total += weights.back();
  }
  std::vector<Rational> probs;
  for (long w : weights) {
    Rational q(w, total);
    q.canonicalize();
    probs.push_back(q);
  }
  return probs;
}

DiscreteLaw random_node_law(PhiloxStream& rng, const GeneratorSpec& spec) {
  const std::size_t count = rng.uniform_below(spec.branching) + 1;
  const std::vector<Rational> probs = random_probs(rng, count);
  DiscreteLaw atoms;
  Value weighted = zero_value(spec.dimension);
  for (std::size_t i = 0; i < count; ++i) {
    Value v = random_value(rng, spec);
    if (spec.mds && i + 1 == count) {
      v = Rational(-1) / probs[i] * weighted;
    }
    weighted = weighted + probs[i] * v;
    atoms.emplace_back(std::move(v), probs[i]);
  }
  return atoms;
}

}  // namespace

FiniteProcess random_process(const GeneratorSpec& spec) {
  check_size(spec);
  PhiloxStream rng(spec.seed, 0x67656e);
  ProcessBuilder builder(spec.dimension);
  std::function<NodeId(std::size_t)> rec = [&](std::size_t depth) -> NodeId {
    DiscreteLaw atoms = random_node_law(rng, spec);
    std::vector<Branch> branches;
    for (auto& [v, p] : atoms) {
      NodeId child = depth + 1 == spec.depth ? kLeaf : rec(depth + 1);
      branches.push_back(Branch{std::move(v), std::move(p), child});
    }
    return builder.add(std::move(branches));
  };
  NodeId root = rec(0);
  return std::move(builder).build(root, spec.depth);
}

PairProcess random_tangent_pair(const GeneratorSpec& spec) {
  check_size(spec);
  PhiloxStream rng(spec.seed, 0x70616972);
  ProcessBuilder builder(2 * spec.dimension);
  std::function<NodeId(std::size_t)> rec = [&](std::size_t depth) -> NodeId {
    const DiscreteLaw law = aggregate_law(random_node_law(rng, spec));
    Partition part;
    part.cuts.push_back(0);
    for (const auto& [v, p] : law) {
      part.cuts.push_back(part.cuts.back() + p);
      part.values.push_back(v);
      part.children.push_back(kLeaf);
    }
    Rational shift(static_cast<long>(rng.uniform_below(24)), 24);
    shift.canonicalize();
    auto wrap = [](Rational x) {
      if (x >= 1) x -= 1;
      return x;
    };
    std::vector<Rational> cuts(part.cuts);
    for (const Rational& c : part.cuts) cuts.push_back(c < shift ? Rational(c - shift + 1) : Rational(c - shift));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<std::pair<Value, Rational>> joint;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const Value& f = part.values[part.locate(cuts[c])];
      const Value& g = part.values[part.locate(wrap(cuts[c] + shift))];
      joint.emplace_back(concat(f, g), cuts[c + 1] - cuts[c]);
    }
    std::vector<Branch> branches;
    for (auto& [v, p] : aggregate_law(std::move(joint))) {
      NodeId child = depth + 1 == spec.depth ? kLeaf : rec(depth + 1);
      branches.push_back(Branch{std::move(v), std::move(p), child});
    }
    return builder.add(std::move(branches));
  };
  NodeId root = rec(0);
  return PairProcess(std::move(builder).build(root, spec.depth));
}

}  // namespace canonrep
