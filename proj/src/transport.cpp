#include "canonrep/transport.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "canonrep/error.hpp"

namespace canonrep {

Rational TransportMap::apply(const Rational& x) const {
  auto it = std::upper_bound(pieces.begin(), pieces.end(), x,
                             [](const Rational& v, const TransportPiece& p) { return v < p.source.lo; });
  if (it == pieces.begin()) throw Error(ErrorKind::XOutOfRange, "point left of every source cell", to_string(x));
  const TransportPiece& piece = *std::prev(it);
  if (!piece.source.contains(x)) throw Error(ErrorKind::XOutOfRange, "point outside the source cells", to_string(x));
  return piece.map(x);
}

Rational generalized_inverse(const AugmentedRepresentation& r, const ValuePath& prefix, const Value& s,
                             const Rational& tie) {
  if (!(tie >= 0 && tie < 1)) throw Error(ErrorKind::XOutOfRange, "tie coordinate must lie in [0,1)", to_string(tie));
  const NodeId id = r.base().node_at(prefix);
  auto i = r.base().node(id).find(s);
  if (!i) throw Error(ErrorKind::NotAnAtom, "value " + to_string(s) + " is not an atom of the node", to_string(prefix));
  return r.tie_break(id, *i).invert(tie);
}

namespace {

// The h-step partition of a pair node: pair cells sharing an f-value are
// contiguous, so the f-cells are unions of consecutive pair cells.
std::map<Value, Interval> f_cells(const Partition& part, std::size_t d) {
  std::map<Value, Interval> out;
  for (std::size_t i = 0; i < part.size(); ++i) {
    Value f = slice(part.values[i], 0, d);
    auto [it, fresh] = out.try_emplace(f, part.interval(i));
    if (!fresh) {
      if (it->second.hi != part.cuts[i]) {
        throw Error(ErrorKind::InvalidArgument, "pair cells with f-value " + to_string(f) + " are not contiguous");
      }
      it->second.hi = part.cuts[i + 1];
    }
  }
  return out;
}

TransportMap section_map(const Partition& part, std::size_t d, const ValuePath& history) {
  const std::map<Value, Interval> targets = f_cells(part, d);
  std::map<Value, Rational> cursor;
  for (const auto& [v, cell] : targets) cursor.emplace(v, cell.lo);
  TransportMap map;
  map.history = history;
  for (std::size_t i = 0; i < part.size(); ++i) {
    const Value g = slice(part.values[i], d, d);
    auto c = cursor.find(g);
    if (c == cursor.end()) {
      throw Error(ErrorKind::NotTangent, "g-value " + to_string(g) + " has no f-cell", to_string(history));
    }
    const Interval source = part.interval(i);
    Interval target{c->second, c->second + source.length()};
    if (target.hi > targets.at(g).hi) {
      throw Error(ErrorKind::NotTangent, "g-mass of " + to_string(g) + " exceeds its f-mass", to_string(history));
    }
    c->second = target.hi;
    map.pieces.push_back(TransportPiece{source, std::move(target)});
  }
  for (const auto& [v, cell] : targets) {
    if (cursor.at(v) != cell.hi) {
      throw Error(ErrorKind::NotTangent, "f-mass of " + to_string(v) + " exceeds its g-mass", to_string(history));
    }
  }
  return map;
}

}  // namespace

std::vector<StepTransport> build_transport(const PairProcess& pq, const CellRepresentation& base) {
  if (TangencyCheck t = are_tangent(pq); !t.ok) {
    throw Error(ErrorKind::NotTangent, "conditional laws of f and g differ", to_string(t.prefix));
  }
  if (base.dimension() != pq.process().dimension() || base.depth() != pq.depth()) {
    throw Error(ErrorKind::DimensionMismatch, "base representation does not match the pair process");
  }
  const std::size_t d = pq.component_dim();
  std::vector<StepTransport> steps(base.depth());
  for (std::size_t n = 0; n < steps.size(); ++n) steps[n].step = n + 1;
  ValuePath history;
  std::function<void(NodeId)> rec = [&](NodeId id) {
    const Partition& part = base.node(id);
    steps[history.size()].sections.push_back(section_map(part, d, history));
    if (history.size() + 1 == base.depth()) return;
    for (std::size_t i = 0; i < part.size(); ++i) {
      history.push_back(part.values[i]);
      rec(part.children[i]);
      history.pop_back();
    }
  };
  rec(base.root());
  return steps;
}

std::vector<StepTransport> build_transport(const PairProcess& pq) {
  return build_transport(pq, canonical_representation(pq.process()));
}

Rational transport_via_inverse(const CellRepresentation& base, std::size_t component_dim, const ValuePath& history,
                               const Rational& x) {
  const Partition& part = base.node(base.node_at(history));
  const std::size_t d = component_dim;
  const std::size_t i = part.locate(x);
  const Value s = slice(part.values[i], d, d);
  Rational before = x - part.cuts[i];
  Rational total = 0;
  for (std::size_t j = 0; j < part.size(); ++j) {
    if (slice(part.values[j], d, d) != s) continue;
    total += part.interval(j).length();
    if (j < i) before += part.interval(j).length();
  }
  const Rational tie = before / total;

  Partition h_step;
  h_step.cuts.push_back(0);
  for (const auto& [f, cell] : f_cells(part, d)) {
    h_step.values.push_back(f);
    h_step.cuts.push_back(cell.hi);
    h_step.children.push_back(kLeaf);
  }
  const AugmentedRepresentation h(CellRepresentation(d, 1, {std::move(h_step)}));
  return generalized_inverse(h, {}, s, tie);
}

Rational preimage_measure(const TransportMap& t, const Interval& c) {
  Rational total = 0;
  for (const TransportPiece& p : t.pieces) {
    const Rational lo = std::max(p.target.lo, c.lo);
    const Rational hi = std::min(p.target.hi, c.hi);
    if (lo < hi) total += (hi - lo) * p.source.length() / p.target.length();
  }
  return total;
}

namespace {

std::string tiling_gap(std::vector<Interval> cells, const char* what) {
  std::sort(cells.begin(), cells.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  Rational at = 0;
  for (const Interval& c : cells) {
    if (c.lo != at) return std::string(what) + " cells leave a gap or overlap at " + to_string(at);
    at = c.hi;
  }
  if (at != 1) return std::string(what) + " cells end at " + to_string(at) + ", not 1";
  return {};
}

}  // namespace

MeasureCheck verify_measure_preserving(const TransportMap& t, unsigned grid_bits) {
  MeasureCheck out;
  auto fail = [&](std::string why) {
    out.ok = false;
    out.reason = std::move(why);
    return out;
  };
  if (t.pieces.empty()) return fail("no pieces");
  std::vector<Interval> sources, targets;
  for (const TransportPiece& p : t.pieces) {
    if (!(p.source.lo < p.source.hi) || !(p.target.lo < p.target.hi)) return fail("empty or reversed interval");
    if (p.source.length() != p.target.length()) {
      return fail("paired lengths " + to_string(p.source.length()) + " != " + to_string(p.target.length()));
    }
    sources.push_back(p.source);
    targets.push_back(p.target);
  }
  if (auto why = tiling_gap(sources, "source"); !why.empty()) return fail(why);
  if (auto why = tiling_gap(targets, "target"); !why.empty()) return fail(why);
  mpz_class cells;
  mpz_ui_pow_ui(cells.get_mpz_t(), 2, grid_bits);
  const Rational width(mpz_class(1), cells);
  for (mpz_class j = 0; j < cells; ++j) {
    const Interval c{Rational(j) * width, Rational(j + 1) * width};
    if (Rational m = preimage_measure(t, c); m != width) {
      return fail("preimage of [" + to_string(c.lo) + "," + to_string(c.hi) + ") has measure " + to_string(m));
    }
  }
  return out;
}

Interleaved interleave(const Rational& x, unsigned bits) {
  if (!(x >= 0 && x < 1)) throw Error(ErrorKind::XOutOfRange, "interleave input must lie in [0,1)", to_string(x));
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 2, 2 * bits);
  const Rational scaled = x * Rational(scale);
  mpz_class digits;
  mpz_fdiv_q(digits.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  mpz_class a = 0, b = 0;
  // Digit at position p (1-based, most significant first) is bit 2*bits - p.
  for (unsigned p = 1; p <= 2 * bits; ++p) {
    const int bit = mpz_tstbit(digits.get_mpz_t(), 2 * bits - p);
    mpz_class& target = (p % 2 == 1) ? a : b;
    target = target * 2 + bit;
  }
  mpz_class half;
  mpz_ui_pow_ui(half.get_mpz_t(), 2, bits);
  Interleaved out{Rational(a, half), Rational(b, half), Rational(digits) != scaled};
  out.first.canonicalize();
  out.second.canonicalize();
  return out;
}

Rational deinterleave(const Rational& first, const Rational& second, unsigned bits) {
  mpz_class half;
  mpz_ui_pow_ui(half.get_mpz_t(), 2, bits);
  const Rational sa = first * Rational(half), sb = second * Rational(half);
  if (sa.get_den() != 1 || sb.get_den() != 1 || first < 0 || second < 0 || first >= 1 || second >= 1) {
    throw Error(ErrorKind::InvalidArgument, "deinterleave inputs must be " + std::to_string(bits) + "-bit dyadics in [0,1)");
  }
  const mpz_class a = sa.get_num(), b = sb.get_num();
  mpz_class digits = 0;
  for (unsigned i = 1; i <= bits; ++i) {
    digits = digits * 2 + mpz_tstbit(a.get_mpz_t(), bits - i);
    digits = digits * 2 + mpz_tstbit(b.get_mpz_t(), bits - i);
  }
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 2, 2 * bits);
  Rational out(digits, scale);
  out.canonicalize();
  return out;
}

PairProcess overlay(const CellRepresentation& h, const CellRepresentation& k) {
  if (h.depth() != k.depth() || h.dimension() != k.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "representations differ in depth or dimension");
  }
  ProcessBuilder builder(2 * h.dimension());
  std::map<std::pair<NodeId, NodeId>, NodeId> built;
  std::function<NodeId(NodeId, NodeId, std::size_t)> rec = [&](NodeId hn, NodeId kn, std::size_t depth) -> NodeId {
    if (auto it = built.find({hn, kn}); it != built.end()) return it->second;
    const Partition& hp = h.node(hn);
    const Partition& kp = k.node(kn);
    std::vector<Rational> cuts(hp.cuts);
    cuts.insert(cuts.end(), kp.cuts.begin(), kp.cuts.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Branch> branches;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const std::size_t hi = hp.locate(cuts[c]), ki = kp.locate(cuts[c]);
      NodeId child = depth + 1 == h.depth() ? kLeaf : rec(hp.children[hi], kp.children[ki], depth + 1);
      branches.push_back(Branch{concat(hp.values[hi], kp.values[ki]), cuts[c + 1] - cuts[c], child});
    }
    std::sort(branches.begin(), branches.end(), [](const Branch& a, const Branch& b) { return a.value < b.value; });
    return built[{hn, kn}] = builder.add(std::move(branches));
  };
  NodeId root = rec(h.root(), k.root(), 0);
  return PairProcess(std::move(builder).build(root, h.depth()));
}

}  // namespace canonrep
