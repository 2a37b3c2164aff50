#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "canonrep/canonical.hpp"

namespace canonrep {

/// x in `source` goes affinely and increasingly onto `target`.
struct TransportPiece {
  Interval source;
  Interval target;

  Rational map(const Rational& x) const { return target.lo + (x - source.lo) * target.length() / source.length(); }
};

/// One section of phi_n: the self-map of [0,1) for a fixed pair history.
struct TransportMap {
  ValuePath history;
  std::vector<TransportPiece> pieces;

  /// phi(x) for x in [0, 1).
  Rational apply(const Rational& x) const;
};

struct StepTransport {
  std::size_t step = 1;
  std::vector<TransportMap> sections;
};

/// The x in the cell of atom s whose tie-break coordinate is `tie`.
Rational generalized_inverse(const AugmentedRepresentation& r, const ValuePath& prefix, const Value& s,
                             const Rational& tie);

/// Measure-preserving phi_n with k_n = h_n(x_1, ..., x_{n-1}, phi_n(x_1, ..., x_n)).
/// `base` is the canonical representation of the pair process; h reads the f
/// half of its values and k the g half. Within a section, the pair cells
/// carrying g-value s (taken left to right) are laid consecutively onto the
/// h-cell of value s.
std::vector<StepTransport> build_transport(const PairProcess& pq, const CellRepresentation& base);
std::vector<StepTransport> build_transport(const PairProcess& pq);

/// The same section map computed the long way: augmented k-evaluation (value
/// s plus the position of x among the cells carrying s) followed by the
/// generalized inverse of the augmented h-step.
Rational transport_via_inverse(const CellRepresentation& base, std::size_t component_dim, const ValuePath& history,
                               const Rational& x);

struct MeasureCheck {
  bool ok = true;
  std::string reason;
};

/// Source and target tile [0,1), paired lengths agree, and the preimage of
/// every cell of the 2^grid_bits dyadic grid has the cell's measure.
MeasureCheck verify_measure_preserving(const TransportMap& t, unsigned grid_bits = 10);

/// Lebesgue measure of {x : phi(x) in c}.
Rational preimage_measure(const TransportMap& t, const Interval& c);

struct Interleaved {
  Rational first;
  Rational second;
  bool truncated = false;
};

/// Odd binary digits of x go to the first output, even digits to the second,
/// keeping `bits` digits each. x is truncated to 2*bits digits (reported).
Interleaved interleave(const Rational& x, unsigned bits);
Rational deinterleave(const Rational& first, const Rational& second, unsigned bits);

/// Coupling of two representations on common coordinates: the pair process
/// of x -> (h(x), k(x)), obtained by intersecting node partitions.
PairProcess overlay(const CellRepresentation& h, const CellRepresentation& k);

}  // namespace canonrep
