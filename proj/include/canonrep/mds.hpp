#pragma once

#include <span>
#include <utility>
#include <vector>

#include "canonrep/canonical.hpp"

namespace canonrep {

/// Canonical representation of a martingale difference sequence; every node's
/// section integral (sum of length * value) is verified to be exactly zero.
CellRepresentation represent_mds(const FiniteProcess& p);

struct NodeDeviation {
  ValuePath prefix;
  Value section_integral;
};

struct SectionReport {
  Rational max_abs_deviation;
  std::vector<NodeDeviation> nodes;
};

SectionReport verify_zero_sections(const CellRepresentation& r);

/// The decoupled copy on [0,1]^N x [0,1]^N:
///   u_n((x),(y)) = h_n(x_1, ..., x_{n-1}, x_n)
///   v_n((x),(y)) = h_n(x_1, ..., x_{n-1}, y_n)
/// Both read the node reached by the x-history; only the last slot differs.
class DecoupledRepresentation {
 public:
  explicit DecoupledRepresentation(CellRepresentation base) : base_(std::move(base)) {}

  const CellRepresentation& base() const noexcept { return base_; }

  /// (u path, v path).
  std::pair<ValuePath, ValuePath> evaluate(std::span<const Rational> x, std::span<const Rational> y) const;

 private:
  CellRepresentation base_;
};

DecoupledRepresentation construct_ci_copy(CellRepresentation r);

/// Exact joint law of the pairs (u_n, v_n) under Lebesgue measure on the
/// product square, as a pair process (u first, v second).
PairProcess pair_law(const DecoupledRepresentation& d);

}  // namespace canonrep
