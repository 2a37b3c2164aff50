#pragma once

#include <cstddef>
#include <cstdint>

#include "canonrep/process.hpp"

namespace canonrep {

struct GeneratorSpec {
  std::size_t depth = 2;
  std::size_t branching = 2;  // each node draws 1..branching branches
  std::size_t dimension = 1;
  bool mds = false;
  std::uint64_t seed = 0;
  int value_range = 4;
};

inline constexpr std::size_t kMaxGeneratedDepth = 8;
inline constexpr std::size_t kMaxGeneratedBranching = 8;

/// Deterministic random process with rational probabilities and values.
/// With `mds`, the last atom of every node is solved so the node mean is zero.
/// Distinct branches may carry equal values.
FiniteProcess random_process(const GeneratorSpec& spec);

/// Random tangent pair: at each node f has a random law and g = f read through
/// a random rotation of the node's unit-interval partition, so both have the
/// same conditional law while being genuinely coupled.
PairProcess random_tangent_pair(const GeneratorSpec& spec);

}  // namespace canonrep
