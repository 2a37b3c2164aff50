#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace canonrep {

struct ChiSquare {
  double statistic = 0;
  std::size_t dof = 0;
  double p_value = 1;
  std::size_t categories = 0;  // after pooling
};

/// Pearson goodness of fit of `observed` counts against category probabilities.
/// Categories with expected count below `min_expected` are pooled into one
/// (and that pool merged into the smallest remaining category if it is itself
/// too small).
ChiSquare chi_square(std::span<const std::uint64_t> observed, std::span<const double> probs,
                     double min_expected = 5.0);

}  // namespace canonrep
