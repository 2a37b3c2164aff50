#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "canonrep/mds.hpp"

namespace canonrep {

using Vec = std::vector<double>;

/// Sampled value paths. `e` is empty for a single representation and holds
/// the decoupled copy for a pair batch. Values stay exact; estimators read
/// them as doubles.
struct SampleBatch {
  std::vector<ValuePath> d;
  std::vector<ValuePath> e;
  std::uint64_t seed = 0;
  std::string source;
  std::string generator;

  std::size_t size() const noexcept { return d.size(); }
  bool is_pair() const noexcept { return !e.empty(); }
};

/// Path m draws its coordinates from the Philox stream (seed, m) alone.
ValuePath sample_path(const CellRepresentation& r, std::uint64_t seed, std::uint64_t m);
std::pair<ValuePath, ValuePath> sample_pair(const DecoupledRepresentation& dr, std::uint64_t seed, std::uint64_t m);

SampleBatch sample_paths(const CellRepresentation& r, std::size_t count, std::uint64_t seed, std::string source = {});
SampleBatch sample_paths(const DecoupledRepresentation& dr, std::size_t count, std::uint64_t seed,
                         std::string source = {});

struct InterleavedPath {
  std::vector<Value> r;
};

/// r_{2n-1} = d_n + e_n, r_{2n} = d_n - e_n.
InterleavedPath interleave_path(const ValuePath& d, const ValuePath& e);
std::vector<InterleavedPath> interleave_paths(const SampleBatch& batch);

/// (sum_d, sum_e) = (1/2 sum r_n, 1/2 sum (-1)^{n+1} r_n).
std::pair<Value, Value> recover_sums(const InterleavedPath& path);

/// Per-path partial sums at the last step, component 0 = d, 1 = e.
std::vector<Vec> path_sums(const SampleBatch& batch, int component = 0);

/// Per path, sum of signs[n] * d_n.
std::vector<Vec> sign_transform(const SampleBatch& batch, std::span<const int> signs);

struct LpEstimate {
  double estimate = 0;
  double standard_error = 0;
  bool degenerate = false;  // every sum is zero
};

/// (mean |S|^p)^(1/p) with a delta-method standard error.
LpEstimate lp_norm(std::span<const Vec> sums, double p);

struct RatioEstimate {
  double ratio = 0;
  double standard_error = 0;
  double ci_low = 0;
  double ci_high = 0;
  LpEstimate numerator;    // ||sum e||_p
  LpEstimate denominator;  // ||sum d||_p
};

inline constexpr double kCiSigmas = 5.0;

/// ||sum e||_p / ||sum d||_p for the decoupled copy of an MDS
/// representation. The interval is ratio +/- kCiSigmas standard errors, with
/// the error propagated through the correlation of the two norms.
RatioEstimate decoupling_ratio(const CellRepresentation& r, double p, std::size_t samples, std::uint64_t seed);
RatioEstimate ratio_from_batch(const SampleBatch& batch, double p);

struct ExactRatio {
  /// E|sum d|^p and E|sum e|^p, exact when p is an even integer.
  std::optional<Rational> moment_d;
  std::optional<Rational> moment_e;
  double ratio = 0;
};

/// Enumerates the finite pair law of the decoupled copy (no sampling).
ExactRatio exact_decoupling_ratio(const CellRepresentation& r, double p);

}  // namespace canonrep
