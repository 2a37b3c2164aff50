#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "canonrep/bench.hpp"
#include "canonrep/stats.hpp"

namespace canonrep {

/// Boundary data on the unit circle: arc i covers angles [lo, hi).
struct Arc {
  double lo = 0;
  double hi = 0;
  Vec value;
};

struct ArcFunction {
  std::vector<Arc> arcs;

  std::size_t dim() const { return arcs.empty() ? 0 : arcs.front().value.size(); }
  /// Arc containing angle theta in [0, 2*pi).
  std::size_t locate(double theta) const;
};

/// The node partition at `prefix` wrapped onto the circle by theta = 2*pi*x.
ArcFunction arc_function(const CellRepresentation& r, const ValuePath& prefix);
ArcFunction arc_function(const Partition& part);

/// Harmonic measure of the arc [lo, hi] seen from z (the exit law of planar
/// Brownian motion started at z). Closed form via the disk automorphism
/// sending z to 0: the boundary angle theta maps to
///   psi(theta) = theta + 2 arg(1 - z e^{-i theta}),
/// and omega = (psi(hi) - psi(lo)) / (2 pi).
double harmonic_measure(std::complex<double> z, double lo, double hi, double boundary_eps = 0.0);

/// Poisson extension of the arc data evaluated at z.
Vec harmonic_extension(const ArcFunction& a, std::complex<double> z, double boundary_eps = 0.0);

/// Exit angle in [0, 2*pi) from z given a uniform u in (0,1): the preimage of
/// the uniform angle 2*pi*u under the automorphism sending z to 0.
double exit_angle(std::complex<double> z, double u);
double sample_exit(std::complex<double> z, std::uint64_t seed, std::uint64_t index = 0);

/// t / (1 - t) on [0, 1).
double time_change(double t);

enum class Scheme { Euler, ExitSample };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme s);

struct BrownianConfig {
  double dt_base = 5e-5;  // block-relative time step
  double boundary_eps = 1e-3;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::ExitSample;
  double cap = 1e4;                 // censoring horizon in Brownian time
  std::size_t grid_per_block = 10;  // output points per unit block
};

void validate_config(const BrownianConfig& cfg);

/// Minimum simulated steps before an exit for a block to count as resolved.
inline constexpr std::size_t kMinStepsBeforeExit = 1000;

struct EmbeddedPath {
  std::vector<double> times;
  std::vector<Vec> values;
  std::vector<double> exit_angles;
  std::vector<double> exit_times;  // Brownian time tau_n; NaN for exit_sample
  std::vector<std::size_t> exit_steps;
  std::size_t restarts = 0;

  /// F at integer time n (0 <= n <= number of blocks).
  const Vec& at_integer(std::size_t n) const;
};

EmbeddedPath simulate_path(const CellRepresentation& r, const BrownianConfig& cfg, std::uint64_t index);

struct SimulationBatch {
  std::vector<EmbeddedPath> paths;
  std::size_t censored_restarts = 0;
  std::size_t coarse_blocks = 0;
  std::size_t total_blocks = 0;
};

/// Simulates `count` independent embedded paths of an MDS representation.
/// Throws StepTooCoarse when, in the euler scheme, at least 1% of blocks exit
/// within fewer than kMinStepsBeforeExit steps.
SimulationBatch simulate_F(const CellRepresentation& r, const BrownianConfig& cfg, std::size_t count);

/// Value path read back from F: increment n is matched to the nearest atom of
/// the node reached so far (must agree to within `tol`).
ValuePath increment_path(const CellRepresentation& r, const EmbeddedPath& path, double tol = 1e-9);

struct IncrementLawTest {
  ChiSquare test;
  std::size_t paths = 0;
};

/// Pearson test of the increment paths of F against the exact path law.
IncrementLawTest increment_law_test(const CellRepresentation& r, const std::vector<EmbeddedPath>& paths);

struct CheckpointMean {
  double t = 0;
  double mean = 0;
  double standard_error = 0;
};

struct ConditionalBin {
  double center = 0;
  double mean_later = 0;
  std::size_t count = 0;
};

struct SlopeCheck {
  double s = 0;
  double t = 0;
  double slope = 0;
  double standard_error = 0;
  bool defined = true;  // false when F_s is constant
  std::vector<ConditionalBin> bins;
};

struct MartingaleReport {
  std::vector<CheckpointMean> means;
  double max_abs_mean = 0;
  double max_abs_mean_se = 0;
  std::vector<SlopeCheck> slopes;
};

inline constexpr std::size_t kMinMartingalePaths = 10000;

/// `count` grid times spread evenly over (0, depth]: the grid point nearest to
/// depth * k / count for k = 1..count (duplicates dropped).
std::vector<double> default_checkpoints(std::size_t depth, std::size_t grid_per_block, std::size_t count = 10);

/// Mean of the first coordinate of F_t at each checkpoint, and for each pair
/// of consecutive checkpoints s < t the least-squares slope of F_t on F_s
/// (heteroscedasticity-robust standard error) with decile-binned conditional
/// means.
MartingaleReport martingale_check(const std::vector<EmbeddedPath>& paths, const std::vector<double>& checkpoints);

/// Every |mean| is within `sigmas` standard errors of 0 and every defined
/// slope within `sigmas` standard errors of 1.
bool martingale_passes(const MartingaleReport& report, double sigmas = 5.0);

}  // namespace canonrep
