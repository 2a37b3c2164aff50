#include "canonrep/skorohod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "canonrep/error.hpp"
#include "canonrep/random.hpp"

namespace canonrep {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double psi(std::complex<double> z, double theta) {
  const std::complex<double> w = 1.0 - z * std::polar(1.0, -theta);
  return theta + 2.0 * std::atan2(w.imag(), w.real());
}

void check_inside(std::complex<double> z, double boundary_eps) {
  if (!(std::abs(z) < 1.0 - boundary_eps)) {
    throw Error(ErrorKind::TooCloseToBoundary,
                "|z| = " + std::to_string(std::abs(z)) + " is not below 1 - " + std::to_string(boundary_eps));
  }
}

}  // namespace

std::size_t ArcFunction::locate(double theta) const {
  auto it = std::upper_bound(arcs.begin() + 1, arcs.end(), theta, [](double t, const Arc& a) { return t < a.lo; });
  return static_cast<std::size_t>(it - arcs.begin()) - 1;
}

ArcFunction arc_function(const Partition& part) {
  ArcFunction out;
  for (std::size_t i = 0; i < part.size(); ++i) {
    out.arcs.push_back(Arc{kTwoPi * part.cuts[i].get_d(), kTwoPi * part.cuts[i + 1].get_d(), to_doubles(part.values[i])});
  }
  return out;
}

ArcFunction arc_function(const CellRepresentation& r, const ValuePath& prefix) {
  return arc_function(r.node(r.node_at(prefix)));
}

double harmonic_measure(std::complex<double> z, double lo, double hi, double boundary_eps) {
  check_inside(z, boundary_eps);
  if (!(hi >= lo) || hi - lo > kTwoPi * (1 + 1e-15)) {
    throw Error(ErrorKind::InvalidArgument, "arc must satisfy lo <= hi <= lo + 2*pi");
  }
  if (z == 0.0) return (hi - lo) / kTwoPi;
  return (psi(z, hi) - psi(z, lo)) / kTwoPi;
}

Vec harmonic_extension(const ArcFunction& a, std::complex<double> z, double boundary_eps) {
  check_inside(z, boundary_eps);
  Vec out(a.dim(), 0.0);
  if (a.arcs.empty()) return out;
  double left = z == 0.0 ? a.arcs.front().lo : psi(z, a.arcs.front().lo);
  for (const Arc& arc : a.arcs) {
    const double right = z == 0.0 ? arc.hi : psi(z, arc.hi);
    const double omega = (right - left) / kTwoPi;
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += omega * arc.value[c];
    left = right;
  }
  return out;
}

double exit_angle(std::complex<double> z, double u) {
  const std::complex<double> w = std::polar(1.0, kTwoPi * u);
  const std::complex<double> exit = (w + z) / (1.0 + std::conj(z) * w);
  double theta = std::arg(exit);
  if (theta < 0) theta += kTwoPi;
  if (theta >= kTwoPi) theta = 0;
  return theta;
}

double sample_exit(std::complex<double> z, std::uint64_t seed, std::uint64_t index) {
  if (!(std::abs(z) < 1.0)) throw Error(ErrorKind::TooCloseToBoundary, "start point must lie inside the unit disk");
  PhiloxStream rng(seed, index, 0x65786974u);
  return exit_angle(z, rng.uniform_open01());
}

double time_change(double t) {
  if (!(t >= 0 && t < 1)) throw Error(ErrorKind::InvalidArgument, "time change is defined on [0,1)");
  return t / (1.0 - t);
}

Scheme parse_scheme(const std::string& name) {
  if (name == "euler") return Scheme::Euler;
  if (name == "exit_sample") return Scheme::ExitSample;
  throw Error(ErrorKind::InvalidArgument, "unknown scheme '" + name + "' (euler or exit_sample)");
}

std::string to_string(Scheme s) { return s == Scheme::Euler ? "euler" : "exit_sample"; }

void validate_config(const BrownianConfig& cfg) {
  if (!(cfg.dt_base > 0 && cfg.dt_base < 1)) throw Error(ErrorKind::InvalidArgument, "dt must lie in (0,1)");
  if (!(cfg.boundary_eps > 0 && cfg.boundary_eps < 0.1)) {
    throw Error(ErrorKind::InvalidArgument, "boundary_eps must lie in (0, 0.1)");
  }
  if (!(cfg.cap > 0)) throw Error(ErrorKind::InvalidArgument, "cap must be positive");
  if (cfg.grid_per_block == 0) throw Error(ErrorKind::InvalidArgument, "grid needs at least one point per block");
}

const Vec& EmbeddedPath::at_integer(std::size_t n) const {
  const std::size_t blocks = exit_angles.size();
  if (n > blocks) throw Error(ErrorKind::InvalidArgument, "time beyond the last block");
  return values.at(n * ((values.size() - 1) / blocks));
}

namespace {

struct BlockOutcome {
  std::size_t cell = 0;
  double angle = 0;
  double tau = std::numeric_limits<double>::quiet_NaN();
  std::size_t steps = 0;
  std::size_t restarts = 0;
  std::vector<std::complex<double>> grid_positions;  // b at grid points before the exit
};

// Brownian motion from 0 on the block-relative grid s_k = k/K, increments of
// variance phi(s_k) - phi(s_{k-1}) per coordinate, stopped on leaving the disk.
BlockOutcome run_euler_block(const ArcFunction& arcs, const BrownianConfig& cfg, std::uint64_t index,
                             std::size_t block, std::size_t steps_per_block) {
  const std::size_t stride = steps_per_block / cfg.grid_per_block;
  BlockOutcome out;
  for (std::uint32_t attempt = 0;; ++attempt) {
    PhiloxStream rng(cfg.seed, index, static_cast<std::uint32_t>(block << 16) | attempt);
    out.grid_positions.assign(1, 0.0);
    std::complex<double> b = 0.0;
    double t_prev = 0;
    bool exited = false;
    for (std::size_t k = 1; k < steps_per_block; ++k) {
      const double s = static_cast<double>(k) / static_cast<double>(steps_per_block);
      const double t = s / (1.0 - s);
      if (t > cfg.cap) break;
      const double sd = std::sqrt(t - t_prev);
      const auto [g1, g2] = rng.normal_pair();
      const std::complex<double> q = b + sd * std::complex<double>(g1, g2);
      if (std::norm(q) >= 1.0) {
        // Crossing point on the chord from b to q, projected to the circle.
        const std::complex<double> dq = q - b;
        const double a2 = std::norm(dq);
        const double b1 = (std::conj(b) * dq).real();
        const double c0 = std::norm(b) - 1.0;
        const double lambda = (-b1 + std::sqrt(b1 * b1 - a2 * c0)) / a2;
        const std::complex<double> hit = b + lambda * dq;
        double theta = std::arg(hit / std::abs(hit));
        if (theta < 0) theta += kTwoPi;
        if (theta >= kTwoPi) theta = 0;
        out.angle = theta;
        out.cell = arcs.locate(theta);
        out.tau = t_prev + lambda * (t - t_prev);
        out.steps = k;
        exited = true;
        break;
      }
      b = q;
      t_prev = t;
      if (k % stride == 0) out.grid_positions.push_back(b);
    }
    if (exited) return out;
    ++out.restarts;
  }
}

}  // namespace

EmbeddedPath simulate_path(const CellRepresentation& r, const BrownianConfig& cfg, std::uint64_t index) {
  validate_config(cfg);
  const std::size_t blocks = r.depth();
  EmbeddedPath path;
  Vec base(r.dimension(), 0.0);
  NodeId id = r.root();

  if (cfg.scheme == Scheme::ExitSample) {
    PhiloxStream rng(cfg.seed, index);
    path.times.push_back(0);
    path.values.push_back(base);
    for (std::size_t n = 0; n < blocks; ++n) {
      const Partition& part = r.node(id);
      const ArcFunction arcs = arc_function(part);
      const double theta = exit_angle(0.0, rng.uniform_open01());
      const std::size_t cell = arcs.locate(theta);
      for (std::size_t c = 0; c < base.size(); ++c) base[c] += arcs.arcs[cell].value[c];
      path.exit_angles.push_back(theta);
      path.exit_times.push_back(std::numeric_limits<double>::quiet_NaN());
      path.exit_steps.push_back(0);
      path.times.push_back(static_cast<double>(n + 1));
      path.values.push_back(base);
      id = part.children[cell];
    }
    return path;
  }

  const std::size_t grid = cfg.grid_per_block;
  const auto raw_steps = static_cast<std::size_t>(std::ceil(1.0 / cfg.dt_base));
  const std::size_t steps_per_block = ((raw_steps + grid - 1) / grid) * grid;
  const std::size_t stride = steps_per_block / grid;
  for (std::size_t n = 0; n < blocks; ++n) {
    const Partition& part = r.node(id);
    const ArcFunction arcs = arc_function(part);
    const BlockOutcome outcome = run_euler_block(arcs, cfg, index, n, steps_per_block);
    for (std::size_t j = 0; j < grid; ++j) {
      path.times.push_back(static_cast<double>(n) + static_cast<double>(j) / static_cast<double>(grid));
      Vec value = base;
      const Vec& add = j * stride < outcome.steps ? harmonic_extension(arcs, outcome.grid_positions.at(j))
                                                  : arcs.arcs[outcome.cell].value;
      for (std::size_t c = 0; c < value.size(); ++c) value[c] += add[c];
      path.values.push_back(std::move(value));
    }
    for (std::size_t c = 0; c < base.size(); ++c) base[c] += arcs.arcs[outcome.cell].value[c];
    path.exit_angles.push_back(outcome.angle);
    path.exit_times.push_back(outcome.tau);
    path.exit_steps.push_back(outcome.steps);
    path.restarts += outcome.restarts;
    id = part.children[outcome.cell];
  }
  path.times.push_back(static_cast<double>(blocks));
  path.values.push_back(base);
  return path;
}

SimulationBatch simulate_F(const CellRepresentation& r, const BrownianConfig& cfg, std::size_t count) {
  validate_config(cfg);
  if (SectionReport report = verify_zero_sections(r); sgn(report.max_abs_deviation) != 0) {
    throw Error(ErrorKind::NotMartingaleDifference,
                "section integrals deviate from zero by " + to_string(report.max_abs_deviation));
  }
  SimulationBatch batch;
  batch.paths.reserve(count);
  for (std::uint64_t m = 0; m < count; ++m) {
    EmbeddedPath p = simulate_path(r, cfg, m);
    batch.censored_restarts += p.restarts;
    batch.total_blocks += p.exit_steps.size();
    if (cfg.scheme == Scheme::Euler) {
      batch.coarse_blocks += static_cast<std::size_t>(
          std::count_if(p.exit_steps.begin(), p.exit_steps.end(), [](std::size_t s) { return s < kMinStepsBeforeExit; }));
    }
    batch.paths.push_back(std::move(p));
  }
  if (cfg.scheme == Scheme::Euler && batch.total_blocks > 0 &&
      static_cast<double>(batch.coarse_blocks) >= 0.01 * static_cast<double>(batch.total_blocks)) {
    throw Error(ErrorKind::StepTooCoarse, std::to_string(batch.coarse_blocks) + " of " +
                                              std::to_string(batch.total_blocks) + " blocks exited within " +
                                              std::to_string(kMinStepsBeforeExit) + " steps; reduce dt");
  }
  return batch;
}

ValuePath increment_path(const CellRepresentation& r, const EmbeddedPath& path, double tol) {
  ValuePath out;
  NodeId id = r.root();
  for (std::size_t n = 0; n < r.depth(); ++n) {
    const Vec& before = path.at_integer(n);
    const Vec& after = path.at_integer(n + 1);
    const Partition& part = r.node(id);
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < part.size(); ++i) {
      const Vec atom = to_doubles(part.values[i]);
      double dist = 0;
      for (std::size_t c = 0; c < atom.size(); ++c) dist = std::max(dist, std::abs(after[c] - before[c] - atom[c]));
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    if (best_dist > tol) throw Error(ErrorKind::UnreachablePath, "increment is not an atom of its node");
    out.push_back(part.values[best]);
    id = part.children[best];
  }
  return out;
}

IncrementLawTest increment_law_test(const CellRepresentation& r, const std::vector<EmbeddedPath>& paths) {
  const PathLaw law = law_of_representation(r);
  std::map<ValuePath, std::size_t> index;
  std::vector<double> probs;
  for (const auto& [path, prob] : law) {
    index.emplace(path, probs.size());
    probs.push_back(prob.get_d());
  }
  std::vector<std::uint64_t> counts(probs.size(), 0);
  for (const EmbeddedPath& p : paths) ++counts.at(index.at(increment_path(r, p)));
  return IncrementLawTest{chi_square(counts, probs), paths.size()};
}

namespace {

std::size_t grid_index(const EmbeddedPath& p, double t) {
  auto it = std::lower_bound(p.times.begin(), p.times.end(), t - 1e-12);
  if (it == p.times.end() || std::abs(*it - t) > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "checkpoint " + std::to_string(t) + " is not a grid time");
  }
  return static_cast<std::size_t>(it - p.times.begin());
}

}  // namespace

std::vector<double> default_checkpoints(std::size_t depth, std::size_t grid_per_block, std::size_t count) {
  std::vector<double> out;
  const double total = static_cast<double>(depth * grid_per_block);
  for (std::size_t k = 1; k <= count; ++k) {
    const double j = std::max(1.0, std::round(total * static_cast<double>(k) / static_cast<double>(count)));
    const double t = j / static_cast<double>(grid_per_block);
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

MartingaleReport martingale_check(const std::vector<EmbeddedPath>& paths, const std::vector<double>& checkpoints) {
  if (paths.size() < kMinMartingalePaths) {
    throw Error(ErrorKind::InvalidArgument, "martingale check needs at least " + std::to_string(kMinMartingalePaths) + " paths");
  }
  const double n = static_cast<double>(paths.size());
  std::vector<std::vector<double>> samples;
  MartingaleReport report;
  for (double t : checkpoints) {
    const std::size_t idx = grid_index(paths.front(), t);
    std::vector<double> xs;
    xs.reserve(paths.size());
    double mean = 0;
    for (const EmbeddedPath& p : paths) {
      xs.push_back(p.values.at(idx).front());
      mean += xs.back();
    }
    mean /= n;
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= n - 1;
    CheckpointMean cm{t, mean, std::sqrt(var / n)};
    if (std::abs(mean) >= report.max_abs_mean) {
      report.max_abs_mean = std::abs(mean);
      report.max_abs_mean_se = cm.standard_error;
    }
    report.means.push_back(cm);
    samples.push_back(std::move(xs));
  }
  for (std::size_t c = 0; c + 1 < checkpoints.size(); ++c) {
    const std::vector<double>& x = samples[c];
    const std::vector<double>& y = samples[c + 1];
    SlopeCheck sc;
    sc.s = checkpoints[c];
    sc.t = checkpoints[c + 1];
    const double mx = report.means[c].mean, my = report.means[c + 1].mean;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 1e-300) {
      sc.defined = false;
      report.slopes.push_back(std::move(sc));
      continue;
    }
    sc.slope = sxy / sxx;
    const double intercept = my - sc.slope * mx;
    double meat = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double resid = y[i] - intercept - sc.slope * x[i];
      meat += (x[i] - mx) * (x[i] - mx) * resid * resid;
    }
    sc.standard_error = std::sqrt(meat) / sxx;

    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    constexpr std::size_t kBins = 10;
    for (std::size_t b = 0; b < kBins; ++b) {
      const std::size_t lo = b * order.size() / kBins, hi = (b + 1) * order.size() / kBins;
      if (lo == hi) continue;
      ConditionalBin bin;
      for (std::size_t i = lo; i < hi; ++i) {
        bin.center += x[order[i]];
        bin.mean_later += y[order[i]];
      }
      bin.count = hi - lo;
      bin.center /= static_cast<double>(bin.count);
      bin.mean_later /= static_cast<double>(bin.count);
      sc.bins.push_back(bin);
    }
    report.slopes.push_back(std::move(sc));
  }
  return report;
}

bool martingale_passes(const MartingaleReport& report, double sigmas) {
  for (const CheckpointMean& m : report.means) {
    if (std::abs(m.mean) > sigmas * m.standard_error) return false;
  }
  for (const SlopeCheck& s : report.slopes) {
    if (s.defined && std::abs(s.slope - 1.0) > sigmas * s.standard_error) return false;
  }
  return true;
}

}  // namespace canonrep
