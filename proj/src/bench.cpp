#include "canonrep/bench.hpp"

#include <cmath>
#include <functional>

#include "canonrep/error.hpp"
#include "canonrep/random.hpp"

namespace canonrep {

ValuePath sample_path(const CellRepresentation& r, std::uint64_t seed, std::uint64_t m) {
  PhiloxStream rng(seed, m);
  ValuePath path;
  path.reserve(r.depth());
  NodeId id = r.root();
  for (std::size_t k = 0; k < r.depth(); ++k) {
    const Partition& part = r.node(id);
    const std::size_t i = part.locate(Rational(rng.uniform_open01()));
    path.push_back(part.values[i]);
    id = part.children[i];
  }
  return path;
}

std::pair<ValuePath, ValuePath> sample_pair(const DecoupledRepresentation& dr, std::uint64_t seed, std::uint64_t m) {
  const CellRepresentation& r = dr.base();
  PhiloxStream rng(seed, m);
  ValuePath d, e;
  d.reserve(r.depth());
  e.reserve(r.depth());
  NodeId id = r.root();
  for (std::size_t k = 0; k < r.depth(); ++k) {
    const Partition& part = r.node(id);
    const std::size_t i = part.locate(Rational(rng.uniform_open01()));
    const std::size_t j = part.locate(Rational(rng.uniform_open01()));
    d.push_back(part.values[i]);
    e.push_back(part.values[j]);
    id = part.children[i];
  }
  return {std::move(d), std::move(e)};
}

SampleBatch sample_paths(const CellRepresentation& r, std::size_t count, std::uint64_t seed, std::string source) {
  if (count == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be at least 1");
  SampleBatch batch;
  batch.seed = seed;
  batch.source = std::move(source);
  batch.generator = std::string(kGeneratorName);
  batch.d.reserve(count);
  for (std::size_t m = 0; m < count; ++m) batch.d.push_back(sample_path(r, seed, m));
  return batch;
}

SampleBatch sample_paths(const DecoupledRepresentation& dr, std::size_t count, std::uint64_t seed,
                         std::string source) {
  if (count == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be at least 1");
  SampleBatch batch;
  batch.seed = seed;
  batch.source = std::move(source);
  batch.generator = std::string(kGeneratorName);
  batch.d.reserve(count);
  batch.e.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    auto [d, e] = sample_pair(dr, seed, m);
    batch.d.push_back(std::move(d));
    batch.e.push_back(std::move(e));
  }
  return batch;
}

InterleavedPath interleave_path(const ValuePath& d, const ValuePath& e) {
  if (d.size() != e.size()) throw Error(ErrorKind::InvalidArgument, "paired paths differ in length");
  InterleavedPath out;
  out.r.reserve(2 * d.size());
  for (std::size_t n = 0; n < d.size(); ++n) {
    out.r.push_back(d[n] + e[n]);
    out.r.push_back(d[n] - e[n]);
  }
  return out;
}

std::vector<InterleavedPath> interleave_paths(const SampleBatch& batch) {
  if (!batch.is_pair()) throw Error(ErrorKind::InvalidArgument, "interleaving needs a pair batch");
  std::vector<InterleavedPath> out;
  out.reserve(batch.size());
  for (std::size_t m = 0; m < batch.size(); ++m) out.push_back(interleave_path(batch.d[m], batch.e[m]));
  return out;
}

std::pair<Value, Value> recover_sums(const InterleavedPath& path) {
  if (path.r.empty()) return {Value{}, Value{}};
  const std::size_t dim = path.r.front().dim();
  Value sum_d = zero_value(dim), sum_e = zero_value(dim);
  for (std::size_t n = 0; n < path.r.size(); ++n) {
    sum_d = sum_d + path.r[n];
    // n is 0-based, so (-1)^{n+1} in 1-based indexing is + on even n.
    sum_e = n % 2 == 0 ? sum_e + path.r[n] : sum_e - path.r[n];
  }
  const Rational half(1, 2);
  return {half * sum_d, half * sum_e};
}

namespace {

Vec sum_as_doubles(const ValuePath& path, std::span<const int> signs) {
  Value total = zero_value(path.front().dim());
  for (std::size_t n = 0; n < path.size(); ++n) {
    total = signs.empty() || signs[n] > 0 ? total + path[n] : total - path[n];
  }
  return to_doubles(total);
}

double euclidean(const Vec& v) {
  double s = 0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

}  // namespace

std::vector<Vec> path_sums(const SampleBatch& batch, int component) {
  const auto& paths = component == 0 ? batch.d : batch.e;
  std::vector<Vec> out;
  out.reserve(paths.size());
  for (const ValuePath& p : paths) out.push_back(sum_as_doubles(p, {}));
  return out;
}

std::vector<Vec> sign_transform(const SampleBatch& batch, std::span<const int> signs) {
  for (int s : signs) {
    if (s != 1 && s != -1) throw Error(ErrorKind::InvalidArgument, "signs must be +1 or -1");
  }
  std::vector<Vec> out;
  out.reserve(batch.size());
  for (const ValuePath& p : batch.d) {
    if (signs.size() != p.size()) throw Error(ErrorKind::InvalidArgument, "need one sign per step");
    out.push_back(sum_as_doubles(p, signs));
  }
  return out;
}

LpEstimate lp_norm(std::span<const Vec> sums, double p) {
  if (!(p > 1)) throw Error(ErrorKind::InvalidArgument, "p must exceed 1");
  if (sums.empty()) throw Error(ErrorKind::InvalidArgument, "empty batch");
  const double n = static_cast<double>(sums.size());
  double mean = 0;
  std::vector<double> y;
  y.reserve(sums.size());
  for (const Vec& s : sums) {
    y.push_back(std::pow(euclidean(s), p));
    mean += y.back();
  }
  mean /= n;
  LpEstimate out;
  if (mean == 0) {
    out.degenerate = true;
    return out;
  }
  double var = 0;
  for (double v : y) var += (v - mean) * (v - mean);
  var = sums.size() > 1 ? var / (n - 1) : 0.0;
  out.estimate = std::pow(mean, 1.0 / p);
  out.standard_error = out.estimate / (p * mean) * std::sqrt(var / n);
  return out;
}

RatioEstimate ratio_from_batch(const SampleBatch& batch, double p) {
  if (!batch.is_pair()) throw Error(ErrorKind::InvalidArgument, "ratio needs a pair batch");
  const std::vector<Vec> sd = path_sums(batch, 0);
  const std::vector<Vec> se = path_sums(batch, 1);
  RatioEstimate out;
  out.denominator = lp_norm(sd, p);
  out.numerator = lp_norm(se, p);
  if (out.denominator.degenerate) throw Error(ErrorKind::DegenerateBatch, "every sampled sum is zero");

  const double n = static_cast<double>(batch.size());
  double mean_d = 0, mean_e = 0;
  std::vector<double> yd, ye;
  for (std::size_t m = 0; m < batch.size(); ++m) {
    yd.push_back(std::pow(euclidean(sd[m]), p));
    ye.push_back(std::pow(euclidean(se[m]), p));
    mean_d += yd.back();
    mean_e += ye.back();
  }
  mean_d /= n;
  mean_e /= n;
  out.ratio = std::pow(mean_e / mean_d, 1.0 / p);
  if (batch.size() > 1 && mean_e > 0) {
    double var_d = 0, var_e = 0, cov = 0;
    for (std::size_t m = 0; m < batch.size(); ++m) {
      var_d += (yd[m] - mean_d) * (yd[m] - mean_d);
      var_e += (ye[m] - mean_e) * (ye[m] - mean_e);
      cov += (yd[m] - mean_d) * (ye[m] - mean_e);
    }
    var_d /= n - 1;
    var_e /= n - 1;
    cov /= n - 1;
    const double var_log =
        (var_e / (mean_e * mean_e) + var_d / (mean_d * mean_d) - 2 * cov / (mean_d * mean_e)) / n;
    out.standard_error = out.ratio / p * std::sqrt(std::max(var_log, 0.0));
  }
  out.ci_low = out.ratio - kCiSigmas * out.standard_error;
  out.ci_high = out.ratio + kCiSigmas * out.standard_error;
  return out;
}

RatioEstimate decoupling_ratio(const CellRepresentation& r, double p, std::size_t samples, std::uint64_t seed) {
  if (!(p > 1)) throw Error(ErrorKind::InvalidArgument, "p must exceed 1");
  if (SectionReport report = verify_zero_sections(r); sgn(report.max_abs_deviation) != 0) {
    throw Error(ErrorKind::NotMartingaleDifference,
                "section integrals deviate from zero by " + to_string(report.max_abs_deviation));
  }
  const DecoupledRepresentation dr = construct_ci_copy(r);
  return ratio_from_batch(sample_paths(dr, samples, seed), p);
}

ExactRatio exact_decoupling_ratio(const CellRepresentation& r, double p) {
  if (!(p > 1)) throw Error(ErrorKind::InvalidArgument, "p must exceed 1");
  const bool even = std::floor(p) == p && static_cast<long>(p) % 2 == 0;
  const auto half_power = static_cast<unsigned long>(p / 2);
  Rational exact_d = 0, exact_e = 0;
  double float_d = 0, float_e = 0;
  auto moment = [&](const Value& s, const Rational& w, Rational& exact, double& approx) {
    const Rational sq = squared_norm(s);
    if (even) {
      Rational pw = 1;
      for (unsigned long i = 0; i < half_power; ++i) pw *= sq;
      exact += w * pw;
    } else {
      approx += w.get_d() * std::pow(std::sqrt(sq.get_d()), p);
    }
  };
  std::function<void(NodeId, std::size_t, const Rational&, const Value&, const Value&)> rec =
      [&](NodeId id, std::size_t depth, const Rational& w, const Value& sd, const Value& se) {
        const Partition& part = r.node(id);
        for (std::size_t i = 0; i < part.size(); ++i) {
          const Value next_d = sd + part.values[i];
          for (std::size_t j = 0; j < part.size(); ++j) {
            const Rational wij = w * part.interval(i).length() * part.interval(j).length();
            const Value next_e = se + part.values[j];
            if (depth + 1 == r.depth()) {
              moment(next_d, wij, exact_d, float_d);
              moment(next_e, wij, exact_e, float_e);
            } else {
              rec(part.children[i], depth + 1, wij, next_d, next_e);
            }
          }
        }
      };
  const Value zero = zero_value(r.dimension());
  rec(r.root(), 0, Rational(1), zero, zero);
  ExactRatio out;
  if (even) {
    out.moment_d = exact_d;
    out.moment_e = exact_e;
    if (sgn(exact_d) == 0) throw Error(ErrorKind::DegenerateBatch, "sum of d is identically zero");
    out.ratio = std::pow(Rational(exact_e / exact_d).get_d(), 1.0 / p);
  } else {
    if (float_d == 0) throw Error(ErrorKind::DegenerateBatch, "sum of d is identically zero");
    out.ratio = std::pow(float_e / float_d, 1.0 / p);
  }
  return out;
}

}  // namespace canonrep
