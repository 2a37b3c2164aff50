// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "canonrep/bench.hpp"
#include "canonrep/error.hpp"
#include "canonrep/generate.hpp"
#include "canonrep/io.hpp"
#include "canonrep/mds.hpp"
#include "canonrep/random.hpp"
#include "canonrep/skorohod.hpp"
#include "canonrep/transport.hpp"
#include "fixtures.hpp"

using namespace canonrep;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;  // indented lines printed after the verdict
};

std::string count_of(std::size_t good, std::size_t total) { return std::to_string(good) + "/" + std::to_string(total); }

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

GeneratorSpec spec(std::uint64_t seed, std::size_t depth, std::size_t branching, std::size_t dim, bool mds) {
  GeneratorSpec s;
  s.seed = seed;
  s.depth = depth;
  s.branching = branching;
  s.dimension = dim;
  s.mds = mds;
  return s;
}

Outcome law_preservation() {
  std::size_t good = 0, paths = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const FiniteProcess p = random_process(spec(10000 + i, 1 + i % 5, 2 + (i / 5) % 5, 1 + i % 3, false));
    const PathLaw law = joint_law(p);
    paths += law.size();
    if (law_of_representation(canonical_representation(p)) == law) ++good;
  }
  return {good == 200, count_of(good, 200) + " processes (depth <= 5, branching <= 6, d <= 3, " +
                           std::to_string(paths) + " paths) reproduce their law exactly"};
}

Outcome zero_sections() {
  std::size_t good = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const CellRepresentation r = represent_mds(random_process(spec(20000 + i, 1 + i % 5, 2 + (i / 5) % 5, 1 + i % 3, true)));
    if (sgn(verify_zero_sections(r).max_abs_deviation) == 0) ++good;
  }
  return {good == 200, count_of(good, 200) + " MDS fixtures have zero section integrals"};
}

Outcome decoupled_copy() {
  std::size_t tangent = 0, ci = 0, u_law = 0, v_law = 0, v_steps = 0;
  const std::size_t total = 100;
  for (std::uint64_t i = 0; i < total; ++i) {
    const CellRepresentation r =
        canonical_representation(random_process(spec(30000 + i, 1 + i % 3, 2 + (i / 3) % 3, 1 + i % 2, i % 2 == 0)));
    const PairProcess pq = pair_law(construct_ci_copy(r));
    const PathLaw joint = joint_law(pq.process());
    const PathLaw source = law_of_representation(r);
    const PathLaw v = component_law(joint, r.dimension(), r.dimension());
    tangent += are_tangent(pq).ok;
    ci += satisfies_ci(pq, 1).ok;
    u_law += component_law(joint, 0, r.dimension()) == source;
    v_law += v == source;
    bool steps = true;
    for (std::size_t k = 0; k < r.depth(); ++k) steps = steps && step_marginal(v, k) == step_marginal(source, k);
    v_steps += steps;
  }
  Outcome out;
  out.pass = tangent == total && ci == total && u_law == total && v_law == total;
  out.detail = "tangent " + count_of(tangent, total) + ", C.I. " + count_of(ci, total) + ", u path law = source " +
               count_of(u_law, total) + ", v path law = source " + count_of(v_law, total);
  out.notes.push_back("v one-step marginals = source one-step marginals: " + count_of(v_steps, total));
  out.notes.push_back("v path law differs from the source whenever step laws depend on the history");
  return out;
}

Outcome transport() {
  std::size_t good = 0, sections = 0, points = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const PairProcess pq = random_tangent_pair(spec(40000 + i, 1 + i % 3, 2 + (i / 3) % 3, 1 + i % 2, false));
    const CellRepresentation base = canonical_representation(pq.process());
    const std::size_t d = pq.component_dim();
    PhiloxStream rng(40000 + i, 1);
    bool ok = true;
    for (const StepTransport& st : build_transport(pq, base)) {
      for (const TransportMap& t : st.sections) {
        ++sections;
        ok = ok && verify_measure_preserving(t).ok;
        const Partition& part = base.node(base.node_at(t.history));
        for (int k = 0; k < 1000 && ok; ++k) {
          const Rational x(rng.uniform_open01());
          ok = slice(part.values[part.locate(x)], d, d) == slice(part.values[part.locate(t.apply(x))], 0, d);
          ++points;
        }
      }
    }
    good += ok;
  }
  return {good == 100, count_of(good, 100) + " tangent pairs: measure preserving and k = h(phi) on " +
                           std::to_string(sections) + " sections, " + std::to_string(points) + " points"};
}

Outcome interleaved_identities() {
  const CellRepresentation r = represent_mds(random_process(spec(50000, 3, 4, 2, true)));
  const std::size_t m = 100000;
  const SampleBatch batch = sample_paths(construct_ci_copy(r), m, 50000);
  const std::vector<InterleavedPath> rs = interleave_paths(batch);
  std::size_t good = 0;
  for (std::size_t i = 0; i < m; ++i) {
    Value sd = zero_value(2), se = zero_value(2);
    for (std::size_t n = 0; n < batch.d[i].size(); ++n) {
      sd = sd + batch.d[i][n];
      se = se + batch.e[i][n];
    }
    good += recover_sums(rs[i]) == std::make_pair(sd, se);
  }
  return {good == m, count_of(good, m) + " sampled pair paths recover (sum d, sum e) exactly"};
}

Outcome second_moment_ratio() {
  std::size_t exact_good = 0, exact_total = 0, degenerate = 0;
  std::vector<CellRepresentation> fixtures_list{represent_mds(fixtures::fair_coin()), represent_mds(fixtures::skewed()),
                                                represent_mds(fixtures::scale_follows_sign()),
                                                represent_mds(fixtures::sign_times_coin())};
  for (std::uint64_t i = 0; i < 60; ++i) {
    fixtures_list.push_back(represent_mds(random_process(spec(60000 + i, 1 + i % 4, 2 + (i / 4) % 3, 1 + i % 2, true))));
  }
  // An all-zero MDS has E|sum d|^2 = 0 and no defined ratio.
  auto exact = [](const CellRepresentation& r) -> std::optional<ExactRatio> {
    try {
      return exact_decoupling_ratio(r, 2);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateBatch) throw;
      return std::nullopt;
    }
  };
  for (const CellRepresentation& r : fixtures_list) {
    const std::optional<ExactRatio> ex = exact(r);
    if (!ex) {
      ++degenerate;
      continue;
    }
    ++exact_total;
    exact_good += *ex->moment_d == *ex->moment_e && ex->ratio == 1.0;
  }
  Outcome out;
  std::size_t mc_good = 0;
  std::string mc;
  // scale_follows_sign and the first non-degenerate generated fixture of depth 3.
  std::size_t generated = 4;
  while (fixtures_list[generated].depth() != 3 || !exact(fixtures_list[generated])) {
    ++generated;
  }
  for (std::size_t k : {std::size_t{2}, generated}) {
    const RatioEstimate est = decoupling_ratio(fixtures_list[k], 2, 100000, 60100 + k);
    const bool inside = std::abs(est.ratio - 1) <= kCiSigmas * est.standard_error;
    mc_good += inside;
    mc += (mc.empty() ? "" : ", ") + fmt(est.ratio) + " +/- " + fmt(kCiSigmas * est.standard_error);
  }
  out.pass = exact_good == exact_total && mc_good == 2;
  out.detail = "exact ratio 1 on " + count_of(exact_good, exact_total) + " fixtures of depth <= 4 (" +
               std::to_string(degenerate) + " all-zero skipped); Monte Carlo M = 1e5: " + mc;
  return out;
}

double poisson_oracle(std::complex<double> z, double lo, double hi) {
  const double r = std::abs(z), phi = std::arg(z);
  auto kernel = [&](double theta) {
    return (1 - r * r) / (2 * kPi * (1 - 2 * r * std::cos(theta - phi) + r * r));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(kernel, lo, hi, 12, 1e-12);
}

Outcome harmonic() {
  PhiloxStream rng(70000, 0);
  double worst = 0;
  std::size_t center_exact = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::complex<double> z = std::polar(0.95 * std::sqrt(rng.uniform_open01()), 2 * kPi * rng.uniform_open01());
    const double lo = 2 * kPi * rng.uniform_open01();
    const double hi = lo + 2 * kPi * rng.uniform_open01();
    worst = std::max(worst, std::abs(harmonic_measure(z, lo, hi) - poisson_oracle(z, lo, hi)));
    center_exact += harmonic_measure(0.0, lo, hi) == (hi - lo) / (2 * kPi);
  }
  return {worst <= 1e-10 && center_exact == 1000,
          "max |closed form - quadrature| = " + fmt(worst) + " over 1000 pairs; omega(0, arc) exact " +
              count_of(center_exact, 1000)};
}

struct EmbeddingRuns {
  std::vector<std::pair<std::string, double>> exit_sample;  // fixture, p-value
  double euler_p = 0;
  std::string euler_fixture;
  std::size_t euler_restarts = 0;
  MartingaleReport euler_martingale;
  MartingaleReport exit_martingale;
};

EmbeddingRuns run_embeddings() {
  EmbeddingRuns out;
  const std::size_t m = 100000;
  const CellRepresentation deep = represent_mds(random_process(spec(80003, 3, 3, 1, true)));
  const std::vector<std::pair<std::string, CellRepresentation>> named{
      {"skewed", represent_mds(fixtures::skewed())},
      {"scale_follows_sign", represent_mds(fixtures::scale_follows_sign())},
      {"generated depth 3", deep}};
  BrownianConfig cfg;
  cfg.scheme = Scheme::ExitSample;
  for (std::size_t i = 0; i < named.size(); ++i) {
    cfg.seed = 80100 + i;
    const SimulationBatch batch = simulate_F(named[i].second, cfg, m);
    out.exit_sample.emplace_back(named[i].first, increment_law_test(named[i].second, batch.paths).test.p_value);
    if (i + 1 == named.size()) out.exit_martingale = martingale_check(batch.paths, default_checkpoints(3, 1, 3));
  }
  cfg.scheme = Scheme::Euler;
  cfg.seed = 80200;
  const SimulationBatch batch = simulate_F(deep, cfg, m);
  out.euler_fixture = "generated depth 3";
  out.euler_p = increment_law_test(deep, batch.paths).test.p_value;
  out.euler_restarts = batch.censored_restarts;
  out.euler_martingale = martingale_check(batch.paths, default_checkpoints(deep.depth(), cfg.grid_per_block));
  return out;
}

Outcome embedding_law(const EmbeddingRuns& runs) {
  bool ok = runs.euler_p > 0.01;
  std::string detail = "chi-square p-values at M = 1e5, alpha 0.01: exit_sample";
  for (const auto& [name, p] : runs.exit_sample) {
    ok = ok && p > 0.01;
    detail += " " + name + " " + fmt(p) + ";";
  }
  detail += " euler " + runs.euler_fixture + " " + fmt(runs.euler_p) + " (" + std::to_string(runs.euler_restarts) +
            " censored restarts)";
  return {ok, detail};
}

Outcome martingale(const EmbeddingRuns& runs) {
  const MartingaleReport& r = runs.euler_martingale;
  double worst_mean = 0, worst_slope = 0;
  for (const CheckpointMean& m : r.means) {
    if (m.standard_error > 0) worst_mean = std::max(worst_mean, std::abs(m.mean) / m.standard_error);
  }
  std::size_t defined = 0;
  for (const SlopeCheck& s : r.slopes) {
    if (!s.defined) continue;
    ++defined;
    worst_slope = std::max(worst_slope, std::abs(s.slope - 1) / s.standard_error);
  }
  Outcome out;
  out.pass = martingale_passes(r) && martingale_passes(runs.exit_martingale);
  out.detail = "euler: max |mean F_t| / SE = " + fmt(worst_mean) + " at " + std::to_string(r.means.size()) +
               " checkpoints, max |slope - 1| / SE = " + fmt(worst_slope) + " over " + std::to_string(defined) +
               " slopes; exit_sample " + (martingale_passes(runs.exit_martingale) ? "passes" : "fails");
  return out;
}

class Scratch {
 public:
  Scratch() : dir_(fs::temp_directory_path() / ("canonrep_accept_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string operator()(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  Scratch tmp;
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " --quiet 2>/dev/null").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  // Each entry writes outputs named with the placeholder @, run once with "1" and once with "2".
  struct Command {
    std::string args;
    std::vector<std::string> outputs;
  };
  const std::string g = tmp("g1.json"), rep = tmp("rep1.json"), pair = tmp("pair1.json");
  const std::vector<Command> commands{
      {"gen --seed 15 --depth 3 --branching 3 --dimension 2 --mds --out " + tmp("g@.json"), {"g@.json"}},
      {"gen --seed 12 --depth 2 --pair --out " + tmp("gp@.json"), {"gp@.json"}},
      {"represent --in " + g + " --out " + tmp("rep@.json"), {"rep@.json"}},
      {"decouple --in " + rep + " --out " + tmp("pair@.json"), {"pair@.json"}},
      {"transport --in " + pair + " --out " + tmp("t@.json"), {"t@.json"}},
      {"bench --in " + rep + " --p 3 --samples 20000 --seed 5 --out " + tmp("b@.json") + " --csv " + tmp("b@.csv"),
       {"b@.json", "b@.csv"}},
      {"skorohod --in " + rep + " --samples 20000 --seed 6 --out " + tmp("s@.json") + " --csv " + tmp("s@.csv") +
           " --svg " + tmp("s@.svg"),
       {"s@.json", "s@.csv", "s@.svg"}},
      {"skorohod --scheme euler --in " + rep + " --samples 200 --seed 7 --out " + tmp("e@.json") + " --csv " +
           tmp("e@.csv"),
       {"e@.json", "e@.csv"}},
  };
  auto with = [](std::string s, char c) {
    for (char& ch : s) {
      if (ch == '@') ch = c;
    }
    return s;
  };
  std::size_t same = 0;
  std::string mismatch;
  for (const Command& c : commands) {
    const int a = run(with(c.args, '1'));
    const int b = run(with(c.args, '2'));
    bool ok = a == b && a >= 0 && a != 2;
    for (const std::string& o : c.outputs) {
      const std::string x = slurp(tmp(with(o, '1'))), y = slurp(tmp(with(o, '2')));
      ok = ok && !x.empty() && x == y;
    }
    if (ok) {
      ++same;
    } else if (mismatch.empty()) {
      mismatch = "; first mismatch: " + c.args.substr(0, c.args.find(' '));
    }
  }
  return {same == commands.size(),
          count_of(same, commands.size()) + " seeded commands byte-identical across two runs" + mismatch};
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("error: ") + e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string cli;
  app.add_option("--cli", cli, "Path to the canonrep executable")->required();
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = guarded(f);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail << " (" << fmt(secs)
              << " s)" << std::endl;
    for (const std::string& n : o.notes) std::cout << "     " << n << std::endl;
  };

  report(1, "law preservation", law_preservation);
  report(2, "zero sections", zero_sections);
  report(3, "decoupled copy", decoupled_copy);
  report(4, "transport", transport);
  report(5, "interleaved identities", interleaved_identities);
  report(6, "p = 2 decoupling ratio", second_moment_ratio);

  report(7, "harmonic measure", harmonic);
  // Criterion 9 reuses the batches simulated for criterion 8.
  std::optional<EmbeddingRuns> runs;
  report(8, "embedding law", [&] {
    runs = run_embeddings();
    return embedding_law(*runs);
  });
  report(9, "martingale proxy", [&] { return runs ? martingale(*runs) : Outcome{false, "no simulation batches"}; });
  report(10, "determinism", [&] { return determinism(cli); });

  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
