#include "canonrep/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "canonrep/error.hpp"
#include "canonrep/generate.hpp"
#include "canonrep/io.hpp"
#include "canonrep/random.hpp"

namespace canonrep {

namespace {

struct RunConfig {
  std::vector<std::string> inputs;
  std::string output;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  int format_version = kFormatVersion;

  double p = 2;
  std::size_t samples = 0;
  std::size_t depth_limit = 4;
  bool exact = false;
  std::string csv;
  std::string svg;
  unsigned grid_bits = 10;

  std::string scheme = "exit_sample";
  std::size_t grid = 10;
  double dt = 5e-5;
  double cap = 1e4;

  GeneratorSpec gen;
  bool pair = false;
};

class Session {
 public:
  explicit Session(const RunConfig& cfg) : cfg_(cfg) {}

  void summary(const std::string& line) const {
    if (cfg_.quiet) return;
    (cfg_.output.empty() || cfg_.output == "-" ? std::cerr : std::cout) << line << "\n";
  }

  const std::string& single_input() const {
    if (cfg_.inputs.size() != 1) throw Error(ErrorKind::InvalidArgument, "expected exactly one --in file");
    return cfg_.inputs.front();
  }

  std::uint64_t seed() const {
    if (!cfg_.seed) throw Error(ErrorKind::InvalidArgument, "this command is stochastic and needs an explicit --seed");
    return *cfg_.seed;
  }

 private:
  const RunConfig& cfg_;
};

bool is_representation(const Json& j) {
  auto root = j.find("root");
  if (root == j.end() || !root->is_object()) return false;
  auto br = root->find("branches");
  return br != root->end() && br->is_array() && !br->empty() && (*br)[0].contains("interval");
}

FiniteProcess load_process(const Json& j) {
  FiniteProcess p = process_from_json(j);
  validate_process(p);
  return p;
}

/// A representation file as is, or a process file through its canonical representation.
CellRepresentation load_representation(const std::string& path) {
  const Json j = read_json_file(path);
  if (is_representation(j)) return representation_from_json(j);
  return canonical_representation(load_process(j));
}

CellRepresentation represent_mds_or_check(const std::string& path) {
  const Json j = read_json_file(path);
  if (is_representation(j)) return representation_from_json(j);
  return represent_mds(load_process(j));
}

int cmd_validate(const RunConfig& cfg, const Session& s) {
  const Json j = read_json_file(s.single_input());
  if (is_representation(j)) {
    const CellRepresentation r = representation_from_json(j);
    s.summary("valid representation: dimension " + std::to_string(r.dimension()) + ", depth " +
              std::to_string(r.depth()) + ", " + std::to_string(law_of_representation(r).size()) + " paths");
  } else {
    const FiniteProcess p = load_process(j);
    s.summary("valid process: dimension " + std::to_string(p.dimension()) + ", depth " + std::to_string(p.depth()) +
              ", " + std::to_string(joint_law(p).size()) + " paths");
  }
  (void)cfg;
  return kExitOk;
}

int cmd_represent(const RunConfig& cfg, const Session& s) {
  const FiniteProcess p = load_process(read_json_file(s.single_input()));
  const CellRepresentation r = canonical_representation(p);
  const bool same = law_of_representation(r) == joint_law(p);
  write_text(cfg.output, dump(representation_to_json(r)));
  s.summary(std::string("law preserved: ") + (same ? "yes" : "NO") + ", " + std::to_string(r.nodes().size()) +
            " nodes");
  return same ? kExitOk : kExitDomain;
}

int cmd_decouple(const RunConfig& cfg, const Session& s) {
  const CellRepresentation r = load_representation(s.single_input());
  const DecoupledRepresentation dr = construct_ci_copy(r);
  const PairProcess pq = pair_law(dr);
  const bool tangent = are_tangent(pq).ok;
  const bool ci = satisfies_ci(pq, 1).ok;
  const PathLaw joint = joint_law(pq.process());
  const bool u_law = component_law(joint, 0, r.dimension()) == law_of_representation(r);
  write_text(cfg.output, dump(process_to_json(pq.process())));
  s.summary(std::string("tangent: ") + (tangent ? "yes" : "NO") + ", C.I.: " + (ci ? "yes" : "NO") +
            ", u-law equals source: " + (u_law ? "yes" : "NO"));
  return tangent && ci && u_law ? kExitOk : kExitDomain;
}

int cmd_transport(const RunConfig& cfg, const Session& s) {
  PairProcess pq;
  if (cfg.inputs.size() == 1) {
    pq = PairProcess(load_process(read_json_file(cfg.inputs.front())));
  } else if (cfg.inputs.size() == 2) {
    pq = overlay(load_representation(cfg.inputs[0]), load_representation(cfg.inputs[1]));
  } else {
    throw Error(ErrorKind::InvalidArgument, "transport takes one pair-process file or two representation files");
  }
  const CellRepresentation base = canonical_representation(pq.process());
  const std::vector<StepTransport> steps = build_transport(pq, base);
  std::size_t sections = 0, failed = 0;
  std::string first_failure;
  for (const StepTransport& st : steps) {
    for (const TransportMap& t : st.sections) {
      ++sections;
      MeasureCheck check = verify_measure_preserving(t, cfg.grid_bits);
      if (check.ok) {
        for (const TransportPiece& piece : t.pieces) {
          const Rational x = piece.source.midpoint();
          if (t.apply(x) != transport_via_inverse(base, pq.component_dim(), t.history, x)) {
            check = {false, "direct and inverse-based maps disagree at " + to_string(x)};
            break;
          }
        }
      }
      if (!check.ok) {
        if (failed++ == 0) first_failure = to_string(t.history) + ": " + check.reason;
      }
    }
  }
  write_text(cfg.output, dump(transport_to_json(steps)));
  s.summary(std::to_string(sections) + " sections, measure preserving: " +
            (failed == 0 ? std::string("all") : std::to_string(failed) + " failed (" + first_failure + ")"));
  return failed == 0 ? kExitOk : kExitDomain;
}

int cmd_bench(const RunConfig& cfg, const Session& s) {
  const std::uint64_t seed = s.seed();
  const std::string& path = s.single_input();
  const CellRepresentation r = load_representation(path);
  if (cfg.samples == 0) throw Error(ErrorKind::InvalidArgument, "--samples must be at least 1");
  if (!(cfg.p > 1)) throw Error(ErrorKind::InvalidArgument, "--p must exceed 1");
  const RatioEstimate est = decoupling_ratio(r, cfg.p, cfg.samples, seed);

  Json report;
  report["format_version"] = kFormatVersion;
  report["generator"] = std::string(kGeneratorName);
  report["ratio"] = est.ratio;
  report["standard_error"] = est.standard_error;
  report["ci_low"] = est.ci_low;
  report["ci_high"] = est.ci_high;
  report["ci_sigmas"] = kCiSigmas;
  report["p"] = cfg.p;
  report["M"] = cfg.samples;
  report["seed"] = seed;
  report["norm_d"] = est.denominator.estimate;
  report["norm_e"] = est.numerator.estimate;
  bool in_ci = true;
  Json oracle;
  if (cfg.exact || r.depth() <= cfg.depth_limit) {
    const ExactRatio ex = exact_decoupling_ratio(r, cfg.p);
    oracle["exact_ratio"] = ex.ratio;
    oracle["moment_d"] = ex.moment_d ? Json(to_string(*ex.moment_d)) : Json(nullptr);
    oracle["moment_e"] = ex.moment_e ? Json(to_string(*ex.moment_e)) : Json(nullptr);
    in_ci = est.ci_low <= ex.ratio && ex.ratio <= est.ci_high;
    oracle["within_ci"] = in_ci;
  } else {
    oracle["exact_ratio"] = nullptr;
  }
  report["oracle"] = std::move(oracle);
  write_text(cfg.output, dump(report));

  if (!cfg.csv.empty()) {
    write_text(cfg.csv, sums_csv(sample_paths(construct_ci_copy(r), cfg.samples, seed, path)));
  }
  std::ostringstream line;
  line.precision(6);
  line << "ratio " << est.ratio << " +/- " << kCiSigmas * est.standard_error << " (p = " << cfg.p
       << ", M = " << cfg.samples << ")";
  if (report["oracle"]["exact_ratio"].is_number()) {
    line << ", exact " << report["oracle"]["exact_ratio"].get<double>() << (in_ci ? " inside" : " OUTSIDE") << " CI";
  }
  s.summary(line.str());
  return in_ci ? kExitOk : kExitStatistical;
}

Json chi_square_json(const ChiSquare& c) {
  return Json{{"statistic", c.statistic}, {"dof", c.dof}, {"p_value", c.p_value}, {"categories", c.categories}};
}

int cmd_skorohod(const RunConfig& cfg, const Session& s) {
  BrownianConfig bc;
  bc.seed = s.seed();
  bc.scheme = parse_scheme(cfg.scheme);
  bc.dt_base = cfg.dt;
  bc.cap = cfg.cap;
  bc.grid_per_block = cfg.grid;
  if (cfg.samples == 0) throw Error(ErrorKind::InvalidArgument, "--samples must be at least 1");
  const CellRepresentation r = represent_mds_or_check(s.single_input());
  const SimulationBatch batch = simulate_F(r, bc, cfg.samples);
  const IncrementLawTest law = increment_law_test(r, batch.paths);
  constexpr double kAlpha = 0.01;
  const bool law_ok = law.test.p_value > kAlpha;

  Json report;
  report["format_version"] = kFormatVersion;
  report["generator"] = std::string(kGeneratorName);
  report["scheme"] = to_string(bc.scheme);
  report["seed"] = bc.seed;
  report["M"] = cfg.samples;
  report["dt"] = bc.dt_base;
  report["cap"] = bc.cap;
  report["grid"] = bc.scheme == Scheme::Euler ? bc.grid_per_block : 1;
  report["censored_restarts"] = batch.censored_restarts;
  report["coarse_blocks"] = batch.coarse_blocks;
  report["total_blocks"] = batch.total_blocks;
  Json chi = chi_square_json(law.test);
  chi["alpha"] = kAlpha;
  chi["passed"] = law_ok;
  report["increment_law"] = std::move(chi);

  bool mart_ok = true;
  if (batch.paths.size() >= kMinMartingalePaths) {
    const std::size_t grid = bc.scheme == Scheme::Euler ? bc.grid_per_block : 1;
    const MartingaleReport mr = martingale_check(batch.paths, default_checkpoints(r.depth(), grid));
    mart_ok = martingale_passes(mr);
    Json means = Json::array(), slopes = Json::array();
    for (const CheckpointMean& m : mr.means) {
      means.push_back(Json{{"t", m.t}, {"mean", m.mean}, {"standard_error", m.standard_error}});
    }
    for (const SlopeCheck& sc : mr.slopes) {
      Json bins = Json::array();
      for (const ConditionalBin& b : sc.bins) {
        bins.push_back(Json{{"center", b.center}, {"mean_later", b.mean_later}, {"count", b.count}});
      }
      slopes.push_back(Json{{"s", sc.s},
                            {"t", sc.t},
                            {"defined", sc.defined},
                            {"slope", sc.defined ? Json(sc.slope) : Json(nullptr)},
                            {"standard_error", sc.defined ? Json(sc.standard_error) : Json(nullptr)},
                            {"bins", std::move(bins)}});
    }
    report["martingale"] =
        Json{{"sigmas", 5.0}, {"passed", mart_ok}, {"means", std::move(means)}, {"slopes", std::move(slopes)}};
  } else {
    report["martingale"] = nullptr;
  }
  write_text(cfg.output, dump(report));
  if (!cfg.csv.empty()) write_text(cfg.csv, trajectories_csv(batch.paths));
  if (!cfg.svg.empty()) write_text(cfg.svg, trajectories_svg(batch.paths));

  std::ostringstream line;
  line.precision(6);
  line << to_string(bc.scheme) << ": increment chi-square p = " << law.test.p_value << (law_ok ? " (pass)" : " (FAIL)");
  if (report["martingale"].is_null()) {
    line << ", martingale check skipped (needs " << kMinMartingalePaths << " paths)";
  } else {
    line << ", martingale check " << (mart_ok ? "pass" : "FAIL");
  }
  line << ", restarts " << batch.censored_restarts;
  s.summary(line.str());
  return law_ok && mart_ok ? kExitOk : kExitStatistical;
}

int cmd_gen(const RunConfig& cfg, const Session& s) {
  GeneratorSpec spec = cfg.gen;
  spec.seed = s.seed();
  const FiniteProcess p = cfg.pair ? random_tangent_pair(spec).process() : random_process(spec);
  write_text(cfg.output, dump(process_to_json(p)));
  s.summary("generated depth " + std::to_string(p.depth()) + ", dimension " + std::to_string(p.dimension()) +
            (spec.mds ? ", mds" : "") + (cfg.pair ? ", tangent pair" : ""));
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Io:
      return kExitIo;
    default:
      return kExitDomain;
  }
}

}  // namespace

int run_cli(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Canonical representations of finite adapted sequences"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--in", cfg.inputs, "Input JSON file (transport accepts two)");
  app.add_option("--out", cfg.output, "Output file (default stdout)");
  app.add_option("--seed", cfg.seed, "Seed for stochastic commands");
  app.add_flag("--quiet", cfg.quiet, "Suppress the summary line");
  app.add_option("--format-version", cfg.format_version, "Schema version to emit")->check(CLI::IsMember({kFormatVersion}));

  CLI::App* validate = app.add_subcommand("validate", "Check a process or representation file");
  CLI::App* represent = app.add_subcommand("represent", "Canonical representation of a process");
  CLI::App* decouple = app.add_subcommand("decouple", "Pair law of the decoupled copy");
  CLI::App* transport = app.add_subcommand("transport", "Measure-preserving transport between tangent sequences");
  transport->add_option("--grid-bits", cfg.grid_bits, "Dyadic grid used to check measure preservation")
      ->check(CLI::Range(1u, 20u));
  CLI::App* bench = app.add_subcommand("bench", "Monte Carlo decoupling ratio");
  bench->add_option("--p", cfg.p, "Exponent p > 1");
  bench->add_option("--samples", cfg.samples, "Number of sampled pair paths")->required();
  bench->add_option("--depth-limit", cfg.depth_limit, "Enumerate the exact ratio up to this depth");
  bench->add_flag("--exact", cfg.exact, "Always enumerate the exact ratio");
  bench->add_option("--csv", cfg.csv, "Per-path sums");
  CLI::App* skorohod = app.add_subcommand("skorohod", "Brownian embedding of a martingale");
  skorohod->add_option("--scheme", cfg.scheme, "exit_sample or euler");
  skorohod->add_option("--samples", cfg.samples, "Number of paths")->required();
  skorohod->add_option("--grid", cfg.grid, "Grid points per unit block (euler)");
  skorohod->add_option("--dt", cfg.dt, "Block-relative time step (euler)");
  skorohod->add_option("--cap", cfg.cap, "Censoring horizon in Brownian time (euler)");
  skorohod->add_option("--csv", cfg.csv, "Trajectories as (m, t, F_t)");
  skorohod->add_option("--svg", cfg.svg, "Plot of up to 20 trajectories");
  CLI::App* gen = app.add_subcommand("gen", "Random fixture");
  gen->add_option("--depth", cfg.gen.depth, "Depth");
  gen->add_option("--branching", cfg.gen.branching, "Maximum branches per node");
  gen->add_option("--dimension", cfg.gen.dimension, "Value dimension");
  gen->add_option("--value-range", cfg.gen.value_range, "Coordinates lie in [-range, range]");
  gen->add_flag("--mds", cfg.gen.mds, "Mean-zero steps");
  gen->add_flag("--pair", cfg.pair, "Emit a tangent pair process");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  if ((*bench || *skorohod || *gen) && !cfg.seed) {
    std::cerr << "error: this command is stochastic and needs an explicit --seed\n";
    return kExitIo;
  }
  const Session session(cfg);
  try {
    if (*validate) return cmd_validate(cfg, session);
    if (*represent) return cmd_represent(cfg, session);
    if (*decouple) return cmd_decouple(cfg, session);
    if (*transport) return cmd_transport(cfg, session);
    if (*bench) return cmd_bench(cfg, session);
    if (*skorohod) return cmd_skorohod(cfg, session);
    if (*gen) return cmd_gen(cfg, session);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitIo;
}

}  // namespace canonrep
