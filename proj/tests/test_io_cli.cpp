#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "canonrep/error.hpp"
#include "canonrep/generate.hpp"
#include "canonrep/io.hpp"
#include "fixtures.hpp"

using namespace canonrep;
using fixtures::q;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Io;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("canonrep_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }

  static std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int run(const std::string& args) const {
    const std::string cmd = std::string(CANONREP_CLI) + " " + args + " 2>" + file("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

}  // namespace

TEST(Json, ProcessRoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GeneratorSpec s;
    s.seed = seed;
    s.depth = 1 + seed % 4;
    s.branching = 4;
    s.dimension = 1 + seed % 3;
    const FiniteProcess p = random_process(s);
    const Json j = process_to_json(p);
    const FiniteProcess back = process_from_json(j);
    EXPECT_EQ(joint_law(back), joint_law(p));
    EXPECT_EQ(dump(process_to_json(back)), dump(j));
  }
}

TEST(Json, SharedChildrenAreUnfolded) {
  const FiniteProcess p = fixtures::iid(3, {{Value{q(-1)}, q(1, 2)}, {Value{q(1)}, q(1, 2)}});
  const FiniteProcess back = process_from_json(process_to_json(p));
  EXPECT_EQ(joint_law(back), joint_law(p));
}

TEST(Json, RepresentationAndTransportRoundTrip) {
  GeneratorSpec s;
  s.seed = 5;
  s.depth = 3;
  s.branching = 3;
  s.dimension = 2;
  const CellRepresentation r = canonical_representation(random_process(s));
  const Json jr = representation_to_json(r);
  const CellRepresentation rb = representation_from_json(jr);
  EXPECT_EQ(law_of_representation(rb), law_of_representation(r));
  EXPECT_EQ(dump(representation_to_json(rb)), dump(jr));

  const std::vector<StepTransport> steps = build_transport(random_tangent_pair(s));
  const Json jt = transport_to_json(steps);
  EXPECT_EQ(dump(transport_to_json(transport_from_json(jt))), dump(jt));
}

TEST(Json, RationalsAndErrors) {
  EXPECT_EQ(rational_from_json(Json("3/4")), q(3, 4));
  EXPECT_EQ(rational_from_json(Json("-6/8")), q(-3, 4));
  EXPECT_EQ(rational_from_json(Json(2)), q(2));
  EXPECT_EQ(rational_from_json(Json(0.5)), q(1, 2));
  EXPECT_EQ(kind_of([] { rational_from_json(Json("x/2")); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { rational_from_json(Json("1/0")); }), ErrorKind::Parse);

  Json j = representation_to_json(canonical_representation(fixtures::fair_coin()));
  j["root"]["branches"][1]["interval"] = Json::array({"1/2", "3/4"});
  EXPECT_EQ(kind_of([&] { representation_from_json(j); }), ErrorKind::ProbSumNotOne);
  Json v = process_to_json(fixtures::fair_coin());
  v["format_version"] = 2;
  EXPECT_EQ(kind_of([&] { process_from_json(v); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { read_json_file("/nonexistent/canonrep.json"); }), ErrorKind::Io);
}

TEST(Output, CsvAndSvgShapes) {
  BrownianConfig cfg;
  cfg.seed = 3;
  const SimulationBatch batch = simulate_F(represent_mds(fixtures::scale_follows_sign()), cfg, 30);
  const std::string csv = trajectories_csv(batch.paths);
  EXPECT_EQ(csv.rfind("m,t,F0\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 30 * 3);
  const std::string svg = trajectories_svg(batch.paths);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t lines = 0;
  for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++lines;
  EXPECT_EQ(lines, 20u);
  EXPECT_EQ(format_double(0.1), "0.1");
}

TEST_F(CliTest, ValidateExitCodes) {
  const std::string good = write("coin.json", dump(process_to_json(fixtures::fair_coin())));
  EXPECT_EQ(run("validate --in " + good), 0);
  Json bad = process_to_json(fixtures::fair_coin());
  bad["root"]["branches"][0]["prob"] = "1/3";
  EXPECT_EQ(run("validate --in " + write("bad.json", dump(bad))), 1);
  EXPECT_EQ(run("validate --in " + write("broken.json", "{\"dimension\": 1,")), 2);
  EXPECT_EQ(run("validate --in " + file("missing.json")), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(CliTest, RepresentDecoupleTransport) {
  const std::string in = write("p.json", dump(process_to_json(fixtures::scale_follows_sign())));
  ASSERT_EQ(run("represent --in " + in + " --out " + file("rep.json")), 0);
  EXPECT_EQ(run("validate --in " + file("rep.json")), 0);
  const CellRepresentation r = representation_from_json(read_json_file(file("rep.json")));
  EXPECT_EQ(law_of_representation(r), joint_law(fixtures::scale_follows_sign()));

  ASSERT_EQ(run("decouple --in " + file("rep.json") + " --out " + file("pair.json")), 0);
  const FiniteProcess pair = process_from_json(read_json_file(file("pair.json")));
  EXPECT_EQ(pair.dimension(), 2u);
  EXPECT_TRUE(are_tangent(PairProcess(pair)).ok);

  EXPECT_EQ(run("transport --in " + file("pair.json") + " --out " + file("t.json")), 0);
  EXPECT_FALSE(transport_from_json(read_json_file(file("t.json"))).empty());
  EXPECT_EQ(run("transport --in " + file("rep.json") + " " + file("rep.json") + " --out " + file("t2.json")), 0);
  const std::string coin = write("coin.json", dump(process_to_json(fixtures::fair_coin())));
  EXPECT_EQ(run("transport --in " + file("rep.json") + " " + coin + " --out " + file("t3.json")), 1);
}

TEST_F(CliTest, BenchSecondMomentContainsOne) {
  const std::string in = write("p.json", dump(process_to_json(fixtures::scale_follows_sign())));
  ASSERT_EQ(run("bench --in " + in + " --p 2 --samples 20000 --seed 4 --out " + file("b.json") + " --csv " +
                file("sums.csv")),
            0);
  const Json report = read_json_file(file("b.json"));
  EXPECT_LE(report["ci_low"].get<double>(), 1.0);
  EXPECT_GE(report["ci_high"].get<double>(), 1.0);
  EXPECT_EQ(report["oracle"]["exact_ratio"].get<double>(), 1.0);
  EXPECT_EQ(report["M"].get<std::size_t>(), 20000u);
  const std::string csv = slurp(file("sums.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 20001);
  EXPECT_EQ(run("bench --in " + in + " --p 2 --samples 100"), 2);
  EXPECT_EQ(run("bench --in " + in + " --p 2 --samples 100 --seed 1 --depth-limit 0 --out " + file("c.json")), 0);
  EXPECT_TRUE(read_json_file(file("c.json"))["oracle"]["exact_ratio"].is_null());
}

TEST_F(CliTest, SkorohodExitSample) {
  const std::string in = write("coin.json", dump(process_to_json(fixtures::fair_coin())));
  ASSERT_EQ(run("skorohod --in " + in + " --samples 20000 --seed 2 --out " + file("s.json") + " --svg " +
                file("s.svg")),
            0);
  const Json report = read_json_file(file("s.json"));
  EXPECT_GT(report["increment_law"]["p_value"].get<double>(), 0.01);
  EXPECT_TRUE(report["martingale"]["passed"].get<bool>());
  EXPECT_EQ(slurp(file("s.svg")).rfind("<svg", 0), 0u);
  EXPECT_EQ(run("skorohod --in " + in + " --samples 10 --seed 2 --scheme milstein"), 1);
  const std::string drift = write("drift.json", dump(process_to_json(fixtures::one_step({{Value{q(1)}, q(1, 2)},
                                                                                         {Value{q(2)}, q(1, 2)}}))));
  EXPECT_EQ(run("skorohod --in " + drift + " --samples 10 --seed 2"), 1);
}

TEST_F(CliTest, GenIsDeterministicAndGuarded) {
  ASSERT_EQ(run("gen --seed 9 --depth 3 --branching 4 --dimension 2 --out " + file("a.json")), 0);
  ASSERT_EQ(run("gen --seed 9 --depth 3 --branching 4 --dimension 2 --out " + file("b.json")), 0);
  EXPECT_EQ(slurp(file("a.json")), slurp(file("b.json")));
  ASSERT_EQ(run("gen --seed 10 --depth 3 --branching 4 --dimension 2 --out " + file("c.json")), 0);
  EXPECT_NE(slurp(file("a.json")), slurp(file("c.json")));

  ASSERT_EQ(run("gen --seed 9 --depth 3 --mds --out " + file("m.json")), 0);
  EXPECT_TRUE(is_mds(process_from_json(read_json_file(file("m.json")))).ok);
  ASSERT_EQ(run("gen --seed 9 --depth 2 --pair --out " + file("pair.json")), 0);
  EXPECT_TRUE(are_tangent(PairProcess(process_from_json(read_json_file(file("pair.json"))))).ok);

  EXPECT_EQ(run("gen --seed 9 --depth 9"), 1);
  EXPECT_EQ(run("gen --depth 2"), 2);
}
