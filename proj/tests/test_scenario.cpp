#include <doctest.h>

#include <cmath>

#include "acml/scenario.hpp"
#include "test_util.hpp"

using namespace acml;

TEST_CASE("bundled scenarios load") {
  const auto& bundle = bundled_scenarios();
  CHECK(bundle.size() == 6);
  const Scenario b = load_scenario(bundle.at("fixtureB.scn"));
  CHECK(b.name == "sasakian-flat");
  CHECK(b.dim == 3);
  CHECK(b.sample.count == 200);
  CHECK(b.sample.seed == 42);
  CHECK(b.sample.tolerance == doctest::Approx(1e-8));
  CHECK(b.sample.box.size() == 3);
  const std::vector<std::string> tasks = {"validate", "classify",  "q4",
                                          "theorem7", "theorem8",  "lift",
                                          "lift-theorems"};
  CHECK(b.tasks == tasks);
  CHECK(b.gamma[0] == "-2*x2");

  // the exact format example parses verbatim
  const std::string example =
      "name = sasakian-flat\n"
      "dim = 3\n"
      "[gamma]  a1 = \"-2*x2\"   a2 = \"0\"\n"
      "[g]      r1 = \"1\",\"0\"   r2 = \"0\",\"1\"\n"
      "[phi]    r1 = \"0\",\"1\"   r2 = \"-1\",\"0\"\n"
      "[sample] box = [-1,1] x [-1,1] x [-1,1]   points = 200   seed = 42   tol = 1e-8\n"
      "[tasks]  run = validate, classify, q4, theorem7, theorem8, lift, lift-theorems\n";
  const Scenario ex = load_scenario(example);
  CHECK(ex.dim == 3);
  CHECK(ex.phi[1][0] == "-1");
  CHECK(ex.tasks.size() == 7);

  CHECK_NOTHROW(load_scenario_file("fixtureB.scn"));   // bundled fallback
  CHECK_NOTHROW(load_scenario_file("fixtureB"));
  CHECK_THROWS_AS(load_scenario_file("nope.scn"), ScenarioError);
}

TEST_CASE("scenario diagnostics carry line numbers") {
  // phi matrix with a wrong row width
  const std::string bad_phi =
      "name = broken\ndim = 3\n"
      "[gamma] a1 = \"0\" a2 = \"0\"\n"
      "[g] r1 = \"1\",\"0\" r2 = \"0\",\"1\"\n"
      "[phi] r1 = \"0\",\"1\",\"0\" r2 = \"-1\",\"0\"\n"
      "[tasks] run = validate\n";
  try {
    load_scenario(bad_phi);
    FAIL("expected dimension mismatch");
  } catch (const ScenarioError& e) {
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("expected 2") != std::string::npos);
  }

  // coordinate out of range inside an entry, n = 5
  const std::string bad_coord =
      "name = broken\ndim = 5\n"
      "[gamma] a1 = \"0\" a2 = \"0\" a3 = \"0\" a4 = \"0\"\n"
      "[g] r1 = \"x9\",\"0\",\"0\",\"0\" r2 = \"0\",\"1\",\"0\",\"0\" r3 = \"0\",\"0\",\"1\",\"0\" r4 = \"0\",\"0\",\"0\",\"1\"\n"
      "[phi] r1 = \"0\",\"-1\",\"0\",\"0\" r2 = \"1\",\"0\",\"0\",\"0\" r3 = \"0\",\"0\",\"0\",\"-1\" r4 = \"0\",\"0\",\"1\",\"0\"\n"
      "[tasks] run = validate\n";
  CHECK_THROWS_WITH_AS(load_scenario(bad_coord), doctest::Contains("out of range"),
                       ScenarioError);

  CHECK_THROWS_AS(load_scenario("name = x\ndim = 4\n"), ScenarioError);
  CHECK_THROWS_WITH_AS(load_scenario("dim = 3\nnonsense = 1\n"),
                       doctest::Contains("unknown key"), ScenarioError);
  const std::string bad_task =
      "name = x\ndim = 3\n[gamma] a1 = \"0\" a2 = \"0\"\n"
      "[g] r1 = \"1\",\"0\" r2 = \"0\",\"1\"\n"
      "[phi] r1 = \"0\",\"1\" r2 = \"-1\",\"0\"\n[tasks] run = validate, warp\n";
  CHECK_THROWS_WITH_AS(load_scenario(bad_task), doctest::Contains("unknown task"),
                       ScenarioError);
}

TEST_CASE("seeded sampling is pinned") {
  SampleSpec spec;
  spec.box.assign(3, {-1.0, 1.0});
  spec.count = 3;
  spec.seed = 42;
  const auto pts = sample_points(spec);
  REQUIRE(pts.size() == 3);

  // golden values for mt19937_64(42) with u = (x >> 11) * 2^-53 on [-1, 1]
  std::mt19937_64 rng(42);
  for (const auto& p : pts)
    for (double c : p) {
      const double expect = -1.0 + 2.0 * acml::u01(rng());
      CHECK(c == expect);
    }

  const auto again = sample_points(spec);
  CHECK(pts == again);

  SampleSpec zero = spec;
  zero.count = 0;
  CHECK_THROWS_AS(sample_points(zero), std::invalid_argument);
}

TEST_CASE("running the sasakian fixture") {
  const Scenario sc = load_scenario(bundled_scenarios().at("fixtureB.scn"));
  RunOptions opts;
  opts.points_override = 60;  // keep the unit suite fast
  const Report rep = run_scenario(sc, opts);
  CHECK_FALSE(rep.any_fail());
  CHECK(rep.classification.sasakian);
  CHECK(rep.classification.ack_full);
  for (const auto& t : rep.tasks)
    CHECK((t.verdict == "pass" || t.verdict == "info"));
}

TEST_CASE("a broken structure fails validation with exit status 1 semantics") {
  const std::string broken =
      "name = broken-phi\ndim = 3\n"
      "[gamma] a1 = \"0\" a2 = \"0\"\n"
      "[g] r1 = \"1\",\"0\" r2 = \"0\",\"1\"\n"
      "[phi] r1 = \"1\",\"0\" r2 = \"0\",\"1\"\n"
      "[tasks] run = validate\n";
  const Report rep = run_scenario(load_scenario(broken));
  CHECK(rep.any_fail());
  CHECK(rep.tasks.front().verdict == "fail");
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  const Scenario sc = load_scenario(bundled_scenarios().at("fixtureC.scn"));
  RunOptions opts;
  opts.points_override = 50;
  const std::string once = report_to_json(run_scenario(sc, opts));
  const std::string twice = report_to_json(run_scenario(sc, opts));
  CHECK(once == twice);
  RunOptions threaded = opts;
  threaded.threads = 4;
  const std::string parallel = report_to_json(run_scenario(sc, threaded));
  CHECK(once == parallel);
  CHECK(once.find("\"elapsed_ms\": 0") != std::string::npos);
}

TEST_CASE("fd cross-check block") {
  const Scenario sc = load_scenario(bundled_scenarios().at("fixtureD.scn"));
  RunOptions opts;
  opts.points_override = 20;
  opts.fd_check = true;
  Scenario trimmed = sc;
  trimmed.tasks = {"validate"};
  const Report rep = run_scenario(trimmed, opts);
  CHECK(rep.fd_check.present);
  CHECK(rep.fd_check.points == 25);
  CHECK(rep.fd_check.max_discrepancy <= 1e-5);
  CHECK(report_to_json(rep).find("fd_check") != std::string::npos);
}

TEST_CASE("textual asymmetry of g is flagged, not fatal") {
  const std::string asym =
      "name = asym\ndim = 3\n"
      "[gamma] a1 = \"0\" a2 = \"0\"\n"
      "[g] r1 = \"1\",\"0\" r2 = \"0.0\",\"1\"\n"
      "[phi] r1 = \"0\",\"-1\" r2 = \"1\",\"0\"\n"
      "[tasks] run = validate\n";
  const Scenario sc = load_scenario(asym);
  CHECK(sc.warnings.size() == 1);
  const Report rep = run_scenario(sc);
  CHECK_FALSE(rep.any_fail());
}
