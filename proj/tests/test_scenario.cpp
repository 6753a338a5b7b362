#include <set>
#include <string>
#include <vector>

#include "defalg/errors.hpp"
#include "defalg/scenario.hpp"
#include "defalg/version.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace defalg;
using namespace defalg::scenario;
using njson = nlohmann::json;

namespace {

njson run_parsed(const std::string& name, const RunOptions& opts = {}) {
  const BuiltinScenario* b = find_builtin(name);
  REQUIRE(b != nullptr);
  RunOutcome out = run_scenario_text(b->text, opts);
  return njson::parse(out.report);
}

}  // namespace

TEST_CASE("builtin registry is complete and well formed") {
  const auto& all = builtin_scenarios();
  CHECK(all.size() == 21);
  std::set<std::string> names;
  for (const auto& b : all) {
    CHECK(names.insert(b.name).second);
    CHECK_FALSE(b.anchor.empty());
    // Every bundled document must parse; name/anchor in the table must match
    // the document body.
    njson doc = njson::parse(b.text);
    CHECK(doc.at("name").get<std::string>() == b.name);
    CHECK(doc.at("anchor").get<std::string>() == b.anchor);
    CHECK(doc.contains("kind"));
    CHECK(doc.at("checks").is_array());
    CHECK(doc.at("checks").size() >= 1);
  }
  CHECK(find_builtin("no_such_scenario") == nullptr);
}

TEST_CASE("every builtin runs and exits as designed") {
  for (const auto& b : builtin_scenarios()) {
    CAPTURE(b.name);
    RunOutcome out = run_scenario_text(b.text);
    const int expected =
        (b.name == "subgeodesic_rigidity" || b.name == "lyra_r2") ? 1 : 0;
    CHECK(out.exit_code == expected);
    njson report = njson::parse(out.report);
    CHECK(report.at("verdict").at("exit_code").get<int>() == expected);
    CHECK(report.at("verdict").at("pass").get<bool>() == (expected == 0));
    CHECK(report.at("diagnostics").empty());
  }
}

TEST_CASE("report skeleton carries artifact, echo, options and checks") {
  njson report = run_parsed("conformal_r2");
  CHECK(report.at("artifact").at("name").get<std::string>() == kArtifactName);
  CHECK(report.at("artifact").at("version").get<std::string>() == kVersion);
  CHECK(report.at("scenario").at("name").get<std::string>() == "conformal_r2");
  CHECK(report.at("options").at("tolerance").is_null());
  CHECK(report.at("options").at("samples").is_null());
  CHECK(report.at("options").at("seed").is_null());
  REQUIRE(report.at("checks").size() == 1);
  const njson& c = report.at("checks")[0];
  CHECK(c.at("op").get<std::string>() == "route_equivalence");
  CHECK(c.at("bound").get<std::string>() == "upper");
  CHECK(c.at("samples").get<int>() == 32);
  CHECK(c.at("max_residual").get<double>() <= 1e-6);
  CHECK(c.at("pass").get<bool>());
  CHECK(c.at("worst_point").is_array());
}

TEST_CASE("reports are byte-identical across repeated runs") {
  for (const char* name : {"conformal_r2", "so3", "bates", "kahler_flat_q"}) {
    const BuiltinScenario* b = find_builtin(name);
    REQUIRE(b != nullptr);
    RunOutcome first = run_scenario_text(b->text);
    RunOutcome second = run_scenario_text(b->text);
    CHECK(first.report == second.report);
    CHECK(first.exit_code == second.exit_code);
  }
}

TEST_CASE("failing scenario reports the failed checks and mismatch") {
  njson report = run_parsed("lyra_r2");
  CHECK(report.at("verdict").at("exit_code").get<int>() == 1);
  std::vector<std::string> failed =
      report.at("verdict").at("failed").get<std::vector<std::string>>();
  REQUIRE(failed.size() == 2);
  CHECK(failed[0] == "residual_3_3");
  CHECK(failed[1] == "classification");
  const njson& cls = report.at("classification");
  CHECK(cls.at("type").get<std::string>() == "pointwise");
  CHECK(cls.at("verdict").get<std::string>() == "NONE");
  CHECK(cls.at("expected").get<std::string>() == "FORMAL");
  CHECK_FALSE(cls.at("matches_expected").get<bool>());
  // Normalization caps the cyclic defect at exactly 1 here: the raw defect is
  // 2 and the scale factor is 1 + max|g| max|A| = 2.
  CHECK(cls.at("cyclic").at("max_residual").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cls.at("commutativity").at("max_residual").get<double>() ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("frame classification lists six named verdicts") {
  njson report = run_parsed("so3");
  const njson& cls = report.at("classification");
  CHECK(cls.at("type").get<std::string>() == "frame");
  std::vector<std::string> names =
      cls.at("names").get<std::vector<std::string>>();
  REQUIRE(names.size() == 6);
  CHECK(names[0] == "plus-minus-flat");
  CHECK(names[4] == "neutral-minus-levicivita");
  std::vector<std::string> verdicts =
      cls.at("verdicts").get<std::vector<std::string>>();
  REQUIRE(verdicts.size() == 6);
  CHECK(verdicts[4] == "FORMAL");
  for (int i : {0, 1, 2, 3, 5}) CHECK(verdicts[i] == "WEAK");
  CHECK(cls.at("matches_expected").get<bool>());
  CHECK(cls.at("pairing_residuals")[3].get<double>() ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cls.at("orthogonality").get<double>() == 0.0);
  CHECK(cls.at("equivalence_holds").get<bool>());
}

TEST_CASE("dynamics scenario reports fits without a classification block") {
  njson report = run_parsed("bates");
  CHECK(report.at("classification").is_null());
  REQUIRE(report.at("checks").size() == 4);
  const njson& fit = report.at("checks")[2];
  CHECK(fit.at("op").get<std::string>() == "integral_fit");
  CHECK(fit.at("max_residual").get<double>() <= 1e-6);
  const njson& metric = report.at("checks")[3];
  CHECK(metric.at("op").get<std::string>() == "metric_fit");
  CHECK(metric.at("bound").get<std::string>() == "lower");
  CHECK(metric.at("max_residual").get<double>() > 0.01);
}

TEST_CASE("tolerance override rewrites every check and the classification") {
  RunOptions opts;
  opts.tolerance = 1.0;
  const BuiltinScenario* b = find_builtin("subgeodesic_rigidity");
  REQUIRE(b != nullptr);
  RunOutcome out = run_scenario_text(b->text, opts);
  // The residual of 0.5 clears the loosened gate and the classification
  // collapses to FORMAL at tolerance 1, so the run passes end to end.
  CHECK(out.exit_code == 0);
  njson report = njson::parse(out.report);
  CHECK(report.at("options").at("tolerance").get<double>() == 1.0);
  CHECK(report.at("checks")[0].at("tolerance").get<double>() == 1.0);
  CHECK(report.at("classification").at("verdict").get<std::string>() ==
        "FORMAL");
  CHECK(report.at("classification").at("expected").is_null());
}

TEST_CASE("sample and seed overrides rethread chart sampling") {
  RunOptions opts;
  opts.samples = 8;
  opts.seed = 5;
  njson report = run_parsed("conformal_r2", opts);
  CHECK(report.at("options").at("samples").get<int>() == 8);
  CHECK(report.at("options").at("seed").get<int>() == 5);
  CHECK(report.at("checks")[0].at("samples").get<int>() == 8);
  CHECK(report.at("checks")[0].at("max_residual").get<double>() <= 1e-6);
}

TEST_CASE("malformed documents raise configuration errors") {
  CHECK_THROWS_AS(run_scenario_text("{not json"), ConfigError);
  CHECK_THROWS_WITH_AS(
      run_scenario_text(
          R"({"name": "x", "kind": "chart", "anchor": "a", "checks": []})"),
      doctest::Contains("missing required field 'chart'"), ConfigError);
  CHECK_THROWS_WITH_AS(run_scenario_text(R"({"name": "x", "kind": "wedge",
                                             "anchor": "a"})"),
                       doctest::Contains("'kind'"), ConfigError);
  // Wrong-typed fields are reported as configuration problems, not as foreign
  // library exceptions.
  CHECK_THROWS_AS(
      run_scenario_text(
          R"({"name": 3, "kind": "chart", "anchor": "a", "chart": {}})"),
      ConfigError);
  const std::string bad_op = R"({
    "name": "x", "kind": "lie_algebra", "anchor": "a",
    "algebra": {"dim": 2, "brackets": []},
    "checks": [{"op": "no_such_op", "anchor": "a", "tolerance": 1.0}]
  })";
  CHECK_THROWS_WITH_AS(run_scenario_text(bad_op),
                       doctest::Contains("not recognized"), ConfigError);
}

TEST_CASE("evaluation failures keep the report and exit with code 3") {
  const std::string doc = R"({
    "name": "sick_metric", "kind": "chart", "anchor": "a",
    "chart": {"dim": 2, "bounds": [[0.2, 1.0], [0.2, 1.0]], "samples": 8,
              "seed": 0},
    "metric": [[-1, 0], [0, 1]],
    "recipe": {"type": "conformal", "u": "x1"},
    "checks": [
      {"op": "route_equivalence", "anchor": "a", "tolerance": 1e-6}
    ]
  })";
  RunOutcome out = run_scenario_text(doc);
  CHECK(out.exit_code == 3);
  njson report = njson::parse(out.report);
  CHECK(report.at("verdict").at("exit_code").get<int>() == 3);
  REQUIRE(report.at("diagnostics").size() == 1);
  CHECK_FALSE(report.at("diagnostics")[0].get<std::string>().empty());
  CHECK(report.at("checks").empty());
}

TEST_CASE("external documents run through the same pipeline as builtins") {
  const std::string doc = R"({
    "name": "custom_subgeodesic", "kind": "chart", "anchor": "local",
    "chart": {"dim": 3, "bounds": [[0.2, 1.0], [0.2, 1.0], [0.2, 1.0]],
              "samples": 16, "seed": 2},
    "metric": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    "recipe": {"type": "subgeodesic", "theta": [0.2, "0.1*x2", 0.05]},
    "checks": [
      {"op": "residual_2_2", "anchor": "local", "tolerance": 1e-10}
    ],
    "classification": {"anchor": "local", "tolerance": 1e-8,
                       "expect": "FORMAL", "verdicted": true}
  })";
  RunOutcome out = run_scenario_text(doc);
  CHECK(out.exit_code == 0);
  njson report = njson::parse(out.report);
  CHECK(report.at("classification").at("verdict").get<std::string>() ==
        "FORMAL");
  CHECK(report.at("checks")[0].at("max_residual").get<double>() <= 1e-10);
}

TEST_CASE("informational checks never flip the verdict") {
  // golab_r2 carries a lower-bound informational check whose value is far from
  // zero; the run still exits 0 because only verdicted checks gate.
  njson report = run_parsed("golab_r2");
  CHECK(report.at("verdict").at("exit_code").get<int>() == 0);
  bool saw_informational = false;
  for (const auto& c : report.at("checks")) {
    if (!c.at("verdicted").get<bool>()) saw_informational = true;
  }
  CHECK(saw_informational);
  CHECK(report.at("classification").at("verdict").get<std::string>() ==
        "NONE");
  CHECK(report.at("classification").at("expected").is_null());
}

TEST_CASE("skipped checks say why they were skipped") {
  njson report = run_parsed("lck_r4");
  bool found = false;
  for (const auto& c : report.at("checks")) {
    if (c.at("op").get<std::string>() == "residual_3_24") {
      found = true;
      CHECK(c.at("samples").get<int>() == 0);
      CHECK(c.at("note").get<std::string>() ==
            "skipped: scenario supplies no dstar_omega one-form");
      CHECK(c.at("pass").get<bool>());
    }
  }
  CHECK(found);
  CHECK(report.at("classification").at("verdict").get<std::string>() ==
        "WEAK");
}
