#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "amencert/cli.hpp"
#include "amencert/errors.hpp"

using namespace amencert;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = AMENCERT_FIXTURES;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_tool(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (kFixtures / name).string(); }

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("amencert_test_" + name);
  fs::remove_all(p);
  return p;
}

constexpr const char* kMinimal = R"({
  "group": {"family": "free", "rank": 2},
  "grid": 256,
  "action": {"generators": [{"kind": "rotation", "theta": 0.25}, {"kind": "rotation", "theta": 0.5}]}
})";

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config_text(kMinimal);
  CHECK(cfg.group == free_group(2));
  CHECK(cfg.grid_size == 256);
  CHECK(cfg.lambda1.kind == "exact");
  CHECK(cfg.measure_spec["kind"] == "lebesgue");
  CHECK(cfg.echo["grid"] == 256);
  CHECK(build_action(cfg).by_rotations());
  CHECK(build_measure(cfg).is_lebesgue());
  CHECK(build_comparison(cfg).by_rotations());

  const RunConfig f = parse_config(fixture("f2_sine_certify.json"));
  CHECK(f.seed == 7);
  CHECK(f.sweep_a.size() == 6);
  CHECK(build_action(f).letter(0).kind() == DiffeoKind::SinePerturbed);
}

TEST_CASE("schema errors carry JSON pointers") {
  CHECK(error_of(R"({"grid": 256})").find("config /group: missing required field") != std::string::npos);
  CHECK(error_of(R"({"group": {"family": "free", "rank": 2}, "grid": 100})").find("config /grid:") !=
        std::string::npos);
  CHECK(error_of(R"({"group": {"family": "free", "rank": 2}, "gird": 64})").find("/gird") != std::string::npos);
  CHECK(error_of(R"({"group": {"family": "free", "rank": "two"}})").find("/group/rank") != std::string::npos);
  CHECK(error_of(R"({"group": {"family": "free", "rank": 2}, "grid": 64,
                    "action": {"generators": [{"kind": "rotation", "theta": 0.1},
                                              {"kind": "sine", "theta": 0.1, "a": 1.5}]}})")
            .find("/action/generators/1") != std::string::npos);
  CHECK(error_of(R"({"group": {"family": "free", "rank": 2}, "grid": 64,
                    "measure": {"kind": "density", "values": [1, 2]}})")
            .find("/measure") != std::string::npos);
  CHECK(error_of(R"({"group": {"family": "free", "rank": 2}, "arc": {"start": 0.1, "length": 0}})")
            .find("/arc/length") != std::string::npos);
  CHECK(error_of(R"({"group": {"family": "free", "rank": 2}, "sweep": {"a": [0.1, "x"]}})")
            .find("/sweep/a/1") != std::string::npos);
  CHECK(error_of(R"({"group": {"family": "free", "rank": 2}, "seed": -3})").find("/seed") != std::string::npos);
  CHECK(error_of(R"({"group": {"family": "free", "rank": 2}, "lambda1": {"kind": "guess"}})")
            .find("/lambda1") != std::string::npos);
  CHECK(error_of("{\"group\": ").find("malformed JSON") != std::string::npos);
  CHECK_THROWS_AS(parse_config(kFixtures / "does_not_exist.json"), InputError);
}

TEST_CASE("group arguments") {
  CHECK(parse_group_arg("F2") == free_group(2));
  CHECK(parse_group_arg("Z3") == free_abelian_group(3));
  CHECK(parse_group_arg("free:4") == free_group(4));
  CHECK(parse_group_arg(R"({"family": "free_abelian", "rank": 2})") == free_abelian_group(2));
  CHECK_THROWS_AS(parse_group_arg("G2"), InputError);
  CHECK_THROWS_AS(parse_group_arg("F2x"), InputError);
  CHECK(group_from_json(group_to_json(free_abelian_group(3))) == free_abelian_group(3));
}

TEST_CASE("witness values round-trip through JSON") {
  const GroupSpec z2 = free_abelian_group(2);
  const ModuleVector xi = build_folner_witness(z2, 3, 8);
  const ModuleVector back = module_vector_from_json(module_vector_to_json(xi), z2, 8);
  CHECK(back.support() == xi.support());
  CHECK(max_abs_difference(back, xi) == 0.0);
  CHECK_THROWS_AS(module_vector_from_json(Json::object(), z2, 8), InputError);
  CHECK_THROWS_AS(module_vector_from_json(Json{{"a", {1.0, 2.0}}}, z2, 8), InputError);
  CHECK_THROWS_AS(module_vector_from_json(Json{{"q", std::vector<double>(8, 1.0)}}, z2, 8), InputError);
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(cli::format_number(0.1) == "0.1");
  CHECK(cli::format_number(6.25e-4) == "0.000625");
  CHECK(std::stod(cli::format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("exit codes") {
  const RunResult ok = run_tool({"certify", "--config", fixture("f2_rotations_certify.json")});
  CHECK(ok.code == cli::kOk);
  const Json report = Json::parse(ok.out);
  CHECK(report["verdict"] == "certified_not_amenable");
  CHECK(report["avg_h_sq"] == 0.0);
  CHECK(report["provenance"]["tool"] == "amencert");
  CHECK(report["provenance"].contains("tolerances"));
  CHECK(report["provenance"].contains("config"));

  CHECK(run_tool({"certify", "--config", fixture("f2_estimate_certify.json")}).code == cli::kPolicyError);
  CHECK(run_tool({"certify", "--config", fixture("malformed.json")}).code == cli::kInputError);
  CHECK(run_tool({"certify", "--config", fixture("nope.json")}).code == cli::kInputError);
  CHECK(run_tool({"frobnicate"}).code == cli::kInputError);
  CHECK(run_tool({"certify"}).code == cli::kInputError);
  CHECK(run_tool({"lambda1", "--group", "F2", "--exact", "--radius", "3"}).code == cli::kInputError);
  CHECK(run_tool({"lambda1"}).code == cli::kInputError);

  const RunResult l1 = run_tool({"lambda1", "--group", "F2", "--exact"});
  CHECK(l1.code == cli::kOk);
  CHECK(Json::parse(l1.out)["value"].get<double>() == doctest::Approx(0.1339746));
  CHECK(run_tool({"lambda1", "--group", "Z2", "--radius", "3"}).code == cli::kOk);
  CHECK_THROWS_AS(cli::execute("bogus", parse_config_text(kMinimal)), InputError);
}

TEST_CASE("reports and series files") {
  const fs::path dir = scratch_dir("files");
  const RunResult r = run_tool({"certify", "--config", fixture("f2_sine_certify.json"), "--out", dir.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(fs::exists(dir / "certify.json"));
  CHECK(fs::exists(dir / "certify_series.csv"));
  const std::string csv = read_file(dir / "certify_series.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header.find("a") == 0);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 6);

  const RunResult n = run_tool({"near-isometry", "--config", fixture("f2_near_isometry.json"), "--out", dir.string()});
  CHECK(n.code == cli::kOk);
  CHECK(fs::exists(dir / "near_isometry.json"));
  CHECK(fs::exists(dir / "near_isometry_series.csv"));

  const RunResult w = run_tool({"witness", "--config", fixture("z2_folner_replay.json"), "--out", dir.string()});
  CHECK(w.code == cli::kOk);
  const Json wr = Json::parse(read_file(dir / "witness.json"));
  CHECK(wr["exact_defect"]["numerator"] == 1);
  CHECK(wr["exact_defect"]["denominator"] == 10);
  CHECK(fs::exists(dir / "witness_values.json"));
  fs::remove_all(dir);
}

TEST_CASE("identical inputs give byte-identical reports") {
  for (const char* cmd : {"certify", "evidence", "hellinger"}) {
    const char* file = std::string(cmd) == "evidence"    ? "f2_sine_evidence.json"
                       : std::string(cmd) == "hellinger" ? "hellinger_halfstep.json"
                                                         : "f2_sine_certify.json";
    const RunResult a = run_tool({cmd, "--config", fixture(file)});
    const RunResult b = run_tool({cmd, "--config", fixture(file)});
    CHECK(a.code == cli::kOk);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
  }
}

TEST_CASE("ball cap from the environment") {
  ::setenv("AMENCERT_MAX_BALL", "1000", 1);
  CHECK(ball_cap_from_env() == 1000);
  const RunResult capped = run_tool({"lambda1", "--group", "F2", "--radius", "8"});
  CHECK(capped.code == cli::kInputError);
  CHECK(capped.err.find("resource") != std::string::npos);
  ::setenv("AMENCERT_MAX_BALL", "lots", 1);
  CHECK_THROWS_AS(ball_cap_from_env(), InputError);
  ::unsetenv("AMENCERT_MAX_BALL");
  CHECK(ball_cap_from_env() == kDefaultBallCap);
}
