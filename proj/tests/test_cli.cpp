#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hopnet/error.hpp"
#include "runner.hpp"
#include "scenario.hpp"

using namespace hopnet;
using namespace hopnet::cli;

namespace {

Json decay_doc() {
    return Json::parse(R"({
        "name": "decay",
        "network": {"n": 1, "C": [1.0], "R": [1.0], "lambda": [1.0], "T": [[0.0]]},
        "initial": {"q": [1.0]},
        "integrator": {"t_end": 1.0, "output_interval": 0.1, "equilibrium_tol": 0},
        "seed": 7})");
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hopnet_test_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::filesystem::path write_config(const std::filesystem::path& dir, const std::string& text) {
    const auto p = dir / "scenario.json";
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("operation names") {
    for (Op op : kAllOps) CHECK(op_from_name(op_name(op)) == op);
    CHECK(op_from_name("lambda-sweep") == Op::lambda_sweep);
    CHECK(!op_from_name("anneal"));
}

TEST_CASE("scenario defaults") {
    const auto sc = parse_scenario(decay_doc());
    REQUIRE(sc.analyses.size() == 1);
    CHECK(sc.analyses.front().op == Op::simulate);
    CHECK(sc.initial_q == Vector{1.0});
    CHECK(sc.seed == 7);
    CHECK(sc.input().is_constant());
    CHECK(sc.constant_current() == Vector{0.0});
}

TEST_CASE("scenario validation errors") {
    auto bad = [](auto mutate) {
        auto doc = decay_doc();
        mutate(doc);
        return doc;
    };
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) { d["colour"] = "red"; })), ValidationError);
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) { d["network"].erase("R"); })), ValidationError);
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) { d["integrator"]["method"] = "rk4";
                        d["integrator"]["dt"] = -1.0; })), ValidationError);
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) { d["integrator"]["method"] = "euler"; })), ValidationError);
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) { d["initial"] = {{"V", {1.0}}}; })), ValidationError);
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) { d["initial"] = {{"q", {1.0, 2.0}}}; })), ValidationError);
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) { d["input"] = {{"constant", {1.0, 2.0}}}; })), ValidationError);
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) {
                        d["analyses"] = Json::parse(R"([{"op": "simulate"}, {"op": "simulate"}])");
                    })),
                    ValidationError);
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) { d["analyses"] = Json::parse(R"([{"op": "anneal"}])"); })),
                    ValidationError);
    CHECK_THROWS_AS(
        parse_scenario(bad([](Json& d) { d["analyses"] = Json::parse(R"([{"op": "passivity", "radius": 0}])"); })),
        ValidationError);
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) {
                        d["input"] = Json::parse(R"({"sinusoid": {"amplitude": [1], "omega": 1}})");
                        d["analyses"] = Json::parse(R"([{"op": "equilibria"}])");
                    })),
                    ValidationError);
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) {
                        d["analyses"] = Json::parse(R"([{"op": "memory", "patterns": [[1, 0, 1]]}])");
                    })),
                    ValidationError);
    CHECK_THROWS_AS(parse_scenario(bad([](Json& d) { d["analyses"] = Json::parse(R"([{"op": "interconnect"}])"); })),
                    ValidationError);
}

TEST_CASE("execute simulate on the decay scenario") {
    const auto sc = parse_scenario(decay_doc());
    const auto res = execute(sc, {});
    REQUIRE(res.trajectory);
    CHECK(res.trajectory->samples.size() == 11);
    CHECK(std::abs(res.trajectory->back().q[0] - std::exp(-1.0)) < 1e-6);
    CHECK(res.violations.empty());
    const auto& sim = res.report["operations"]["simulate"];
    CHECK(sim["termination"] == "horizon");
    CHECK(res.report["name"] == "decay");
    CHECK(res.report["seed"] == 7);
}

TEST_CASE("single operation with defaults") {
    auto doc = decay_doc();
    doc["network"]["T"] = Json::parse("[[2.0]]");
    const auto sc = parse_scenario(doc);
    RunOptions opts;
    opts.only = Op::passivity;
    const auto res = execute(sc, opts);
    CHECK(res.report["operations"]["passivity"]["mode"] == "falsified");
    CHECK(!res.report["operations"].contains("simulate"));
    CHECK(!res.trajectory);
}

TEST_CASE("seed override changes the report seed only") {
    const auto sc = parse_scenario(decay_doc());
    RunOptions opts;
    opts.seed = 99;
    CHECK(execute(sc, opts).report["seed"] == 99);
}

TEST_CASE("violations surface in the report") {
    auto doc = decay_doc();
    doc["integrator"]["max_steps"] = 2;
    doc["integrator"].erase("output_interval");
    const auto res = execute(parse_scenario(doc), {});
    REQUIRE(res.violations.size() == 1);
    CHECK(res.report["violations"].size() == 1);
}

TEST_CASE("run_config exit codes and artifacts") {
    const auto dir = scratch("exit");
    std::ostringstream err;
    RunOptions opts;
    opts.out_dir = dir / "out";

    SECTION("success writes every artifact") {
        const auto cfg = write_config(dir, decay_doc().dump());
        CHECK(run_config(cfg, opts, err) == kExitOk);
        for (const char* f : {"trajectory.csv", "report.json", "manifest.json"})
            CHECK(std::filesystem::exists(dir / "out" / f));
        std::ifstream in(dir / "out" / "manifest.json");
        const auto manifest = Json::parse(in);
        CHECK(manifest["seed"] == 7);
        CHECK(manifest["artifacts"].size() == 3);
        CHECK(manifest["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    }
    SECTION("json trajectory format") {
        opts.format = TrajectoryFormat::json;
        CHECK(run_config(write_config(dir, decay_doc().dump()), opts, err) == kExitOk);
        CHECK(std::filesystem::exists(dir / "out" / "trajectory.json"));
        CHECK(!std::filesystem::exists(dir / "out" / "trajectory.csv"));
    }
    SECTION("malformed JSON") {
        CHECK(run_config(write_config(dir, "{\"network\": "), opts, err) == kExitValidation);
        CHECK(!std::filesystem::exists(dir / "out"));
    }
    SECTION("missing file") {
        CHECK(run_config(dir / "nope.json", opts, err) == kExitValidation);
    }
    SECTION("missing key") {
        auto doc = decay_doc();
        doc["network"].erase("R");
        CHECK(run_config(write_config(dir, doc.dump()), opts, err) == kExitValidation);
        CHECK(err.str().find("'R'") != std::string::npos);
        CHECK(!std::filesystem::exists(dir / "out"));
    }
    SECTION("numerical failure") {
        auto doc = decay_doc();
        doc["integrator"] = Json::parse(R"({"method": "rk45", "t_end": 1.0, "rtol": 1e-14, "atol": 1e-300,
                                            "min_step": 0.5, "dt": 0.6})");
        doc["network"]["T"] = Json::parse("[[0.0]]");
        const int code = run_config(write_config(dir, doc.dump()), opts, err);
        CHECK(code == kExitNumerical);
        CHECK(!std::filesystem::exists(dir / "out"));
    }
    SECTION("strict turns violations into exit 4") {
        auto doc = decay_doc();
        doc["integrator"]["max_steps"] = 2;
        doc["integrator"].erase("output_interval");
        const auto cfg = write_config(dir, doc.dump());
        CHECK(run_config(cfg, opts, err) == kExitOk);
        opts.strict = true;
        CHECK(run_config(cfg, opts, err) == kExitViolation);
        CHECK(std::filesystem::exists(dir / "out" / "report.json"));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("identical inputs give identical reports") {
    const auto sc = parse_scenario(decay_doc());
    CHECK(io::dump(execute(sc, {}).report) == io::dump(execute(sc, {}).report));
    CHECK(config_hash(decay_doc()) == config_hash(decay_doc()));
    auto other = decay_doc();
    other["seed"] = 8;
    CHECK(config_hash(other) != config_hash(decay_doc()));
}
