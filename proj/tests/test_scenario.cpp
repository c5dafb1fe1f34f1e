#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "beamflutter/csv.hpp"
#include "beamflutter/errors.hpp"
#include "beamflutter/scenario.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

using namespace beamflutter;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("beamflutter_" + tag + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string schema_path(const std::string& doc) {
    try {
        parse_scenario(doc);
    } catch (const SchemaError& e) {
        return e.key_path();
    }
    return "<accepted>";
}

const char* kSmallRuns = R"({
  "name": "small",
  "config": "CF",
  "params": {"U": 150, "b2": 1},
  "resolution": 40,
  "horizon": 0.3,
  "tolerances": {"rtol": 1e-6, "atol": 1e-8},
  "snapshot_times": [0.1],
  "outputs": ["trace", "snapshots", "report"],
  "initial_data": [{"kind": "polynomial"}, {"kind": "mode", "n": 2}, {"kind": "elementary", "scale": 1}],
  "analysis": "energy"
})";

const char* kSmallSweep = R"({
  "name": "small-sweep",
  "params": {"D": 23.9, "beta": 1.2e-4},
  "sweep": {"axis": "l", "values": [100, 200, 300], "configs": ["C", "H", "CF"]}
})";

} // namespace

TEST_CASE("number formatting round-trips") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(100.0) == "100");
    CHECK(format_number(-2.5e-300) == "-2.5e-300");
    CHECK(format_number(NAN) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(mant(rng), expo(rng));
        const std::string s = format_number(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
}

TEST_CASE("minimal document gets defaults") {
    const Scenario s = parse_scenario("{}");
    CHECK_FALSE(s.is_sweep());
    REQUIRE(s.runs.size() == 1);
    CHECK(s.runs[0].label == "run");
    CHECK(s.runs[0].config == BoundaryConfig::make(Config::C));
    CHECK(s.runs[0].params == BeamParams{});
    CHECK(std::holds_alternative<PolynomialID>(s.runs[0].initial));
    CHECK(s.runs[0].horizon == 1.0);
    CHECK(s.resolution == 0);
    CHECK(s.options.rtol == IntegrateOptions{}.rtol);
    CHECK(s.outputs == std::vector<std::string>{"trace", "report"});
    CHECK(s.analysis == Analysis::None);
}

TEST_CASE("strict schema names the offending key") {
    CHECK(schema_path(R"({"alpha2": 0})") == "alpha2");
    CHECK(schema_path(R"({"params": {"alpha2": 0}})") == "params.alpha2");
    CHECK(schema_path(R"({"params": {"U": "fast"}})") == "params.U");
    CHECK(schema_path(R"({"runs": [{}, {"initial_data": {"kind": "mode", "n": "two"}}]})") == "runs[1].initial_data.n");
    CHECK(schema_path(R"({"runs": [{}, {"initial_data": {"kind": "mode"}}]})") == "runs[1].initial_data.n");
    CHECK(schema_path(R"({"initial_data": {"kind": "mode", "n": 11}})") == "initial_data.n");
    CHECK(schema_path(R"({"initial_data": {"kind": "wave"}})") == "initial_data.kind");
    CHECK(schema_path(R"({"initial_data": [{"kind": "sine", "eps": 0.1, "phase": 1}]})") == "initial_data[0].phase");
    CHECK(schema_path(R"({"runs": [{"label": "a"}, {"label": "a"}]})") == "runs[1].label");
    CHECK(schema_path(R"({"runs": [{"label": "a/b"}]})") == "runs[0].label");
    CHECK(schema_path(R"({"config": "X"})") == "config");
    CHECK(schema_path(R"({"horizon": 0})") == "horizon");
    CHECK(schema_path(R"({"resolution": 8})") == "resolution");
    CHECK(schema_path(R"({"resolution": 64.5})") == "resolution");
    CHECK(schema_path(R"({"tolerances": {"rtol": -1}})") == "tolerances.rtol");
    CHECK(schema_path(R"({"outputs": ["trace", "movie"]})") == "outputs[1]");
    CHECK(schema_path(R"({"analysis": "magic"})") == "analysis");
    CHECK(schema_path(R"({"params": {"k0": -2}})") == "params.k0");
    CHECK(schema_path(R"({"runs": [{"params": {"L": -1}}]})") == "runs[0].params.L");
    CHECK(schema_path(R"([1, 2])") == "$");

    CHECK(schema_path(R"({"sweep": {"axis": "U", "values": [1]}})") == "sweep.axis");
    CHECK(schema_path(R"({"sweep": {"axis": "l"}})") == "sweep.values");
    CHECK(schema_path(R"({"sweep": {"axis": "l", "values": [1], "range": {"from": 1, "to": 2, "count": 2}}})") ==
          "sweep.values");
    CHECK(schema_path(R"({"sweep": {"axis": "beta", "range": {"from": 0, "to": 1, "count": 3, "spacing": "log"}}})") ==
          "sweep.range.from");
    CHECK(schema_path(R"({"sweep": {"axis": "l", "values": [1], "u_range": [5, 1]}})") == "sweep.u_range");
    CHECK(schema_path(R"({"sweep": {"axis": "l", "values": [1]}, "runs": [{}]})") == "runs");

    CHECK(schema_path(R"({"preset": "no-such-preset"})") == "preset");
    CHECK(schema_path(R"({"preset": "chaos-h", "params": {"U": 1}})") == "params");
    CHECK(schema_path(R"({"preset": "chaos-h", "alpha2": 1})") == "alpha2");
    CHECK(schema_path(R"({"preset": "fig1-sweep", "horizon": 3})") == "horizon");

    CHECK_THROWS_AS(parse_scenario("{\"name\": "), ParseError);
    CHECK_THROWS_AS(parse_scenario(""), ParseError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ParseError);
}

TEST_CASE("documents fill runs from the top level") {
    const Scenario s = parse_scenario(R"({
      "config": "CF", "free_end": "linear",
      "params": {"U": 10, "b2": 1},
      "horizon": 2,
      "runs": [
        {"label": "a"},
        {"label": "b", "params": {"U": 20}, "horizon": 3, "initial_data": {"kind": "sine", "eps": 0.5}},
        {"label": "c", "config": "H"}
      ]
    })");
    REQUIRE(s.runs.size() == 3);
    CHECK(s.runs[0].config == BoundaryConfig::make(Config::CF, FreeEnd::LinearNonPhysical));
    CHECK(s.runs[0].params.U == 10.0);
    CHECK(s.runs[0].horizon == 2.0);
    CHECK(s.runs[1].params.U == 20.0);
    CHECK(s.runs[1].params.b2 == 1.0);
    CHECK(s.runs[1].horizon == 3.0);
    CHECK(s.runs[1].initial == InitialData{SineID{0.5}});
    CHECK(s.runs[2].config == BoundaryConfig::make(Config::H));

    const Scenario sw = parse_scenario(
        R"({"sweep": {"axis": "beta", "range": {"from": 1e-5, "to": 1e-3, "count": 3, "spacing": "log"}}})");
    REQUIRE(sw.is_sweep());
    REQUIRE(sw.sweep->values.size() == 3);
    CHECK(sw.sweep->values[0] == 1e-5);
    CHECK(sw.sweep->values[1] == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(sw.sweep->values[2] == 1e-3);
    CHECK(sw.sweep->configs.size() == 3);
}

TEST_CASE("preset reference expands to the registry entry") {
    const Scenario direct = load_preset("fig1-sweep");
    const Scenario ref = parse_scenario(R"({"preset": "fig1-sweep"})");
    CHECK(scenario_to_json(ref) == scenario_to_json(direct));
    REQUIRE(direct.is_sweep());
    CHECK(direct.sweep->axis == SweepAxis::L);
    CHECK(direct.sweep->values.size() == 41);
    CHECK(direct.sweep->values.front() == 100.0);
    CHECK(direct.sweep->values[1] == 110.0);
    CHECK(direct.sweep->values.back() == 500.0);
    CHECK(direct.base.D == 23.9);
    CHECK(direct.base.beta == 1.2e-4);

    const Scenario over = parse_scenario(R"({"preset": "chaos-h", "name": "short", "horizon": 2, "resolution": 64})");
    CHECK(over.name == "short");
    CHECK(over.resolution == 64);
    for (const auto& r : over.runs) CHECK(r.horizon == 2.0);
}

TEST_CASE("every preset validates and round-trips") {
    const auto names = preset_names();
    CHECK(names.size() == 13);
    for (const auto& n : names) {
        CAPTURE(n);
        const Scenario s = load_preset(n);
        CHECK(s.name == n);
        CHECK(!s.description.empty());
        CHECK(s.is_sweep() != !s.runs.empty());
        for (const auto& r : s.runs) CHECK(validate_params(r.params, r.config).ok());
        const std::string text = scenario_to_json(s);
        CHECK(scenario_to_json(parse_scenario(text)) == text);
    }
    CHECK_FALSE(has_preset("fig99"));
    CHECK_THROWS_AS(load_preset("fig99"), InvalidParams);
}

TEST_CASE("preset constants follow the figure captions") {
    const Scenario chaos = load_preset("chaos-h");
    REQUIRE(chaos.runs.size() == 4);
    const double eps[] = {0.0, 0.1, 0.01, 0.001};
    for (std::size_t i = 0; i < 4; ++i) {
        const RunSpec& r = chaos.runs[i];
        CHECK(r.config.kind == Config::H);
        CHECK(r.params.U == 200.0);
        CHECK(r.params.b1 == 2000.0);
        CHECK(r.params.b2 == 1.0);
        CHECK(r.params.k0 == 1.0);
        CHECK(r.params.beta == 1.0);
        CHECK(r.initial == InitialData{SineID{eps[i]}});
    }

    const Scenario blow = load_preset("blowup-cf");
    REQUIRE(blow.runs.size() == 4);
    CHECK(blow.runs[0].config == BoundaryConfig::make(Config::CF, FreeEnd::LinearNonPhysical));
    CHECK(blow.runs[0].initial == InitialData{ElementaryIV{12.0}});
    CHECK(blow.runs[1].initial == InitialData{ElementaryIV{13.0}});
    CHECK(blow.runs[2].config == BoundaryConfig::make(Config::CF, FreeEnd::PhysicalNonlinear));
    for (const auto& r : blow.runs) {
        CHECK(r.params.beta == 0.0);
        CHECK(r.params.b2 == 1.0);
        CHECK(r.params.U == 0.0);
    }

    // caption values where caption and text disagree
    const Scenario ns = load_preset("nonsimple-lco");
    REQUIRE(ns.runs.size() == 1);
    CHECK(ns.runs[0].params.U == 5000.0);
    CHECK(ns.runs[0].params.b1 == 5000.0);
    CHECK(ns.runs[0].params.b2 == 5000.0);
    CHECK(ns.runs[0].params.k() == 101.0);
    CHECK(!ns.notes.empty());
    const Scenario damp = load_preset("damping-lco-C");
    for (const auto& r : damp.runs) {
        CHECK(r.params.b1 == 20.0);
        CHECK(r.params.U == 5000.0);
    }
    CHECK(!damp.notes.empty());

    const Scenario lco = load_preset("lco-cf");
    int flutter = 0;
    for (const auto& r : lco.runs)
        if (r.group == "flutter") {
            ++flutter;
            CHECK(r.params.U == 150.0);
            CHECK(r.params.k0 == 0.0);
            CHECK(r.params.b2 == 1.0);
        }
    CHECK(flutter == 3);

    const Scenario buckle = load_preset("buckle-C");
    REQUIRE(buckle.runs.size() == 5);
    const double ks[] = {1, 2, 4, 1, 2};
    const double b1s[] = {50, 50, 50, 100, 100};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(buckle.runs[i].params.k() == ks[i]);
        CHECK(buckle.runs[i].params.b1 == b1s[i]);
        CHECK(buckle.runs[i].params.U == 100.0);
    }

    const Scenario fig4 = load_preset("fig4-ic-battery");
    REQUIRE(fig4.runs.size() == 4);
    CHECK(fig4.runs[0].params.L == 300.0);
    CHECK(fig4.runs[0].params.U == 5.0);
    CHECK(fig4.runs[0].config.kind == Config::H);
}

TEST_CASE("overrides") {
    Scenario s = load_preset("b2-plateau");
    apply_overrides(s, {64, 1e-5, 1e-7, 0.5});
    CHECK(s.resolution == 64);
    CHECK(s.options.rtol == 1e-5);
    CHECK(s.options.atol == 1e-7);
    for (const auto& r : s.runs) CHECK(r.horizon == 0.5);
    CHECK_THROWS_AS(apply_overrides(s, {8, {}, {}, {}}), InvalidResolution);

    const auto cases = expand_runs(s);
    REQUIRE(cases.size() == 4);
    CHECK(cases[0].grid.M == 64);
    CHECK(cases[3].params.b2 == 4.0);
}

TEST_CASE("simulation outputs are byte-identical across runs and parallelism") {
    const Scenario s = parse_scenario(kSmallRuns);
    TempDir a("det_a"), b("det_b");
    const RunManifest ma = run_scenario(s, a.path, 1);
    const RunManifest mb = run_scenario(s, b.path, 4);
    REQUIRE(ma.files.size() == 7);
    CHECK(ma.files == mb.files);
    CHECK(ma.failed() == 0);
    for (const auto& f : ma.files) {
        CAPTURE(f);
        CHECK(slurp(a.path / f) == slurp(b.path / f));
    }
    const std::string trace = slurp(a.path / "ic0.csv");
    CHECK(trace.rfind("t,observable,E,Pi,scriptE,Ehat\n", 0) == 0);
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 2002);
    const std::string snaps = slurp(a.path / "ic1_snapshots.csv");
    CHECK(std::count(snaps.begin(), snaps.end(), '\n') == 1 + 2 * 40);

    const auto manifest = nlohmann::json::parse(slurp(a.path / "manifest.json"));
    CHECK(manifest["scenario"] == "small");
    CHECK(manifest["version"] == std::string(library_version()));
    CHECK(manifest["parameters"]["runs"].size() == 3);
    CHECK(manifest["runs"][1]["status"] == "completed");
    CHECK(manifest["wall_seconds"].get<double>() >= 0.0);
    CHECK(manifest["failed"] == 0);
    const auto report = nlohmann::json::parse(slurp(a.path / "report.json"));
    CHECK(report["runs"].size() == 3);
    CHECK(report["runs"][0].contains("late_plateau"));
}

TEST_CASE("sweep results do not depend on parallelism") {
    const Scenario s = parse_scenario(kSmallSweep);
    TempDir a("sweep_a"), b("sweep_b");
    const RunManifest ma = run_scenario(s, a.path, 1);
    run_scenario(s, b.path, 6);
    CHECK(slurp(a.path / "ucrit.csv") == slurp(b.path / "ucrit.csv"));
    CHECK(ma.runs.size() == 9);
    CHECK(ma.failed() == 0);
    const std::string csv = slurp(a.path / "ucrit.csv");
    CHECK(csv.rfind("config,L,u_crit,omega_crit,bracket_lo,bracket_hi,status\n", 0) == 0);
    const auto report = nlohmann::json::parse(slurp(a.path / "report.json"));
    for (const auto& o : report["ordering"]) CHECK(o["order"] == "CF < H < C");
}

TEST_CASE("failures are recorded, not thrown") {
    Scenario s = parse_scenario(R"({"runs": [{"label": "good"}, {"label": "bad"}], "resolution": 32, "horizon": 0.05})");
    s.runs[1].params.k0 = -5.0; // bypasses load-time validation
    TempDir d("fail");
    const RunManifest m = run_scenario(s, d.path, 2);
    REQUIRE(m.runs.size() == 2);
    CHECK(m.runs[0].status == "completed");
    CHECK(m.runs[1].status == "failed");
    CHECK(!m.runs[1].error.empty());
    CHECK(m.failed() == 1);
    CHECK_FALSE(m.all_failed());
    CHECK(fs::exists(d.path / "manifest.json"));

    // no onset below U = 1 anywhere
    const Scenario none = parse_scenario(R"({"sweep": {"axis": "l", "values": [1, 2], "configs": ["C"], "u_range": [0, 1]}})");
    TempDir e("fail_sweep");
    const RunManifest mn = run_scenario(none, e.path, 1);
    CHECK(mn.all_failed());
    CHECK(slurp(e.path / "ucrit.csv").find(",,,,failed") != std::string::npos);
}
