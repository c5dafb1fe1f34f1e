/**
 * @file scenario.hpp
 * @brief Experiment descriptions (JSON or named preset), batch orchestration
 * and byte-stable artifact output.
 *
 * A scenario is either a U_crit sweep over one axis or a list of simulation
 * runs. Documents are validated against a strict schema: unknown keys,
 * wrong types and invalid values raise SchemaError naming the key path.
 *
 * Document keys (all optional except as noted):
 *
 *   name, description, notes[]
 *   preset            named base scenario; combines only with the override keys
 *                     name, horizon, resolution, tolerances, sample_dt,
 *                     snapshot_times, outputs
 *   config            "C" | "H" | "CF"
 *   free_end          "physical" | "linear"
 *   params            {D, L, beta, U, k0, b1, b2}
 *   initial_data      IC object, or an array of them (one run each)
 *   runs[]            {label, group, config, free_end, params, initial_data, horizon};
 *                     each run starts from the top-level values
 *   horizon, resolution, sample_dt, snapshot_times[], tolerances {rtol, atol}
 *   sweep             {axis, values[] | range {from, to, count, spacing}, configs[],
 *                      u_range [lo, hi], tol, modes}
 *   outputs[]         "trace", "snapshots", "report"
 *   analysis          "none" | "growth" | "energy" | "lco" | "steady" | "dichotomy"
 *                     | "plateau" | "chaos"
 *
 * IC objects: {"kind": "mode", "n"}, {"kind": "polynomial"},
 * {"kind": "elementary", "scale"}, {"kind": "sine", "eps"}, {"kind": "zero"},
 * {"kind": "custom", "w0": [...], "w1": [...]}.
 */
#pragma once

#include "beamflutter/integrator.hpp"
#include "beamflutter/model.hpp"
#include "beamflutter/stability.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace beamflutter {

enum class Analysis { None, Growth, Energy, Lco, Steady, Dichotomy, Plateau, Chaos };

std::string_view to_string(Analysis a);
Analysis analysis_from_string(std::string_view s);

struct SweepSpec {
    SweepAxis axis = SweepAxis::L;
    std::vector<double> values;
    std::vector<Config> configs{Config::C, Config::H, Config::CF};
    std::pair<double, double> u_range{0.0, 1000.0};
    double tol = 1e-6;
    int modes = kDefaultModalTruncation;
};

struct RunSpec {
    std::string label;
    std::string group; ///< runs of one group are compared against each other
    BoundaryConfig config;
    BeamParams params;
    InitialData initial = PolynomialID{};
    double horizon = 1.0;
};

struct Scenario {
    std::string name = "scenario";
    std::string description;
    BeamParams base;                ///< sweep base parameters
    std::optional<SweepSpec> sweep; ///< set for sweep scenarios
    std::vector<RunSpec> runs;      ///< simulation runs otherwise
    int resolution = 0;             ///< 0: default_resolution(L) per run
    IntegrateOptions options;
    std::vector<std::string> outputs{"trace", "report"};
    Analysis analysis = Analysis::None;
    std::vector<std::string> notes; ///< caption/text conflicts and other remarks

    bool is_sweep() const noexcept { return sweep.has_value(); }
};

/// Parses and validates a document. Throws ParseError or SchemaError.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

std::vector<std::string> preset_names();
bool has_preset(std::string_view name);
Scenario load_preset(std::string_view name);
/// The preset's source document.
std::string_view preset_document(std::string_view name);

/// Command-line style overrides applied on top of a loaded scenario.
struct ScenarioOverrides {
    std::optional<int> resolution;
    std::optional<double> rtol;
    std::optional<double> atol;
    std::optional<double> horizon;
};

void apply_overrides(Scenario& s, const ScenarioOverrides& o);

/// Canonical JSON form (input to the manifest and round-trippable through parse_scenario).
std::string scenario_to_json(const Scenario& s);

/// Grid, sampled initial data and options for every run, in order.
std::vector<SimulationCase> expand_runs(const Scenario& s);

struct RunRecord {
    std::string label;
    std::string status; ///< RunStatus name, "ok" for sweep points, or "failed"
    std::string error;
    std::vector<std::string> files;
};

struct RunManifest {
    std::string scenario;
    std::string version;
    std::filesystem::path out_dir;
    std::vector<std::string> files; ///< relative to out_dir, in write order
    std::vector<RunRecord> runs;
    std::vector<std::string> notes;
    double wall_seconds = 0.0;
    int parallelism = 1;

    int failed() const;
    bool all_failed() const { return !runs.empty() && failed() == static_cast<int>(runs.size()); }
};

/// Executes the scenario, writes its artifacts and manifest.json into out_dir
/// (created if needed). Per-run failures are recorded, not thrown.
RunManifest run_scenario(const Scenario& s, const std::filesystem::path& out_dir, int parallelism = 1);

std::string_view library_version();

} // namespace beamflutter
