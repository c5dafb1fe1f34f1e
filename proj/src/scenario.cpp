#include "beamflutter/scenario.hpp"

#include "beamflutter/csv.hpp"
#include "beamflutter/diagnostics.hpp"
#include "beamflutter/errors.hpp"
#include "beamflutter/modes.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>

#ifndef BEAMFLUTTER_VERSION
#define BEAMFLUTTER_VERSION "0.0.0"
#endif

namespace beamflutter {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string_view library_version() { return BEAMFLUTTER_VERSION; }

namespace {

constexpr std::pair<Analysis, std::string_view> kAnalysisNames[] = {
    {Analysis::None, "none"},           {Analysis::Growth, "growth"}, {Analysis::Energy, "energy"},
    {Analysis::Lco, "lco"},             {Analysis::Steady, "steady"}, {Analysis::Dichotomy, "dichotomy"},
    {Analysis::Plateau, "plateau"},     {Analysis::Chaos, "chaos"},
};

const std::set<std::string> kOutputs{"trace", "snapshots", "report"};

} // namespace

std::string_view to_string(Analysis a) {
    for (const auto& [k, v] : kAnalysisNames)
        if (k == a) return v;
    return "?";
}

Analysis analysis_from_string(std::string_view s) {
    for (const auto& [k, v] : kAnalysisNames)
        if (v == s) return k;
    throw InvalidParams("unknown analysis '" + std::string(s) + "'");
}

int RunManifest::failed() const {
    return static_cast<int>(std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return r.status == "failed"; }));
}

// ---------------------------------------------------------------------------
// Strict schema

namespace {

std::string child(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::string where(const std::string& path) { return path.empty() ? "$" : path; }

void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw SchemaError(where(path), "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw SchemaError(child(path, it.key()), "unknown key");
}

const json* find(const json& obj, std::string_view key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw SchemaError(path, "must be finite");
    return v;
}

double as_positive(const json& j, const std::string& path) {
    const double v = as_number(j, path);
    if (!(v > 0.0)) throw SchemaError(path, "must be positive");
    return v;
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    const auto v = j.get<long long>();
    if (v < -1'000'000'000LL || v > 1'000'000'000LL) throw SchemaError(path, "out of range");
    return static_cast<int>(v);
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array");
    return j;
}

std::vector<double> number_list(const json& j, const std::string& path) {
    std::vector<double> out;
    for (std::size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_number(j[i], item(path, i)));
    return out;
}

template <class F>
auto convert(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const InvalidParams& e) {
        throw SchemaError(path, e.what());
    }
}

bool file_safe(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-' || c == '=';
    });
}

void parse_params(const json& j, const std::string& path, BeamParams& p) {
    check_keys(j, path, {"D", "L", "beta", "U", "k0", "b1", "b2"});
    const std::pair<std::string_view, double BeamParams::*> fields[] = {
        {"D", &BeamParams::D},   {"L", &BeamParams::L},   {"beta", &BeamParams::beta}, {"U", &BeamParams::U},
        {"k0", &BeamParams::k0}, {"b1", &BeamParams::b1}, {"b2", &BeamParams::b2},
    };
    for (const auto& [key, member] : fields)
        if (const json* v = find(j, key)) p.*member = as_number(*v, child(path, key));
}

InitialData parse_ic(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    const json* kind_j = find(j, "kind");
    if (!kind_j) throw SchemaError(child(path, "kind"), "missing");
    const std::string kind = as_string(*kind_j, child(path, "kind"));
    if (kind == "mode") {
        check_keys(j, path, {"kind", "n"});
        const json* n = find(j, "n");
        if (!n) throw SchemaError(child(path, "n"), "missing");
        const int v = as_int(*n, child(path, "n"));
        if (v < 1 || v > kMaxClampedModes) throw SchemaError(child(path, "n"), "must be in [1, 10]");
        return ModeID{v};
    }
    if (kind == "polynomial") {
        check_keys(j, path, {"kind"});
        return PolynomialID{};
    }
    if (kind == "zero") {
        check_keys(j, path, {"kind"});
        return ZeroID{};
    }
    if (kind == "elementary") {
        check_keys(j, path, {"kind", "scale"});
        ElementaryIV e;
        if (const json* v = find(j, "scale")) e.scale = as_number(*v, child(path, "scale"));
        return e;
    }
    if (kind == "sine") {
        check_keys(j, path, {"kind", "eps"});
        SineID s;
        if (const json* v = find(j, "eps")) s.eps = as_number(*v, child(path, "eps"));
        return s;
    }
    if (kind == "custom") {
        check_keys(j, path, {"kind", "w0", "w1"});
        CustomID c;
        if (const json* v = find(j, "w0")) c.w0 = number_list(*v, child(path, "w0"));
        if (const json* v = find(j, "w1")) c.w1 = number_list(*v, child(path, "w1"));
        if (c.w0.size() == 1) throw SchemaError(child(path, "w0"), "needs at least 2 points");
        if (c.w1.size() == 1) throw SchemaError(child(path, "w1"), "needs at least 2 points");
        return c;
    }
    throw SchemaError(child(path, "kind"), "unknown initial data kind '" + kind + "'");
}

json ic_to_json(const InitialData& data) {
    return std::visit(
        [](const auto& d) -> json {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ModeID>) return {{"kind", "mode"}, {"n", d.n}};
            else if constexpr (std::is_same_v<T, PolynomialID>) return {{"kind", "polynomial"}};
            else if constexpr (std::is_same_v<T, ElementaryIV>) return {{"kind", "elementary"}, {"scale", d.scale}};
            else if constexpr (std::is_same_v<T, SineID>) return {{"kind", "sine"}, {"eps", d.eps}};
            else if constexpr (std::is_same_v<T, ZeroID>) return {{"kind", "zero"}};
            else return {{"kind", "custom"}, {"w0", d.w0}, {"w1", d.w1}};
        },
        data);
}

json params_to_json(const BeamParams& p) {
    return {{"D", p.D}, {"L", p.L}, {"beta", p.beta}, {"U", p.U}, {"k0", p.k0}, {"b1", p.b1}, {"b2", p.b2}};
}

BoundaryConfig parse_config(const json& obj, const std::string& path, BoundaryConfig base) {
    Config kind = base.kind;
    FreeEnd fe = base.cf_free_end;
    if (const json* c = find(obj, "config"))
        kind = convert(child(path, "config"), [&] { return config_from_string(as_string(*c, child(path, "config"))); });
    if (const json* f = find(obj, "free_end"))
        fe = convert(child(path, "free_end"),
                     [&] { return free_end_from_string(as_string(*f, child(path, "free_end"))); });
    return BoundaryConfig::make(kind, fe);
}

// violation field names are lower case; document keys follow the model symbols
std::string document_key(const std::string& field) {
    if (field == "d") return "D";
    if (field == "l") return "L";
    if (field == "u") return "U";
    return field;
}

void validate_run(const RunSpec& r, const std::string& path) {
    const ValidationReport rep = validate_params(r.params, r.config);
    if (!rep.ok()) {
        const auto& v = rep.violations.front();
        throw SchemaError(child(child(path, "params"), document_key(v.field)), v.rule);
    }
}

/// Keys that may accompany "preset"; also parsed for full documents.
void parse_common(const json& root, Scenario& s) {
    if (const json* v = find(root, "name")) {
        s.name = as_string(*v, "name");
        if (!file_safe(s.name)) throw SchemaError("name", "use letters, digits and . _ - = only");
    }
    if (const json* v = find(root, "resolution")) {
        s.resolution = as_int(*v, "resolution");
        if (s.resolution < kMinResolution)
            throw SchemaError("resolution", "must be at least " + std::to_string(kMinResolution));
    }
    if (const json* v = find(root, "tolerances")) {
        check_keys(*v, "tolerances", {"rtol", "atol"});
        if (const json* r = find(*v, "rtol")) s.options.rtol = as_positive(*r, "tolerances.rtol");
        if (const json* a = find(*v, "atol")) s.options.atol = as_positive(*a, "tolerances.atol");
    }
    if (const json* v = find(root, "sample_dt")) {
        s.options.sample_dt = as_number(*v, "sample_dt");
        if (s.options.sample_dt < 0.0) throw SchemaError("sample_dt", "must be non-negative");
    }
    if (const json* v = find(root, "snapshot_times")) {
        s.options.snapshot_times = number_list(*v, "snapshot_times");
        for (std::size_t i = 0; i < s.options.snapshot_times.size(); ++i)
            if (s.options.snapshot_times[i] < 0.0) throw SchemaError(item("snapshot_times", i), "must be non-negative");
    }
    if (const json* v = find(root, "outputs")) {
        s.outputs.clear();
        for (std::size_t i = 0; i < as_array(*v, "outputs").size(); ++i) {
            const std::string o = as_string((*v)[i], item("outputs", i));
            if (!kOutputs.count(o)) throw SchemaError(item("outputs", i), "unknown output '" + o + "'");
            if (std::find(s.outputs.begin(), s.outputs.end(), o) == s.outputs.end()) s.outputs.push_back(o);
        }
    }
}

std::vector<double> parse_range(const json& j, const std::string& path) {
    check_keys(j, path, {"from", "to", "count", "spacing"});
    for (const char* k : {"from", "to", "count"})
        if (!find(j, k)) throw SchemaError(child(path, k), "missing");
    const double from = as_number(j["from"], child(path, "from"));
    const double to = as_number(j["to"], child(path, "to"));
    const int count = as_int(j["count"], child(path, "count"));
    if (count < 2) throw SchemaError(child(path, "count"), "must be at least 2");
    std::string spacing = "linear";
    if (const json* v = find(j, "spacing")) spacing = as_string(*v, child(path, "spacing"));
    std::vector<double> out(static_cast<std::size_t>(count));
    if (spacing == "linear") {
        for (int i = 0; i < count; ++i) out[i] = from + (to - from) * i / (count - 1);
    } else if (spacing == "log") {
        if (!(from > 0.0 && to > 0.0)) throw SchemaError(child(path, "from"), "log spacing needs positive bounds");
        const double a = std::log(from), b = std::log(to);
        for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
    } else {
        throw SchemaError(child(path, "spacing"), "expected \"linear\" or \"log\"");
    }
    out.front() = from;
    out.back() = to;
    return out;
}

SweepSpec parse_sweep(const json& j) {
    const std::string path = "sweep";
    check_keys(j, path, {"axis", "values", "range", "configs", "u_range", "tol", "modes"});
    SweepSpec sw;
    const json* axis = find(j, "axis");
    if (!axis) throw SchemaError("sweep.axis", "missing");
    sw.axis = convert("sweep.axis", [&] { return sweep_axis_from_string(as_string(*axis, "sweep.axis")); });
    const json* values = find(j, "values");
    const json* range = find(j, "range");
    if ((values != nullptr) == (range != nullptr)) throw SchemaError("sweep.values", "give exactly one of values, range");
    sw.values = values ? number_list(*values, "sweep.values") : parse_range(*range, "sweep.range");
    if (sw.values.empty()) throw SchemaError("sweep.values", "must not be empty");
    if (const json* v = find(j, "configs")) {
        sw.configs.clear();
        for (std::size_t i = 0; i < as_array(*v, "sweep.configs").size(); ++i) {
            const std::string p = item("sweep.configs", i);
            sw.configs.push_back(convert(p, [&] { return config_from_string(as_string((*v)[i], p)); }));
        }
        if (sw.configs.empty()) throw SchemaError("sweep.configs", "must not be empty");
    }
    if (const json* v = find(j, "u_range")) {
        const auto r = number_list(*v, "sweep.u_range");
        if (r.size() != 2) throw SchemaError("sweep.u_range", "expected [lo, hi]");
        if (!(r[0] >= 0.0 && r[1] > r[0])) throw SchemaError("sweep.u_range", "need 0 <= lo < hi");
        sw.u_range = {r[0], r[1]};
    }
    if (const json* v = find(j, "tol")) sw.tol = as_positive(*v, "sweep.tol");
    if (const json* v = find(j, "modes")) {
        sw.modes = as_int(*v, "sweep.modes");
        if (sw.modes < 1 || sw.modes > kMaxClampedModes) throw SchemaError("sweep.modes", "must be in [1, 10]");
    }
    return sw;
}

Scenario parse_full(const json& root) {
    check_keys(root, "",
               {"name", "description", "notes", "config", "free_end", "params", "initial_data", "runs", "horizon",
                "resolution", "sample_dt", "snapshot_times", "tolerances", "sweep", "outputs", "analysis"});
    Scenario s;
    parse_common(root, s);
    if (const json* v = find(root, "description")) s.description = as_string(*v, "description");
    if (const json* v = find(root, "notes"))
        for (std::size_t i = 0; i < as_array(*v, "notes").size(); ++i)
            s.notes.push_back(as_string((*v)[i], item("notes", i)));
    if (const json* v = find(root, "analysis"))
        s.analysis = convert("analysis", [&] { return analysis_from_string(as_string(*v, "analysis")); });

    const BoundaryConfig base_cfg = parse_config(root, "", BoundaryConfig{});
    if (const json* v = find(root, "params")) parse_params(*v, "params", s.base);
    double horizon = 1.0;
    if (const json* v = find(root, "horizon")) horizon = as_positive(*v, "horizon");

    if (const json* sw = find(root, "sweep")) {
        for (const char* k : {"runs", "initial_data", "config", "free_end"})
            if (find(root, k)) throw SchemaError(k, "not allowed in a sweep scenario");
        s.sweep = parse_sweep(*sw);
        for (Config c : s.sweep->configs) {
            BeamParams probe = s.base;
            // the swept field is replaced per point
            if (s.sweep->axis == SweepAxis::L) probe.L = std::max(probe.L, 1.0);
            const ValidationReport rep = validate_params(probe, BoundaryConfig::make(c));
            if (!rep.ok())
                throw SchemaError("params." + document_key(rep.violations.front().field), rep.violations.front().rule);
        }
        return s;
    }

    RunSpec proto;
    proto.config = base_cfg;
    proto.params = s.base;
    proto.horizon = horizon;

    if (const json* runs = find(root, "runs")) {
        if (find(root, "initial_data") && find(root, "initial_data")->is_array())
            throw SchemaError("initial_data", "an array is not allowed together with runs");
        if (const json* ic = find(root, "initial_data")) proto.initial = parse_ic(*ic, "initial_data");
        std::set<std::string> labels;
        for (std::size_t i = 0; i < as_array(*runs, "runs").size(); ++i) {
            const std::string path = item("runs", i);
            const json& rj = (*runs)[i];
            check_keys(rj, path, {"label", "group", "config", "free_end", "params", "initial_data", "horizon"});
            RunSpec r = proto;
            r.label = "run" + std::to_string(i);
            if (const json* v = find(rj, "label")) r.label = as_string(*v, child(path, "label"));
            if (!file_safe(r.label)) throw SchemaError(child(path, "label"), "use letters, digits and . _ - = only");
            if (!labels.insert(r.label).second) throw SchemaError(child(path, "label"), "duplicate label");
            if (const json* v = find(rj, "group")) r.group = as_string(*v, child(path, "group"));
            r.config = parse_config(rj, path, proto.config);
            if (const json* v = find(rj, "params")) parse_params(*v, child(path, "params"), r.params);
            if (const json* v = find(rj, "initial_data")) r.initial = parse_ic(*v, child(path, "initial_data"));
            if (const json* v = find(rj, "horizon")) r.horizon = as_positive(*v, child(path, "horizon"));
            validate_run(r, path);
            s.runs.push_back(std::move(r));
        }
        if (s.runs.empty()) throw SchemaError("runs", "must not be empty");
        return s;
    }

    const json* ic = find(root, "initial_data");
    if (ic && ic->is_array()) {
        if (ic->empty()) throw SchemaError("initial_data", "must not be empty");
        for (std::size_t i = 0; i < ic->size(); ++i) {
            RunSpec r = proto;
            r.initial = parse_ic((*ic)[i], item("initial_data", i));
            r.label = "ic" + std::to_string(i);
            s.runs.push_back(std::move(r));
        }
    } else {
        RunSpec r = proto;
        if (ic) r.initial = parse_ic(*ic, "initial_data");
        r.label = "run";
        s.runs.push_back(std::move(r));
    }
    validate_run(s.runs.front(), "");
    return s;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

Scenario from_json(const json& root) {
    if (!root.is_object()) throw SchemaError("$", "expected an object");
    const json* preset = find(root, "preset");
    if (!preset) return parse_full(root);

    for (auto it = root.begin(); it != root.end(); ++it) {
        static const std::set<std::string> overridable{"preset",     "name",      "horizon",        "resolution",
                                                       "tolerances", "sample_dt", "snapshot_times", "outputs"};
        if (!overridable.count(it.key())) {
            static const std::set<std::string> full_keys{"description", "notes", "config", "free_end", "params",
                                                         "initial_data", "runs", "sweep", "analysis"};
            if (full_keys.count(it.key())) throw SchemaError(it.key(), "cannot be combined with preset");
            throw SchemaError(it.key(), "unknown key");
        }
    }
    const std::string name = as_string(*preset, "preset");
    if (!has_preset(name)) throw SchemaError("preset", "unknown preset '" + name + "'");
    Scenario s = load_preset(name);
    parse_common(root, s);
    if (const json* v = find(root, "horizon")) {
        if (s.is_sweep()) throw SchemaError("horizon", "not used by a sweep scenario");
        const double h = as_positive(*v, "horizon");
        for (auto& r : s.runs) r.horizon = h;
    }
    return s;
}

} // namespace

Scenario parse_scenario(std::string_view json_text) { return from_json(parse_json(json_text)); }

Scenario load_scenario(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot read " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str());
}

void apply_overrides(Scenario& s, const ScenarioOverrides& o) {
    if (o.resolution) {
        if (*o.resolution < kMinResolution)
            throw InvalidResolution("resolution must be at least " + std::to_string(kMinResolution));
        s.resolution = *o.resolution;
    }
    if (o.rtol) s.options.rtol = *o.rtol;
    if (o.atol) s.options.atol = *o.atol;
    if (o.horizon)
        for (auto& r : s.runs) r.horizon = *o.horizon;
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    if (!s.description.empty()) j["description"] = s.description;
    if (!s.notes.empty()) j["notes"] = s.notes;
    j["params"] = params_to_json(s.base);
    if (s.resolution) j["resolution"] = s.resolution;
    j["tolerances"] = {{"rtol", s.options.rtol}, {"atol", s.options.atol}};
    j["sample_dt"] = s.options.sample_dt;
    j["snapshot_times"] = s.options.snapshot_times;
    j["outputs"] = s.outputs;
    j["analysis"] = std::string(to_string(s.analysis));
    if (s.sweep) {
        const SweepSpec& sw = *s.sweep;
        json configs = json::array();
        for (Config c : sw.configs) configs.push_back(std::string(to_string(c)));
        j["sweep"] = {{"axis", std::string(to_string(sw.axis))},
                      {"values", sw.values},
                      {"configs", configs},
                      {"u_range", {sw.u_range.first, sw.u_range.second}},
                      {"tol", sw.tol},
                      {"modes", sw.modes}};
    } else {
        json runs = json::array();
        for (const RunSpec& r : s.runs) {
            json rj;
            rj["label"] = r.label;
            if (!r.group.empty()) rj["group"] = r.group;
            rj["config"] = std::string(to_string(r.config.kind));
            if (r.config.kind == Config::CF) rj["free_end"] = std::string(to_string(r.config.cf_free_end));
            rj["params"] = params_to_json(r.params);
            rj["initial_data"] = ic_to_json(r.initial);
            rj["horizon"] = r.horizon;
            runs.push_back(std::move(rj));
        }
        j["runs"] = std::move(runs);
    }
    return j.dump(2);
}

namespace {

SimulationCase make_case(const Scenario& s, const RunSpec& r) {
    SimulationCase c;
    c.params = r.params;
    c.config = r.config;
    c.grid = build_grid(r.params.L, s.resolution ? s.resolution : default_resolution(r.params.L));
    c.horizon = r.horizon;
    c.options = s.options;
    if (const auto* m = std::get_if<ModeID>(&r.initial)) {
        const ModeBasis basis = build_mode_basis(r.config, r.params, m->n);
        c.initial = sample_initial(r.initial, c.grid, r.config, &basis);
    } else {
        c.initial = sample_initial(r.initial, c.grid, r.config);
    }
    return c;
}

} // namespace

std::vector<SimulationCase> expand_runs(const Scenario& s) {
    std::vector<SimulationCase> out;
    out.reserve(s.runs.size());
    for (const RunSpec& r : s.runs) out.push_back(make_case(s, r));
    return out;
}

// ---------------------------------------------------------------------------
// Execution and artifacts

namespace {

bool wants(const Scenario& s, std::string_view o) {
    return std::find(s.outputs.begin(), s.outputs.end(), o) != s.outputs.end();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Execution execution_for(int parallelism) {
    return parallelism <= 1 ? Execution::serial() : Execution::openmp(parallelism);
}

std::string axis_column(SweepAxis a) { return a == SweepAxis::L ? "L" : std::string(to_string(a)); }

std::string trend(const std::vector<double>& ys) {
    if (ys.size() < 2) return "undetermined";
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < ys.size(); ++i) {
        if (!(ys[i] > ys[i - 1])) inc = false;
        if (!(ys[i] < ys[i - 1])) dec = false;
    }
    return inc ? "increasing" : dec ? "decreasing" : "non-monotone";
}

void run_sweep(const Scenario& s, const fs::path& out_dir, const Execution& exec, RunManifest& m, json& report) {
    const SweepSpec& sw = *s.sweep;
    CsvTable table({"config", axis_column(sw.axis), "u_crit", "omega_crit", "bracket_lo", "bracket_hi", "status"});
    std::map<Config, std::vector<std::optional<double>>> ucrit;
    json per_config = json::object();
    for (Config c : sw.configs) {
        SweepRequest req;
        req.config = BoundaryConfig::make(c);
        req.base = s.base;
        req.axis = sw.axis;
        req.values = sw.values;
        req.u_range = sw.u_range;
        req.tol = sw.tol;
        req.N = sw.modes;
        const auto points = sweep_ucrit(req, exec);
        std::vector<double> ys;
        auto& column = ucrit[c];
        for (const SweepPoint& pt : points) {
            RunRecord rec;
            rec.label = std::string(to_string(c)) + ":" + axis_column(sw.axis) + "=" + format_number(pt.axis_value);
            rec.files = {"ucrit.csv"};
            const std::string cfg(to_string(c));
            if (pt.result) {
                rec.status = "ok";
                table.add_row({cfg, format_number(pt.axis_value), format_number(pt.result->u_crit),
                               format_number(pt.result->omega_crit), format_number(pt.result->bracket.first),
                               format_number(pt.result->bracket.second), "ok"});
                ys.push_back(pt.result->u_crit);
                column.push_back(pt.result->u_crit);
            } else {
                rec.status = "failed";
                rec.error = pt.error;
                table.add_row({cfg, format_number(pt.axis_value), "", "", "", "", "failed"});
                column.push_back(std::nullopt);
            }
            m.runs.push_back(std::move(rec));
        }
        per_config[std::string(to_string(c))] = {{"points", points.size()},
                                                 {"found", ys.size()},
                                                 {"trend", trend(ys)},
                                                 {"min_u_crit", ys.empty() ? json(nullptr) : json(*std::min_element(ys.begin(), ys.end()))},
                                                 {"max_u_crit", ys.empty() ? json(nullptr) : json(*std::max_element(ys.begin(), ys.end()))}};
    }
    table.write(out_dir / "ucrit.csv");
    m.files.push_back("ucrit.csv");

    // ordering of the configurations at each axis value
    json ordering = json::array();
    for (std::size_t i = 0; i < sw.values.size(); ++i) {
        std::vector<std::pair<double, Config>> at;
        for (Config c : sw.configs)
            if (ucrit[c][i]) at.emplace_back(*ucrit[c][i], c);
        std::sort(at.begin(), at.end());
        std::string order;
        for (std::size_t k = 0; k < at.size(); ++k) order += (k ? " < " : "") + std::string(to_string(at[k].second));
        ordering.push_back({{axis_column(sw.axis), sw.values[i]}, {"order", order}});
    }
    report["configs"] = per_config;
    report["ordering"] = ordering;
}

struct RunResult {
    std::optional<Trajectory> traj;
    std::string error;
};

json run_summary(const Trajectory& tr) {
    double emax = 0.0, smax = 0.0;
    for (const auto& e : tr.energy) {
        emax = std::max(emax, e.E);
        smax = std::max(smax, e.scriptE);
    }
    return {{"status", std::string(to_string(tr.status))},
            {"final_time", tr.final_state.t},
            {"steps", tr.stats.steps},
            {"rejected", tr.stats.rejected},
            {"initial_scriptE", tr.energy.empty() ? 0.0 : tr.energy.front().scriptE},
            {"max_E", emax},
            {"max_scriptE", smax},
            {"final_observable", tr.observable.empty() ? 0.0 : tr.observable.back()}};
}

double relative_range(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += std::abs(x);
    mean /= static_cast<double>(v.size());
    return mean > 0.0 ? (*hi - *lo) / mean : 0.0;
}

constexpr double kUniformityTol = 0.02;
constexpr double kProfileTol = 1e-3;
constexpr double kGrowthFactor = 10.0;
constexpr double kTrendFactor = 2.0;

void analyse_runs(const Scenario& s, const std::vector<RunResult>& results, json& report) {
    json runs = json::array();
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const RunSpec& spec = s.runs[i];
        json r;
        r["label"] = spec.label;
        if (!spec.group.empty()) r["group"] = spec.group;
        r["initial_data"] = describe(spec.initial);
        if (!results[i].traj) {
            r["status"] = "failed";
            r["error"] = results[i].error;
            runs.push_back(std::move(r));
            continue;
        }
        groups[spec.group].push_back(i);
        const Trajectory& tr = *results[i].traj;
        r.update(run_summary(tr));
        const double t_end = tr.t.empty() ? 0.0 : tr.t.back();
        switch (s.analysis) {
        case Analysis::Growth: {
            try {
                r["growth_rate"] = fit_growth_rate(tr.energy, {0.5 * t_end, t_end});
            } catch (const Error& e) {
                r["growth_rate"] = nullptr;
                r["growth_error"] = e.what();
            }
            try {
                r["modal_growth"] = ModalModel(spec.config, spec.params).spectrum(spec.params).max_growth;
            } catch (const Error& e) {
                r["modal_growth"] = nullptr;
            }
            break;
        }
        case Analysis::Energy:
        case Analysis::Plateau:
            r["late_plateau"] = late_plateau(tr.energy);
            r["relative_drift"] = number_or_null(relative_drift(tr.energy));
            break;
        case Analysis::Dichotomy: {
            const double e0 = tr.energy.front().scriptE;
            double smax = 0.0;
            for (const auto& e : tr.energy) smax = std::max(smax, e.scriptE);
            const double trend = peak_growth_ratio(tr.energy);
            r["growth_factor"] = number_or_null(smax / e0);
            r["peak_growth_ratio"] = number_or_null(trend);
            r["relative_drift"] = number_or_null(relative_drift(tr.energy));
            r["regime"] = tr.diverged() || (trend > kTrendFactor && smax > kGrowthFactor * e0) ? "grows" : "bounded";
            break;
        }
        case Analysis::Lco:
        case Analysis::Chaos: {
            try {
                const LcoReport l = detect_lco(tr.t, tr.observable);
                r["lco"] = {{"converged", l.converged},   {"conclusive", l.conclusive},
                            {"amplitude", l.amplitude},   {"period", l.period},
                            {"relative_spread", l.relative_spread}, {"peaks_used", l.peaks_used}};
            } catch (const Error& e) {
                r["lco"] = {{"converged", false}, {"error", e.what()}};
            }
            if (s.analysis == Analysis::Chaos) {
                const double early = window_mean(tr.energy, 0.0, 0.05);
                const double late = window_mean(tr.energy, 0.8, 1.0);
                const double d9 = window_mean(tr.energy, 0.8, 0.9);
                const double d10 = window_mean(tr.energy, 0.9, 1.0);
                r["energy_early"] = early;
                r["energy_late"] = late;
                r["raised_plateau"] = !tr.diverged() && late > kGrowthFactor * early &&
                                      std::max(d9, d10) < 3.0 * std::min(d9, d10);
            }
            break;
        }
        case Analysis::Steady: {
            const SteadyStateReport st = detect_steady(tr);
            r["steady"] = st.is_steady;
            r["residual"] = st.residual;
            r["profile_change"] = number_or_null(st.profile_change);
            r["profile_max"] = st.profile.cwiseAbs().maxCoeff();
            break;
        }
        case Analysis::None: break;
        }
        runs.push_back(std::move(r));
    }
    report["runs"] = runs;

    json gsum = json::object();
    for (const auto& [group, idx] : groups) {
        json g;
        g["runs"] = idx.size();
        if (s.analysis == Analysis::Lco) {
            std::vector<double> amps, pers;
            bool all = true;
            for (std::size_t i : idx) {
                const json& l = runs[i]["lco"];
                if (!l.value("converged", false)) {
                    all = false;
                    continue;
                }
                amps.push_back(l["amplitude"].get<double>());
                pers.push_back(l["period"].get<double>());
            }
            g["all_converged"] = all;
            g["amplitude_range"] = relative_range(amps);
            g["period_range"] = relative_range(pers);
            g["uniform"] = all && relative_range(amps) <= kUniformityTol && relative_range(pers) <= kUniformityTol;
        } else if (s.analysis == Analysis::Steady) {
            const Eigen::VectorXd& ref = results[idx.front()].traj->final_state.w;
            json rel = json::array();
            for (std::size_t k = 1; k < idx.size(); ++k) {
                const Eigen::VectorXd& w = results[idx[k]].traj->final_state.w;
                if (w.size() != ref.size()) continue;
                const double d = profile_distance(ref, w);
                const double dm = profile_distance(ref, -w);
                rel.push_back({{"label", s.runs[idx[k]].label},
                               {"distance", d},
                               {"mirrored_distance", dm},
                               {"relation", d <= kProfileTol ? "identical" : dm <= kProfileTol ? "mirrored" : "different"}});
            }
            g["reference"] = s.runs[idx.front()].label;
            g["relations"] = rel;
        } else if (s.analysis == Analysis::Plateau) {
            bool nonincreasing = true;
            for (std::size_t k = 1; k < idx.size(); ++k)
                if (runs[idx[k]]["late_plateau"].get<double>() > runs[idx[k - 1]]["late_plateau"].get<double>())
                    nonincreasing = false;
            g["plateau_nonincreasing"] = nonincreasing;
        } else if (s.analysis == Analysis::Dichotomy) {
            bool bounded = false, grows = false;
            for (std::size_t i : idx) (runs[i]["regime"] == "grows" ? grows : bounded) = true;
            g["dichotomy"] = bounded && grows;
        } else if (s.analysis == Analysis::Chaos) {
            bool ok = true;
            for (std::size_t i : idx)
                ok = ok && runs[i]["status"] == "completed" && !runs[i]["lco"].value("converged", false) &&
                     runs[i]["raised_plateau"].get<bool>();
            g["bounded_aperiodic_raised"] = ok;
        }
        gsum[group.empty() ? "all" : group] = std::move(g);
    }
    report["groups"] = gsum;
}

void run_simulations(const Scenario& s, const fs::path& out_dir, const Execution& exec, RunManifest& m, json& report) {
    std::vector<RunResult> results(s.runs.size());
    parallel_for(s.runs.size(), exec, [&](std::size_t i) {
        try {
            const SimulationCase c = make_case(s, s.runs[i]);
            results[i].traj = integrate(c.initial, c.params, c.config, c.grid, c.horizon, c.options);
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });

    for (std::size_t i = 0; i < results.size(); ++i) {
        RunRecord rec;
        rec.label = s.runs[i].label;
        if (!results[i].traj) {
            rec.status = "failed";
            rec.error = results[i].error;
            m.runs.push_back(std::move(rec));
            continue;
        }
        const Trajectory& tr = *results[i].traj;
        rec.status = std::string(to_string(tr.status));
        if (tr.diverged()) rec.error = tr.diagnosis;
        if (wants(s, "trace")) {
            CsvTable t({"t", "observable", "E", "Pi", "scriptE", "Ehat"});
            for (std::size_t k = 0; k < tr.t.size(); ++k) {
                const auto& e = tr.energy[k];
                t.add_row(std::vector<double>{tr.t[k], tr.observable[k], e.E, e.Pi, e.scriptE, e.Ehat});
            }
            const std::string f = rec.label + ".csv";
            t.write(out_dir / f);
            rec.files.push_back(f);
        }
        if (wants(s, "snapshots")) {
            CsvTable t({"t", "x", "w", "v"});
            for (const Snapshot& sn : tr.snapshots)
                for (int k = 0; k < tr.grid.M; ++k) t.add_row(std::vector<double>{sn.t, tr.grid.x[k], sn.w[k], sn.v[k]});
            const std::string f = rec.label + "_snapshots.csv";
            t.write(out_dir / f);
            rec.files.push_back(f);
        }
        m.files.insert(m.files.end(), rec.files.begin(), rec.files.end());
        m.runs.push_back(std::move(rec));
    }
    analyse_runs(s, results, report);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw Error("write to " + path.string() + " failed");
}

} // namespace

RunManifest run_scenario(const Scenario& s, const fs::path& out_dir, int parallelism) {
    const auto start = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);
    RunManifest m;
    m.scenario = s.name;
    m.version = std::string(library_version());
    m.out_dir = out_dir;
    m.notes = s.notes;
    m.parallelism = std::max(1, parallelism);
    const Execution exec = execution_for(m.parallelism);

    json report;
    report["scenario"] = s.name;
    report["analysis"] = std::string(to_string(s.analysis));
    if (!s.notes.empty()) report["notes"] = s.notes;
    if (s.is_sweep())
        run_sweep(s, out_dir, exec, m, report);
    else
        run_simulations(s, out_dir, exec, m, report);
    if (wants(s, "report")) {
        write_text(out_dir / "report.json", report.dump(2) + "\n");
        m.files.push_back("report.json");
    }
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json mj;
    mj["scenario"] = m.scenario;
    mj["version"] = m.version;
    mj["parallelism"] = m.parallelism;
    mj["wall_seconds"] = m.wall_seconds;
    mj["parameters"] = json::parse(scenario_to_json(s));
    mj["notes"] = m.notes;
    mj["files"] = m.files;
    json runs = json::array();
    for (const RunRecord& r : m.runs) {
        json rj{{"label", r.label}, {"status", r.status}, {"files", r.files}};
        if (!r.error.empty()) rj["error"] = r.error;
        runs.push_back(std::move(rj));
    }
    mj["runs"] = runs;
    mj["failed"] = m.failed();
    write_text(out_dir / "manifest.json", mj.dump(2) + "\n");
    return m;
}

} // namespace beamflutter
