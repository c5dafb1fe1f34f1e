// beamflutter: modal flutter prediction and beam simulation from the command line.

#include "beamflutter/csv.hpp"
#include "beamflutter/errors.hpp"
#include "beamflutter/integrator.hpp"
#include "beamflutter/modes.hpp"
#include "beamflutter/scenario.hpp"
#include "beamflutter/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace beamflutter;

namespace {

struct Common {
    std::string out;
    int parallel = 1;
};

struct ConfigArgs {
    std::string config = "C";
    std::string free_end = "physical";

    BoundaryConfig get() const { return BoundaryConfig::make(config_from_string(config), free_end_from_string(free_end)); }
};

void add_config(CLI::App* app, ConfigArgs& c) {
    app->add_option("-c,--config", c.config, "C, H or CF")->capture_default_str();
    app->add_option("--free-end", c.free_end, "CF free-end closure: physical or linear")->capture_default_str();
}

void add_params(CLI::App* app, BeamParams& p, bool nonlinear) {
    app->add_option("--D", p.D, "bending stiffness")->capture_default_str();
    app->add_option("--L", p.L, "length")->capture_default_str();
    app->add_option("--beta", p.beta, "piston-theory coefficient")->capture_default_str();
    app->add_option("--U", p.U, "flow speed")->capture_default_str();
    app->add_option("--k0", p.k0, "imposed damping")->capture_default_str();
    if (nonlinear) {
        app->add_option("--b1", p.b1, "in-axis pre-stress (> 0 compression)")->capture_default_str();
        app->add_option("--b2", p.b2, "extensible coefficient")->capture_default_str();
    }
}

std::optional<fs::path> out_dir(const Common& c) {
    if (!c.out.empty()) return fs::path(c.out);
    if (const char* env = std::getenv("FLUTTER_OUT"); env && *env) return fs::path(env);
    return std::nullopt;
}

Execution execution(const Common& c) { return c.parallel <= 1 ? Execution::serial() : Execution::openmp(c.parallel); }

void emit(const Common& c, const std::string& file, const std::string& text) {
    if (const auto dir = out_dir(c)) {
        fs::create_directories(*dir);
        std::ofstream f(*dir / file, std::ios::binary);
        f << text;
        if (!f) throw Error("cannot write " + (*dir / file).string());
        std::cerr << "wrote " << (*dir / file).string() << "\n";
    } else {
        std::cout << text;
    }
}

InitialData parse_ic(const std::string& s) {
    const auto colon = s.find(':');
    const std::string kind = s.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
    auto number = [&](double fallback) { return arg.empty() ? fallback : std::stod(arg); };
    if (kind == "mode") return ModeID{arg.empty() ? 1 : std::stoi(arg)};
    if (kind == "polynomial") return PolynomialID{};
    if (kind == "elementary") return ElementaryIV{number(1.0)};
    if (kind == "sine") return SineID{number(0.0)};
    if (kind == "zero") return ZeroID{};
    throw InvalidParams("unknown initial data '" + s + "' (mode:N, polynomial, elementary:c, sine:eps, zero)");
}

// --- modes ---

struct ModesArgs {
    ConfigArgs cfg;
    BeamParams params;
    int N = kDefaultModalTruncation;
    int shapes = 0;
};

void cmd_modes(const Common& c, const ModesArgs& a) {
    const BoundaryConfig cfg = a.cfg.get();
    const ModeBasis basis = build_mode_basis(cfg, a.params, a.N);
    CsvTable t({"n", "kappaL", "Cn", "cn", "omega"});
    for (const ModeEntry& e : basis.entries())
        t.add_row(std::vector<double>{static_cast<double>(e.n), e.kappa * a.params.L, e.Cn, e.cn, e.omega});
    emit(c, "modes.csv", t.str());
    if (a.shapes > 1) {
        std::vector<std::string> header{"x"};
        for (int n = 1; n <= basis.size(); ++n) header.push_back("s" + std::to_string(n));
        CsvTable s(header);
        for (int i = 0; i < a.shapes; ++i) {
            const double x = a.params.L * i / (a.shapes - 1);
            std::vector<double> row{x};
            for (int n = 1; n <= basis.size(); ++n) row.push_back(basis.eval(n, x));
            s.add_row(row);
        }
        emit(c, "shapes.csv", s.str());
    }
}

// --- stability ---

struct StabilityArgs {
    ConfigArgs cfg;
    BeamParams params;
    int N = kDefaultModalTruncation;
    std::string format = "json";
};

void cmd_stability(const Common& c, const StabilityArgs& a) {
    const BoundaryConfig cfg = a.cfg.get();
    const ModalModel model(cfg, a.params, a.N, execution(c));
    const ModalSpectrum sp = model.spectrum(a.params);
    const StabilityVerdict v = classify(sp, model.growth_tolerance());
    if (a.format == "csv") {
        CsvTable t({"re_lambda", "im_lambda", "re_omega", "im_omega"});
        for (std::size_t i = 0; i < sp.lambdas.size(); ++i)
            t.add_row(std::vector<double>{sp.lambdas[i].real(), sp.lambdas[i].imag(), sp.omegas[i].real(),
                                          sp.omegas[i].imag()});
        emit(c, "roots.csv", t.str());
        return;
    }
    nlohmann::ordered_json j;
    j["config"] = std::string(to_string(cfg.kind));
    j["N"] = a.N;
    j["U"] = a.params.U;
    j["unstable"] = v.unstable;
    j["max_growth"] = sp.max_growth;
    j["dominant_frequency"] = sp.dominant_frequency;
    j["growth_tolerance"] = model.growth_tolerance();
    j["max_residual"] = sp.max_residual;
    nlohmann::ordered_json roots = nlohmann::ordered_json::array();
    for (const auto& l : sp.lambdas) roots.push_back({l.real(), l.imag()});
    j["lambdas"] = roots;
    emit(c, "stability.json", j.dump(2) + "\n");
}

// --- ucrit-sweep ---

struct SweepArgs {
    ConfigArgs cfg;
    BeamParams params;
    std::string axis = "l";
    std::vector<double> values;
    double from = 0.0, to = 0.0;
    int count = 0;
    bool log = false;
    double u_min = 0.0, u_max = 1000.0;
    double tol = 1e-6;
    int N = kDefaultModalTruncation;
};

void cmd_sweep(const Common& c, const SweepArgs& a) {
    SweepRequest req;
    req.config = a.cfg.get();
    req.base = a.params;
    req.axis = sweep_axis_from_string(a.axis);
    req.values = a.values;
    if (req.values.empty()) {
        if (a.count < 2) throw InvalidParams("give --values or --from/--to/--count (count >= 2)");
        for (int i = 0; i < a.count; ++i) {
            const double f = static_cast<double>(i) / (a.count - 1);
            req.values.push_back(a.log ? a.from * std::pow(a.to / a.from, f) : a.from + (a.to - a.from) * f);
        }
        req.values.back() = a.to;
    }
    req.u_range = {a.u_min, a.u_max};
    req.tol = a.tol;
    req.N = a.N;
    CsvTable t({"axis_value", "u_crit", "omega_crit", "bracket_lo", "bracket_hi"});
    for (const SweepPoint& pt : sweep_ucrit(req, execution(c))) {
        if (pt.result)
            t.add_row(std::vector<double>{pt.axis_value, pt.result->u_crit, pt.result->omega_crit,
                                          pt.result->bracket.first, pt.result->bracket.second});
        else {
            t.add_row({format_number(pt.axis_value), "", "", "", ""});
            std::cerr << a.axis << "=" << format_number(pt.axis_value) << ": " << pt.error << "\n";
        }
    }
    emit(c, "ucrit.csv", t.str());
}

// --- simulate ---

struct SimulateArgs {
    ConfigArgs cfg;
    BeamParams params;
    std::string ic = "polynomial";
    double horizon = 1.0;
    int resolution = 0;
    double rtol = 1e-8, atol = 1e-10;
    double sample_dt = 0.0;
    std::vector<double> snapshots;
    bool full_field = false;
};

int cmd_simulate(const Common& c, const SimulateArgs& a) {
    const BoundaryConfig cfg = a.cfg.get();
    const InitialData ic = parse_ic(a.ic);
    const Grid g = build_grid(a.params.L, a.resolution ? a.resolution : default_resolution(a.params.L));
    BeamState s0;
    if (const auto* m = std::get_if<ModeID>(&ic)) {
        const ModeBasis basis = build_mode_basis(cfg, a.params, m->n);
        s0 = sample_initial(ic, g, cfg, &basis);
    } else {
        s0 = sample_initial(ic, g, cfg);
    }
    IntegrateOptions o;
    o.rtol = a.rtol;
    o.atol = a.atol;
    o.sample_dt = a.sample_dt;
    o.snapshot_times = a.snapshots;
    const Trajectory tr = integrate(s0, a.params, cfg, g, a.horizon, o);
    CsvTable t({"t", "observable", "E", "Pi", "scriptE"});
    for (std::size_t k = 0; k < tr.t.size(); ++k)
        t.add_row(std::vector<double>{tr.t[k], tr.observable[k], tr.energy[k].E, tr.energy[k].Pi, tr.energy[k].scriptE});
    emit(c, "trace.csv", t.str());
    if (a.full_field || !a.snapshots.empty()) {
        CsvTable f({"t", "x", "w"});
        for (const Snapshot& sn : tr.snapshots)
            for (int i = 0; i < g.M; ++i) f.add_row(std::vector<double>{sn.t, g.x[i], sn.w[i]});
        emit(c, "snapshots.csv", f.str());
    }
    std::cerr << "status " << to_string(tr.status) << ", " << tr.stats.steps << " steps";
    if (!tr.diagnosis.empty()) std::cerr << " (" << tr.diagnosis << ")";
    std::cerr << "\n";
    return 0;
}

// --- run ---

struct RunArgs {
    std::string target;
    std::optional<int> resolution;
    std::optional<double> rtol, atol, horizon;
};

int cmd_run(const Common& c, const RunArgs& a) {
    Scenario s = fs::is_regular_file(a.target) ? load_scenario(a.target)
                 : has_preset(a.target)        ? load_preset(a.target)
                                               : throw InvalidParams("'" + a.target + "' is neither a file nor a preset");
    apply_overrides(s, {a.resolution, a.rtol, a.atol, a.horizon});
    const fs::path dir = out_dir(c).value_or(fs::path("out")) / s.name;
    const RunManifest m = run_scenario(s, dir, c.parallel);
    for (const RunRecord& r : m.runs) {
        std::cout << r.label << ": " << r.status;
        if (!r.error.empty()) std::cout << " (" << r.error << ")";
        std::cout << "\n";
    }
    for (const std::string& n : m.notes) std::cout << "note: " << n << "\n";
    std::cout << "wrote " << m.files.size() + 1 << " files to " << dir.string() << " in " << m.wall_seconds << " s\n";
    return m.all_failed() ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flutter onset and post-flutter dynamics of extensible beams"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("-o,--out", common.out, "output directory (default: $FLUTTER_OUT, else stdout / ./out)");
    app.add_option("-p,--parallel", common.parallel, "worker threads for sweeps and batteries")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    ModesArgs modes;
    auto* m = app.add_subcommand("modes", "mode table (n, kappaL, Cn, cn, omega) and optional sampled shapes");
    add_config(m, modes.cfg);
    m->add_option("--D", modes.params.D, "bending stiffness")->capture_default_str();
    m->add_option("--L", modes.params.L, "length")->capture_default_str();
    m->add_option("-N,--modes", modes.N, "number of modes")->capture_default_str();
    m->add_option("--shapes", modes.shapes, "sample each shape at this many points");

    StabilityArgs stab;
    auto* st = app.add_subcommand("stability", "2N modal roots and the stability verdict");
    add_config(st, stab.cfg);
    add_params(st, stab.params, false);
    st->add_option("-N,--modes", stab.N, "modal truncation")->capture_default_str();
    st->add_option("--format", stab.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    SweepArgs sweep;
    auto* sw = app.add_subcommand("ucrit-sweep", "U_crit over one axis (l, beta or k0)");
    add_config(sw, sweep.cfg);
    add_params(sw, sweep.params, false);
    sw->add_option("--axis", sweep.axis, "l, beta or k0")->capture_default_str();
    sw->add_option("--values", sweep.values, "explicit axis values");
    sw->add_option("--from", sweep.from, "range start");
    sw->add_option("--to", sweep.to, "range end");
    sw->add_option("--count", sweep.count, "range points");
    sw->add_flag("--log", sweep.log, "log-spaced range");
    sw->add_option("--u-min", sweep.u_min, "search range start")->capture_default_str();
    sw->add_option("--u-max", sweep.u_max, "search range end")->capture_default_str();
    sw->add_option("--tol", sweep.tol, "bracket width")->capture_default_str();
    sw->add_option("-N,--modes", sweep.N, "modal truncation")->capture_default_str();

    SimulateArgs sim;
    auto* si = app.add_subcommand("simulate", "finite-difference run; CSV of (t, observable, E, Pi, scriptE)");
    add_config(si, sim.cfg);
    add_params(si, sim.params, true);
    si->add_option("--ic", sim.ic, "mode:N, polynomial, elementary:c, sine:eps or zero")->capture_default_str();
    si->add_option("--horizon", sim.horizon, "final time")->capture_default_str();
    si->add_option("--resolution", sim.resolution, "grid nodes (default 128, 512 for L > 10)");
    si->add_option("--rtol", sim.rtol, "relative tolerance")->capture_default_str();
    si->add_option("--atol", sim.atol, "absolute tolerance")->capture_default_str();
    si->add_option("--sample-dt", sim.sample_dt, "trace sampling interval (default horizon / 2000)");
    si->add_option("--snapshots", sim.snapshots, "full-field snapshot times");
    si->add_flag("--full-field", sim.full_field, "write default snapshots (t = 0, T/10, ..., T)");

    RunArgs run;
    auto* r = app.add_subcommand("run", "run a scenario file or a named preset");
    r->add_option("scenario", run.target, "scenario JSON path or preset name")->required();
    r->add_option("--resolution", run.resolution, "grid nodes for every run");
    r->add_option("--rtol", run.rtol, "relative tolerance");
    r->add_option("--atol", run.atol, "absolute tolerance");
    r->add_option("--horizon", run.horizon, "final time for every run");

    std::string preset_name;
    auto* pr = app.add_subcommand("presets", "list presets, or print one preset's document");
    pr->add_option("name", preset_name, "preset to print");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*m) cmd_modes(common, modes);
        if (*st) cmd_stability(common, stab);
        if (*sw) cmd_sweep(common, sweep);
        if (*si) return cmd_simulate(common, sim);
        if (*r) return cmd_run(common, run);
        if (*pr) {
            if (preset_name.empty())
                for (const auto& n : preset_names()) std::cout << n << "\n";
            else
                std::cout << preset_document(preset_name) << "\n";
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
