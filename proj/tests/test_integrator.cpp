#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "beamflutter/diagnostics.hpp"
#include "beamflutter/errors.hpp"
#include "beamflutter/integrator.hpp"
#include "beamflutter/stability.hpp"

#include <cmath>
#include <numbers>

using namespace beamflutter;

namespace {

struct ModeRun {
    double error = 0.0; ///< max |w(t, L/2) - s1(L/2) cos(w1 t)| / |s1(L/2)|
    double drift = 0.0; ///< max |E / E0 - 1|
    Trajectory traj;
};

// Hinged first mode in vacuo over ten periods: the exact solution is a standing wave.
ModeRun hinged_mode(int M) {
    const auto cfg = BoundaryConfig::make(Config::H);
    BeamParams p;
    p.beta = 0.0;
    const auto basis = build_mode_basis(cfg, p, 1);
    const Grid g = build_grid(1.0, M);
    const double w1 = basis.entry(1).omega;
    const double T = 10.0 * 2.0 * std::numbers::pi / w1;
    ModeRun r;
    r.traj = integrate(sample_initial(ModeID{1}, g, cfg, &basis), p, cfg, g, T);
    const double amp = basis.eval(1, 0.5);
    const double E0 = r.traj.energy.front().E;
    for (std::size_t i = 0; i < r.traj.t.size(); ++i) {
        r.error = std::max(r.error, std::abs(r.traj.observable[i] - amp * std::cos(w1 * r.traj.t[i])) / amp);
        r.drift = std::max(r.drift, std::abs(r.traj.energy[i].E / E0 - 1.0));
    }
    return r;
}

} // namespace

TEST_CASE("single mode in vacuo") {
    const ModeRun fine = hinged_mode(256);
    CHECK(fine.traj.status == RunStatus::Completed);
    CHECK(fine.error < 1e-3);
    CHECK(fine.drift < 1e-6);

    // second order in space
    const ModeRun a = hinged_mode(64);
    const ModeRun b = hinged_mode(128);
    CHECK(a.error / b.error == doctest::Approx(4.0).epsilon(0.1));
    CHECK(b.error / fine.error == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("trajectory bookkeeping") {
    const auto cfg = BoundaryConfig::make(Config::C);
    BeamParams p;
    p.U = 50.0;
    const Grid g = build_grid(1.0, 64);
    IntegrateOptions o;
    o.sample_dt = 0.01;
    o.snapshot_times = {0.0, 0.25, 0.5};
    const Trajectory tr = integrate(sample_initial(PolynomialID{}, g, cfg), p, cfg, g, 1.0, o);
    REQUIRE(tr.t.size() == 101);
    for (std::size_t i = 1; i < tr.t.size(); ++i) {
        CHECK(tr.t[i] > tr.t[i - 1]);
        CHECK(tr.t[i] == doctest::Approx(0.01 * static_cast<double>(i)).epsilon(1e-12));
    }
    CHECK(tr.observable.size() == tr.t.size());
    CHECK(tr.energy.size() == tr.t.size());
    CHECK(tr.velocity_sq.size() == tr.t.size());
    CHECK(tr.flow_pairing.size() == tr.t.size());
    REQUIRE(tr.snapshots.size() == 4);
    CHECK(tr.snapshots[1].t == 0.25);
    CHECK(tr.snapshots[3].t == 1.0);
    CHECK(tr.final_state.t == 1.0);
    for (const auto& s : tr.snapshots) {
        CHECK(s.w[0] == 0.0);
        CHECK(s.w[g.M - 1] == 0.0);
        CHECK(s.v[0] == 0.0);
    }
    CHECK(tr.stats.steps > 0);
    CHECK(tr.diagnosis.empty());

    // default sampling
    const Trajectory d = integrate(sample_initial(PolynomialID{}, g, cfg), p, cfg, g, 0.2);
    CHECK(d.t.size() == 2001);
    CHECK(d.snapshots.size() == 12);
}

TEST_CASE("runs are deterministic") {
    const auto cfg = BoundaryConfig::make(Config::CF);
    BeamParams p;
    p.U = 150.0;
    p.b2 = 1.0;
    const Grid g = build_grid(1.0, 48);
    IntegrateOptions o;
    o.rtol = 1e-6;
    o.atol = 1e-8;
    const auto s0 = sample_initial(PolynomialID{}, g, cfg);
    const Trajectory a = integrate(s0, p, cfg, g, 0.5, o);
    const Trajectory b = integrate(s0, p, cfg, g, 0.5, o);
    CHECK(a.observable == b.observable);
    CHECK(a.final_state.w == b.final_state.w);
}

TEST_CASE("nonlinear energy is conserved with the physical free end") {
    const auto cfg = BoundaryConfig::make(Config::CF, FreeEnd::PhysicalNonlinear);
    BeamParams p;
    p.beta = 0.0;
    p.b2 = 1.0;
    const Grid g = build_grid(1.0, 64);
    IntegrateOptions o;
    o.rtol = 1e-6;
    o.atol = 1e-8;
    const Trajectory tr = integrate(sample_initial(ElementaryIV{12.0}, g, cfg), p, cfg, g, 1.0, o);
    CHECK(tr.status == RunStatus::Completed);
    CHECK(relative_drift(tr.energy) < 1e-4);
    // the run is genuinely nonlinear
    double pmax = 0.0;
    for (const auto& e : tr.energy) pmax = std::max(pmax, e.Pi);
    CHECK(pmax > 0.1 * tr.energy.front().scriptE);
}

TEST_CASE("unstable linear runs end as diverged") {
    const auto cfg = BoundaryConfig::make(Config::C);
    BeamParams p;
    p.U = 1.5 * 636.7;
    const Grid g = build_grid(1.0, 64);
    IntegrateOptions o;
    o.divergence_threshold = 1e6;
    const Trajectory tr = integrate(sample_initial(PolynomialID{}, g, cfg), p, cfg, g, 20.0, o);
    CHECK(tr.status == RunStatus::Diverged);
    CHECK(tr.diverged());
    CHECK(tr.final_state.t < 20.0);
    CHECK(tr.diagnosis.find("max|w|") != std::string::npos);
    CHECK(tr.final_state.w.cwiseAbs().maxCoeff() > 1e6);
    CHECK(!tr.t.empty());
    CHECK(tr.t.back() <= tr.final_state.t);
}

TEST_CASE("step limit") {
    const auto cfg = BoundaryConfig::make(Config::H);
    const Grid g = build_grid(1.0, 32);
    IntegrateOptions o;
    o.max_steps = 10;
    const Trajectory tr = integrate(sample_initial(PolynomialID{}, g, cfg), BeamParams{}, cfg, g, 1.0, o);
    CHECK(tr.status == RunStatus::StepLimit);
    CHECK(!tr.diagnosis.empty());
}

TEST_CASE("input validation") {
    const auto cfg = BoundaryConfig::make(Config::H);
    const Grid g = build_grid(1.0, 32);
    const auto s0 = sample_initial(PolynomialID{}, g, cfg);
    CHECK_THROWS_AS(integrate(s0, BeamParams{}, cfg, g, 0.0), InvalidParams);
    IntegrateOptions o;
    o.rtol = 0.0;
    CHECK_THROWS_AS(integrate(s0, BeamParams{}, cfg, g, 1.0, o), InvalidParams);
    const Grid other = build_grid(1.0, 40);
    CHECK_THROWS_AS(integrate(s0, BeamParams{}, cfg, other, 1.0), DimensionMismatch);
    BeamParams bad;
    bad.k0 = -2.0;
    CHECK_THROWS_AS(integrate(s0, bad, cfg, g, 1.0), InvalidParams);
    CHECK(to_string(RunStatus::StepSizeUnderflow) == "step-size-underflow");
}

TEST_CASE("growth rate is independent of the initial data") {
    const auto cfg = BoundaryConfig::make(Config::H);
    BeamParams p;
    p.D = 23.9;
    p.L = 300.0;
    p.beta = 1.2e-4;
    p.U = 5.0;
    const double modal = ModalModel(cfg, p, 6).spectrum(p).max_growth;
    const Grid g = build_grid(p.L, 256);
    const auto basis = build_mode_basis(cfg, p, 2);
    std::vector<SimulationCase> cases;
    for (const InitialData& ic : std::vector<InitialData>{ModeID{1}, ModeID{2}, PolynomialID{}, ElementaryIV{1.0}})
        cases.push_back({sample_initial(ic, g, cfg, &basis), p, cfg, g, 20000.0, {}});
    const auto results = run_battery(cases, Execution::openmp());
    for (const auto& r : results) {
        REQUIRE(r.trajectory);
        const double sigma = fit_growth_rate(r.trajectory->energy, {10000.0, 20000.0});
        CHECK(sigma == doctest::Approx(modal).epsilon(0.01));
    }
}

TEST_CASE("battery matches serial runs") {
    const auto cfg = BoundaryConfig::make(Config::CF);
    const Grid g = build_grid(1.0, 40);
    std::vector<SimulationCase> cases;
    for (double U : {0.0, 100.0, 200.0}) {
        BeamParams p;
        p.U = U;
        p.b2 = 1.0;
        IntegrateOptions o;
        o.rtol = 1e-6;
        o.atol = 1e-8;
        cases.push_back({sample_initial(PolynomialID{}, g, cfg), p, cfg, g, 0.3, o});
    }
    BeamParams bad;
    bad.k0 = -5.0;
    cases.push_back({sample_initial(PolynomialID{}, g, cfg), bad, cfg, g, 0.3, {}});

    const auto par = run_battery(cases, Execution::openmp(4));
    const auto ser = run_battery(cases, Execution::serial());
    REQUIRE(par.size() == 4);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(par[i].trajectory);
        REQUIRE(ser[i].trajectory);
        CHECK(par[i].trajectory->observable == ser[i].trajectory->observable);
        const Trajectory direct = integrate(cases[i].initial, cases[i].params, cfg, g, 0.3, cases[i].options);
        CHECK(direct.final_state.w == par[i].trajectory->final_state.w);
    }
    CHECK(!par[3].trajectory);
    CHECK(!par[3].error.empty());
}
