#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "beamflutter/errors.hpp"
#include "beamflutter/stability.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

using namespace beamflutter;

namespace {

BeamParams panel(double D, double L, double beta, double k0 = 0.0) {
    BeamParams p;
    p.D = D;
    p.L = L;
    p.beta = beta;
    p.k0 = k0;
    return p;
}

// Roots of the scalar quadratic lambda^2 + k lambda + w2 = 0.
std::pair<std::complex<double>, std::complex<double>> scalar_roots(double k, double w2) {
    const std::complex<double> disc = std::sqrt(std::complex<double>(k * k - 4 * w2, 0.0));
    return {(-k + disc) / 2.0, (-k - disc) / 2.0};
}

double nearest_distance(const std::vector<std::complex<double>>& set, std::complex<double> z) {
    double best = 1e300;
    for (auto s : set) best = std::min(best, std::abs(s - z));
    return best;
}

} // namespace

TEST_CASE("stiffness matrix structure") {
    const auto cfg = BoundaryConfig::make(Config::H);
    BeamParams p = panel(1, 1.3, 0.7);
    p.U = 2.0;
    const auto basis = build_mode_basis(cfg, p, 4);
    const auto ov = overlap_matrix(basis);
    const auto q = assemble_qep(basis, ov, p);
    const double c = p.beta * p.U / p.L;
    CHECK(q.K(0, 1) == doctest::Approx(-8.0 / 3.0 * c));
    CHECK(q.K(1, 0) == doctest::Approx(8.0 / 3.0 * c));
    CHECK(q.K(1, 2) == doctest::Approx(-24.0 / 5.0 * c));
    CHECK(q.K(0, 3) == doctest::Approx(-16.0 / 15.0 * c));
    CHECK(q.K(2, 3) == doctest::Approx(-48.0 / 7.0 * c));
    CHECK(q.K(0, 2) == 0.0);
    for (int m = 1; m < 4; ++m) CHECK(q.K(m, m) > q.K(m - 1, m - 1));
    CHECK(q.damping == doctest::Approx(0.7));
}

TEST_CASE("zero flow gives a diagonal stiffness") {
    BeamParams p = panel(23.9, 300, 1.2e-4);
    const auto basis = build_mode_basis(BoundaryConfig::make(Config::C), p, 6);
    const auto q = assemble_qep(basis, overlap_matrix(basis), p);
    CHECK(q.K.isDiagonal());
    CHECK(q.K(0, 0) == doctest::Approx(23.9 * std::pow(4.7300 / 300.0, 4)).epsilon(1e-4));
}

TEST_CASE("dimension mismatch") {
    BeamParams p = panel(1, 1, 1);
    const auto b4 = build_mode_basis(BoundaryConfig::make(Config::C), p, 4);
    const auto b5 = build_mode_basis(BoundaryConfig::make(Config::C), p, 5);
    CHECK_THROWS_AS(assemble_qep(b4, overlap_matrix(b5), p), DimensionMismatch);
}

TEST_CASE("undamped in-vacuo roots are +-i omega") {
    BeamParams p = panel(2.0, 1.0, 0.0);
    const auto basis = build_mode_basis(BoundaryConfig::make(Config::CF), p, 6);
    const auto s = solve_qep(assemble_qep(basis, overlap_matrix(basis), p));
    REQUIRE(s.lambdas.size() == 12);
    for (const auto& e : basis.entries()) {
        CHECK(nearest_distance(s.lambdas, {0.0, e.omega}) < 1e-9 * e.omega);
        CHECK(nearest_distance(s.lambdas, {0.0, -e.omega}) < 1e-9 * e.omega);
    }
    for (auto l : s.lambdas) CHECK(std::abs(l.real()) < 1e-9 * basis.entries().back().omega);
}

TEST_CASE("damped in-vacuo roots have real part -k/2") {
    BeamParams p = panel(1.0, 1.0, 0.5, 0.25);
    const auto basis = build_mode_basis(BoundaryConfig::make(Config::C), p, 6);
    const auto s = solve_qep(assemble_qep(basis, overlap_matrix(basis), p));
    for (auto l : s.lambdas) CHECK(l.real() == doctest::Approx(-0.375).epsilon(1e-9));
    CHECK(s.max_residual < 1e-8);
}

TEST_CASE("omega and lambda conventions") {
    BeamParams p = panel(1, 1, 1);
    p.U = 700;
    const ModalModel model(BoundaryConfig::make(Config::C), p);
    const auto s = model.spectrum(p);
    for (std::size_t i = 0; i < s.lambdas.size(); ++i) {
        CHECK(s.omegas[i].imag() == doctest::Approx(s.lambdas[i].real()));
        CHECK(s.omegas[i].real() == doctest::Approx(-s.lambdas[i].imag()));
    }
    for (std::size_t i = 1; i < s.lambdas.size(); ++i) CHECK(s.lambdas[i - 1].real() >= s.lambdas[i].real());
    // conjugate closure
    for (auto l : s.lambdas) CHECK(nearest_distance(s.lambdas, std::conj(l)) < 1e-8 * std::abs(l));
    CHECK(s.max_residual < 1e-8);
}

TEST_CASE("small flow perturbs each mode continuously") {
    BeamParams p = panel(1, 1, 1e-4, 0.1);
    p.U = 1e-4; // beta U = 1e-8
    const ModalModel model(BoundaryConfig::make(Config::CF), p);
    const auto s = model.spectrum(p);
    for (const auto& e : model.basis().entries()) {
        const auto [a, b] = scalar_roots(p.k(), e.omega * e.omega);
        CHECK(nearest_distance(s.lambdas, a) < 1e-6);
        CHECK(nearest_distance(s.lambdas, b) < 1e-6);
    }
}

TEST_CASE("added damping lowers the growth rate below onset") {
    for (Config cfg : {Config::C, Config::H, Config::CF}) {
        BeamParams p = panel(1, 1, 1);
        p.U = 100;
        const ModalModel model(BoundaryConfig::make(cfg), p);
        double prev = 1e300;
        for (double k0 = 0.0; k0 <= 5.0; k0 += 0.5) {
            p.k0 = k0;
            const double g = model.spectrum(p).max_growth;
            CHECK(g < prev);
            prev = g;
        }
    }
}

TEST_CASE("classification") {
    ModalSpectrum s;
    s.lambdas = {{-0.1, 2.0}, {-0.1, -2.0}};
    s.max_growth = -0.1;
    s.dominant_frequency = 2.0;
    CHECK_FALSE(classify(s, 1e-6).unstable);
    s.max_growth = 0.3;
    const auto v = classify(s, 1e-6);
    CHECK(v.unstable);
    CHECK(v.growth == 0.3);
    CHECK(v.frequency == 2.0);
}

TEST_CASE("clamped panel destabilises at U=150 only via the cantilever value") {
    // Reference values from an independent numpy companion-matrix computation.
    BeamParams p = panel(1, 1, 1);
    p.U = 150;
    const ModalModel c(BoundaryConfig::make(Config::C), p);
    const ModalModel cf(BoundaryConfig::make(Config::CF), p);
    CHECK_FALSE(classify(c.spectrum(p), c.growth_tolerance()).unstable);
    CHECK(classify(cf.spectrum(p), cf.growth_tolerance()).unstable);
}

TEST_CASE("hinged long panel at U=5 is unstable") {
    BeamParams p = panel(23.9, 300, 1.2e-4);
    p.U = 5;
    const ModalModel h(BoundaryConfig::make(Config::H), p);
    CHECK(classify(h.spectrum(p), h.growth_tolerance()).unstable);
}

TEST_CASE("critical speeds against independent reference values") {
    // numpy/scipy: adaptive-quadrature overlaps, companion eigenvalues, bisection.
    struct Ref { Config cfg; double k0; double u; };
    const Ref refs[] = {{Config::C, 0.0, 636.68}, {Config::C, -1.0, 636.18}, {Config::H, 0.0, 343.8},
                        {Config::H, -1.0, 343.3}, {Config::CF, 0.0, 135.654}, {Config::CF, -1.0, 135.335}};
    for (const auto& r : refs) {
        BeamParams p = panel(1, 1, 1, r.k0);
        const auto res = find_ucrit(BoundaryConfig::make(r.cfg), p, {0.0, 1000.0}, 1e-6);
        INFO(to_string(r.cfg) << " k0=" << r.k0 << " -> " << res.u_crit);
        CHECK(res.u_crit == doctest::Approx(r.u).epsilon(2e-3));
        CHECK(res.bracket.second - res.bracket.first <= 1e-6);
        CHECK(res.bracket.first <= res.u_crit);
        CHECK(res.u_crit <= res.bracket.second);
        CHECK(std::abs(res.spectrum_at_crit.max_growth) < 1e-2 * std::sqrt(p.D) * std::pow(4.73, 2));
        CHECK(res.omega_crit > 0.0);
    }
}

TEST_CASE("bracket brackets the sign change") {
    BeamParams p = panel(1, 1, 1);
    const ModalModel model(BoundaryConfig::make(Config::CF), p);
    const auto res = find_ucrit(model, p, {0.0, 1000.0});
    BeamParams lo = p, hi = p;
    lo.U = res.bracket.first;
    hi.U = res.bracket.second;
    CHECK_FALSE(classify(model.spectrum(lo), model.growth_tolerance()).unstable);
    CHECK(classify(model.spectrum(hi), model.growth_tolerance()).unstable);
}

TEST_CASE("truncation N=4 vs N=6") {
    for (Config cfg : {Config::C, Config::H, Config::CF}) {
        BeamParams p = panel(1, 1, 1);
        const double u4 = find_ucrit(BoundaryConfig::make(cfg), p, {0.0, 1000.0}, 1e-6, 4).u_crit;
        const double u6 = find_ucrit(BoundaryConfig::make(cfg), p, {0.0, 1000.0}, 1e-6, 6).u_crit;
        CHECK(std::abs(u4 - u6) / u6 < 0.02);
    }
}

TEST_CASE("no instability in range") {
    BeamParams p = panel(1, 1, 1);
    CHECK_THROWS_AS(find_ucrit(BoundaryConfig::make(Config::C), p, {0.0, 100.0}, 1e-6), NoInstabilityInRange);
    BeamParams u = p;
    u.U = 0.0;
    const ModalModel model(BoundaryConfig::make(Config::C), p);
    for (double k0 : {0.0, 1.0}) {
        u.k0 = k0;
        CHECK(model.spectrum(u).max_growth <= 1e-9);
    }
}

TEST_CASE("range preconditions") {
    BeamParams p = panel(1, 1, 1);
    CHECK_THROWS_AS(find_ucrit(BoundaryConfig::make(Config::CF), p, {200.0, 1000.0}, 1e-6), InvalidParams);
    CHECK_THROWS_AS(find_ucrit(BoundaryConfig::make(Config::CF), p, {10.0, 5.0}, 1e-6), InvalidParams);
}

TEST_CASE("stability hierarchy on the long panel") {
    for (double L : {100.0, 200.0, 300.0}) {
        BeamParams p = panel(23.9, L, 1.2e-4);
        const double hiU = 1e6;
        const double cf = find_ucrit(BoundaryConfig::make(Config::CF), p, {0.0, hiU}, 1e-6).u_crit;
        const double h = find_ucrit(BoundaryConfig::make(Config::H), p, {0.0, hiU}, 1e-6).u_crit;
        const double c = find_ucrit(BoundaryConfig::make(Config::C), p, {0.0, hiU}, 1e-6).u_crit;
        CHECK(cf < h);
        CHECK(h < c);
    }
}

TEST_CASE("sweep records per-point failures and is order-independent") {
    SweepRequest req;
    req.config = BoundaryConfig::make(Config::C);
    req.base = panel(1, 1, 1);
    req.axis = SweepAxis::K0;
    req.values = {0.0, 1.0, 2.0, 50.0};
    req.u_range = {0.0, 700.0};
    const auto serial = sweep_ucrit(req, Execution::serial());
    const auto par = sweep_ucrit(req, Execution::openmp(3));
    REQUIRE(serial.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(serial[i].axis_value == req.values[i]);
        CHECK(serial[i].result.has_value() == par[i].result.has_value());
        if (serial[i].result) CHECK(serial[i].result->u_crit == par[i].result->u_crit);
    }
    CHECK(serial[0].result.has_value());
    CHECK_FALSE(serial[3].result.has_value());
    CHECK_FALSE(serial[3].error.empty());
    CHECK(serial[1].result->u_crit > serial[0].result->u_crit);
}

TEST_CASE("sweep axis names") {
    CHECK(sweep_axis_from_string("l") == SweepAxis::L);
    CHECK(sweep_axis_from_string("beta") == SweepAxis::Beta);
    CHECK(sweep_axis_from_string("k0") == SweepAxis::K0);
    CHECK_THROWS_AS(sweep_axis_from_string("u"), InvalidParams);
}
