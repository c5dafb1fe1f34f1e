#include "beamflutter/fdm.hpp"

#include "beamflutter/errors.hpp"

#include <cmath>
#include <string>

namespace beamflutter {

Grid build_grid(double L, int M) {
    if (M < kMinResolution)
        throw InvalidResolution("grid needs at least " + std::to_string(kMinResolution) + " nodes, got " +
                                std::to_string(M));
    if (!(L > 0.0) || !std::isfinite(L)) throw InvalidResolution("grid length must be positive");
    Grid g;
    g.M = M;
    g.L = L;
    g.h = L / (M - 1);
    g.x.resize(M);
    for (int i = 0; i < M; ++i) g.x[i] = i * g.h;
    g.x[M - 1] = L;
    return g;
}

int default_resolution(double L) { return L > 10.0 ? 512 : 128; }

ActiveRange active_range(const BoundaryConfig& config, const Grid& grid) {
    return {1, config.kind == Config::CF ? grid.M - 1 : grid.M - 2};
}

BeamState sample_initial(const InitialData& data, const Grid& grid, const BoundaryConfig& config,
                         const ModeBasis* basis) {
    BeamState s;
    s.w.setZero(grid.M);
    s.v.setZero(grid.M);
    if (const auto* mode = std::get_if<ModeID>(&data)) {
        if (basis == nullptr) throw MissingBasis("modal initial data needs a mode basis");
        if (basis->config().kind != config.kind)
            throw MissingBasis("mode basis was built for configuration " + std::string(to_string(basis->config().kind)));
        for (int i = 0; i < grid.M; ++i) s.w[i] = basis->eval(mode->n, grid.x[i]);
    } else {
        for (int i = 0; i < grid.M; ++i) {
            const double xh = grid.x[i] / grid.L;
            s.w[i] = initial_displacement(data, config.kind, xh);
            s.v[i] = initial_velocity(data, config.kind, xh);
        }
    }
    s.w[0] = 0.0;
    s.v[0] = 0.0;
    if (config.kind != Config::CF) {
        s.w[grid.M - 1] = 0.0;
        s.v[grid.M - 1] = 0.0;
    }
    return s;
}

double norm_wx_sq(const Eigen::VectorXd& w, const Grid& grid) {
    double sum = 0.0;
    for (int i = 0; i + 1 < grid.M; ++i) {
        const double d = w[i + 1] - w[i];
        sum += d * d;
    }
    return sum / grid.h;
}

double extensible_coefficient(const Eigen::VectorXd& w, const Grid& grid, const BeamParams& params) {
    if (params.b2 == 0.0) return params.b1;
    return params.b1 - params.b2 * norm_wx_sq(w, grid);
}

namespace {

void fill_ghosts(const BoundaryConfig& config, double coeff, double h, double D, Eigen::VectorXd& e) {
    const int n = static_cast<int>(e.size());
    // left end: clamped for C and CF, hinged for H
    const double sl = config.kind == Config::H ? -1.0 : 1.0;
    e[1] = sl * e[3];
    e[0] = sl * e[4];
    const int r = n - 3; // last physical node
    switch (config.kind) {
    case Config::C:
        e[r + 1] = e[r - 1];
        e[r + 2] = e[r - 2];
        break;
    case Config::H:
        e[r + 1] = -e[r - 1];
        e[r + 2] = -e[r - 2];
        break;
    case Config::CF: {
        const double c = config.cf_free_end == FreeEnd::PhysicalNonlinear ? coeff : 0.0;
        const double g1 = 2.0 * e[r] - e[r - 1];
        e[r + 1] = g1;
        e[r + 2] = 2.0 * g1 - 2.0 * e[r - 1] + e[r - 2] - (c * h * h / D) * (g1 - e[r - 1]);
        break;
    }
    }
}

} // namespace

Eigen::VectorXd apply_ghosts(const BoundaryConfig& config, const Eigen::VectorXd& w, double coeff, const Grid& grid,
                             double D) {
    Eigen::VectorXd e(grid.M + 4);
    e.segment(2, grid.M) = w;
    fill_ghosts(config, coeff, grid.h, D, e);
    return e;
}

Eigen::VectorXd second_difference(const BoundaryConfig& config, const Eigen::VectorXd& w, const Grid& grid) {
    // w_xx never involves the outer ghost, so the free-end coefficient is irrelevant here
    const Eigen::VectorXd e = apply_ghosts(config, w, 0.0, grid);
    const double ih2 = 1.0 / (grid.h * grid.h);
    Eigen::VectorXd d(grid.M);
    for (int i = 0; i < grid.M; ++i) d[i] = (e[i + 1] - 2.0 * e[i + 2] + e[i + 3]) * ih2;
    return d;
}

Eigen::VectorXd first_difference(const BoundaryConfig& config, const Eigen::VectorXd& w, double coeff,
                                 const Grid& grid, double D) {
    const Eigen::VectorXd e = apply_ghosts(config, w, coeff, grid, D);
    const double i2h = 0.5 / grid.h;
    Eigen::VectorXd d(grid.M);
    for (int i = 0; i < grid.M; ++i) d[i] = (e[i + 3] - e[i + 1]) * i2h;
    return d;
}

Eigen::VectorXd trapezoid_weights(const Grid& grid) {
    Eigen::VectorXd wt = Eigen::VectorXd::Constant(grid.M, grid.h);
    wt[0] *= 0.5;
    wt[grid.M - 1] *= 0.5;
    return wt;
}

BeamOperator::BeamOperator(const Grid& grid, const BeamParams& params, const BoundaryConfig& config)
    : grid_(grid), params_(params), config_(config), range_(active_range(config, grid)), ext_(grid.M + 4),
      probe_w_(grid.M), probe_v_(Eigen::VectorXd::Zero(grid.M)), probe_a_(grid.M) {}

double BeamOperator::coefficient(const Eigen::VectorXd& w) const {
    return extensible_coefficient(w, grid_, params_);
}

void BeamOperator::extend(const Eigen::VectorXd& w, double coeff) const {
    ext_.segment(2, grid_.M) = w;
    fill_ghosts(config_, coeff, grid_.h, params_.D, ext_);
}

void BeamOperator::acceleration(const Eigen::VectorXd& w, const Eigen::VectorXd& v, double coeff,
                                Eigen::VectorXd& a) const {
    extend(w, coeff);
    const double h = grid_.h;
    const double c4 = params_.D / (h * h * h * h);
    const double c2 = coeff / (h * h);
    const double c1 = params_.beta * params_.U / (2.0 * h);
    const double k = params_.k();
    const double* e = ext_.data() + 2; // e[i] is node i
    a.setZero(grid_.M);
    for (int i = range_.first; i <= range_.last; ++i) {
        const double d4 = e[i - 2] - 4.0 * e[i - 1] + 6.0 * e[i] - 4.0 * e[i + 1] + e[i + 2];
        const double d2 = e[i - 1] - 2.0 * e[i] + e[i + 1];
        const double d1 = e[i + 1] - e[i - 1];
        a[i] = -c4 * d4 - c2 * d2 - c1 * d1 - k * v[i];
    }
}

void BeamOperator::displacement_jacobian(double coeff, Eigen::MatrixXd& band) const {
    constexpr int kl = 2;
    constexpr int ku = 2;
    const int M = grid_.M;
    band.setZero(2 * kl + ku + 1, M);
    // a is linear in w at fixed coeff; probe five interleaved combs
    for (int r = 0; r < 5; ++r) {
        probe_w_.setZero();
        for (int j = r; j < M; j += 5) probe_w_[j] = 1.0;
        acceleration(probe_w_, probe_v_, coeff, probe_a_);
        for (int i = range_.first; i <= range_.last; ++i) {
            int j = i - 2 + ((r - (i - 2)) % 5 + 5) % 5;
            if (j < 0 || j >= M) continue;
            band(kl + ku + i - j, j) = probe_a_[i];
        }
    }
}

StateDerivative rhs(const BeamState& state, const Grid& grid, const BeamParams& params, const BoundaryConfig& config) {
    const BeamOperator op(grid, params, config);
    StateDerivative d;
    d.dw = state.v;
    const ActiveRange r = op.range();
    for (int i = 0; i < grid.M; ++i)
        if (i < r.first || i > r.last) d.dw[i] = 0.0;
    op.acceleration(state.w, state.v, op.coefficient(state.w), d.dv);
    return d;
}

double observable(const Eigen::VectorXd& w, const Grid& grid, const BoundaryConfig& config) {
    if (config.kind == Config::CF) return w[grid.M - 1];
    if (grid.M % 2 == 1) return w[(grid.M - 1) / 2];
    const int m = grid.M / 2 - 1; // x_m < L/2 < x_{m+1}
    return (-w[m - 1] + 9.0 * w[m] + 9.0 * w[m + 1] - w[m + 2]) / 16.0;
}

} // namespace beamflutter
