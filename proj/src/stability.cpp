#include "beamflutter/stability.hpp"

#include "beamflutter/errors.hpp"

#include <algorithm>
#include <cmath>

namespace beamflutter {

QepProblem assemble_qep(const ModeBasis& basis, const OverlapMatrix& overlaps, const BeamParams& params) {
    const int N = basis.size();
    if (overlaps.S.rows() != N || overlaps.S.cols() != N)
        throw DimensionMismatch("overlap matrix is " + std::to_string(overlaps.S.rows()) + "x" +
                                std::to_string(overlaps.S.cols()) + " but the basis has " + std::to_string(N) +
                                " modes");
    QepProblem p;
    p.N = N;
    p.damping = params.k();
    p.K.resize(N, N);
    const double flow = params.beta * params.U;
    for (int m = 0; m < N; ++m) {
        for (int n = 0; n < N; ++n) {
            if (m == n) {
                const double kap = basis.entries()[static_cast<std::size_t>(m)].kappa;
                p.K(m, m) = params.D * kap * kap * kap * kap;
            } else {
                // a_mn = beta U (s_n', s_m)
                p.K(m, n) = flow * overlaps.S(n, m);
            }
        }
    }
    return p;
}

ModalSpectrum solve_qep(const QepProblem& problem) {
    const int N = problem.N;
    const double k = problem.damping;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    A.topRightCorner(N, N).setIdentity();
    A.bottomLeftCorner(N, N) = -problem.K;
    A.bottomRightCorner(N, N) = -k * Eigen::MatrixXd::Identity(N, N);

    Eigen::EigenSolver<Eigen::MatrixXd> solver(A, true);
    if (solver.info() != Eigen::Success) throw EigenSolveFailure("companion eigenproblem did not converge");

    const Eigen::VectorXcd values = solver.eigenvalues();
    const Eigen::MatrixXcd vectors = solver.eigenvectors();
    const double knorm = std::max(problem.K.norm(), 1e-300);

    ModalSpectrum out;
    out.lambdas.resize(static_cast<std::size_t>(2 * N));
    for (int i = 0; i < 2 * N; ++i) {
        const std::complex<double> lam = values(i);
        out.lambdas[static_cast<std::size_t>(i)] = lam;
        Eigen::VectorXcd v = vectors.col(i).head(N);
        const double vn = v.norm();
        if (vn > 0.0) v /= vn;
        const Eigen::VectorXcd r = (lam * lam + k * lam) * v + problem.K.cast<std::complex<double>>() * v;
        out.max_residual = std::max(out.max_residual, r.norm() / knorm);
    }
    std::sort(out.lambdas.begin(), out.lambdas.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    out.omegas.reserve(out.lambdas.size());
    for (const auto& lam : out.lambdas) out.omegas.push_back(std::complex<double>(0.0, 1.0) * lam);
    out.max_growth = out.lambdas.front().real();
    out.dominant_frequency = std::abs(out.lambdas.front().imag());
    return out;
}

StabilityVerdict classify(const ModalSpectrum& spectrum, double tol) {
    StabilityVerdict v;
    v.growth = spectrum.max_growth;
    v.frequency = spectrum.dominant_frequency;
    v.unstable = spectrum.max_growth > tol;
    return v;
}

double default_growth_tolerance(const ModeBasis& basis) { return 1e-6 * basis.entries().front().omega; }

ModalModel::ModalModel(const BoundaryConfig& config, const BeamParams& params, int N, const Execution& exec)
    : basis_(build_mode_basis(config, params, N)), overlaps_(overlap_matrix(basis_, kDefaultQuadraturePoints, exec)) {}

ModalSpectrum ModalModel::spectrum(const BeamParams& params) const {
    return solve_qep(assemble_qep(basis_, overlaps_, params));
}

UcritResult find_ucrit(const ModalModel& model, const BeamParams& params_base, std::pair<double, double> u_range,
                       const UcritOptions& options) {
    auto [u_lo, u_hi] = u_range;
    if (!(u_hi > u_lo) || u_lo < 0.0) throw InvalidParams("u_range must satisfy 0 <= U_lo < U_hi");
    if (options.scan_points < 1) throw InvalidParams("scan_points must be >= 1");
    const double gtol = options.growth_tol.value_or(model.growth_tolerance());

    auto unstable_at = [&](double u) {
        BeamParams p = params_base;
        p.U = u;
        return classify(model.spectrum(p), gtol).unstable;
    };

    if (unstable_at(u_lo))
        throw InvalidParams("configuration is already unstable at U_lo = " + std::to_string(u_lo));

    // Forward scan for the first onset, then bisection inside that cell.
    double lo = u_lo;
    double hi = u_lo;
    bool found = false;
    const double step = (u_hi - u_lo) / options.scan_points;
    for (int j = 1; j <= options.scan_points; ++j) {
        const double u = (j == options.scan_points) ? u_hi : u_lo + j * step;
        if (unstable_at(u)) {
            hi = u;
            found = true;
            break;
        }
        lo = u;
    }
    if (!found)
        throw NoInstabilityInRange("no flutter onset for U in [" + std::to_string(u_lo) + ", " + std::to_string(u_hi) +
                                   "]");

    while (hi - lo > options.tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (unstable_at(mid))
            hi = mid;
        else
            lo = mid;
    }

    UcritResult out;
    out.bracket = {lo, hi};
    out.u_crit = 0.5 * (lo + hi);
    BeamParams p = params_base;
    p.U = out.u_crit;
    out.spectrum_at_crit = model.spectrum(p);
    out.omega_crit = out.spectrum_at_crit.dominant_frequency;
    return out;
}

UcritResult find_ucrit(const BoundaryConfig& config, const BeamParams& params_base, std::pair<double, double> u_range,
                       double tol, int N) {
    const ModalModel model(config, params_base, N);
    UcritOptions options;
    options.tol = tol;
    return find_ucrit(model, params_base, u_range, options);
}

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::L: return "l";
    case SweepAxis::Beta: return "beta";
    case SweepAxis::K0: return "k0";
    }
    return "?";
}

SweepAxis sweep_axis_from_string(std::string_view s) {
    if (s == "l" || s == "L") return SweepAxis::L;
    if (s == "beta") return SweepAxis::Beta;
    if (s == "k0") return SweepAxis::K0;
    throw InvalidParams("unknown sweep axis '" + std::string(s) + "' (expected l, beta or k0)");
}

std::vector<SweepPoint> sweep_ucrit(const SweepRequest& request, const Execution& exec) {
    std::vector<SweepPoint> points(request.values.size());
    parallel_for(request.values.size(), exec, [&](std::size_t i) {
        SweepPoint& pt = points[i];
        pt.axis_value = request.values[i];
        BeamParams p = request.base;
        switch (request.axis) {
        case SweepAxis::L: p.L = pt.axis_value; break;
        case SweepAxis::Beta: p.beta = pt.axis_value; break;
        case SweepAxis::K0: p.k0 = pt.axis_value; break;
        }
        try {
            const ModalModel model(request.config, p, request.N, Execution::serial());
            UcritOptions options;
            options.tol = request.tol;
            pt.result = find_ucrit(model, p, request.u_range, options);
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
    });
    return points;
}

} // namespace beamflutter
