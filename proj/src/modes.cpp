#include "beamflutter/modes.hpp"

#include "beamflutter/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace beamflutter {

namespace {

constexpr double pi = std::numbers::pi;

double sech(double z) { return 1.0 / std::cosh(z); }

double residual_derivative(Config config, double z) {
    switch (config) {
    case Config::H: return std::cos(z) * std::tanh(z) + std::sin(z) * sech(z) * sech(z);
    case Config::C: return -std::sin(z) + sech(z) * std::tanh(z);
    case Config::CF: return -std::sin(z) - sech(z) * std::tanh(z);
    }
    return 0.0;
}

double bisect_root(Config config, double lo, double hi) {
    double flo = characteristic_residual(config, lo);
    const double fhi = characteristic_residual(config, hi);
    if (!(flo * fhi < 0.0))
        throw BracketingFailure("no sign change of the characteristic equation on [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = characteristic_residual(config, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double z = 0.5 * (lo + hi);
    // Newton polish, kept inside the bracket.
    const double d = residual_derivative(config, z);
    if (d != 0.0) {
        const double next = z - characteristic_residual(config, z) / d;
        if (next >= lo && next <= hi) z = next;
    }
    return z;
}

// 1 - Cn written without cosh/sinh cancellation.
double one_minus_shape_ratio(Config config, double z) {
    const double em = std::exp(-z);
    if (config == Config::C) return (std::cos(z) - std::sin(z) - em) / (std::sinh(z) - std::sin(z));
    return (std::sin(z) - std::cos(z) - em) / (std::sinh(z) + std::sin(z));
}

double shape_ratio(Config config, double z) {
    if (config == Config::C) return (std::cosh(z) - std::cos(z)) / (std::sinh(z) - std::sin(z));
    return (std::cosh(z) + std::cos(z)) / (std::sinh(z) + std::sin(z));
}

// Unnormalised shape derivative of order `deriv` in y = kappa x (without the kappa^deriv factor).
double raw_shape(Config config, const ModeEntry& e, double y, int deriv) {
    if (config == Config::H) {
        switch (deriv & 3) {
        case 0: return std::sin(y);
        case 1: return std::cos(y);
        case 2: return -std::sin(y);
        default: return -std::cos(y);
        }
    }
    const double a = e.one_minus_Cn;
    const double b = 1.0 + e.Cn;
    const double ep = std::exp(y);
    const double em = std::exp(-y);
    const double c = std::cos(y);
    const double s = std::sin(y);
    switch (deriv) {
    case 0: return 0.5 * (a * ep + b * em) - c + e.Cn * s;
    case 1: return 0.5 * (a * ep - b * em) + s + e.Cn * c;
    case 2: return 0.5 * (a * ep + b * em) + c - e.Cn * s;
    default: return 0.5 * (a * ep - b * em) - s - e.Cn * c;
    }
}

} // namespace

double characteristic_residual(Config config, double z) {
    switch (config) {
    case Config::H: return std::sin(z) * std::tanh(z);
    case Config::C: return std::cos(z) - sech(z);
    case Config::CF: return std::cos(z) + sech(z);
    }
    return 0.0;
}

std::vector<double> solve_characteristic_roots(Config config, int N) {
    if (N < 1) throw InvalidParams("mode count must be >= 1");
    if (config != Config::H && N > kMaxClampedModes)
        throw InvalidParams("at most " + std::to_string(kMaxClampedModes) + " modes are supported for C and CF");
    std::vector<double> roots;
    roots.reserve(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) {
        switch (config) {
        case Config::H: roots.push_back(pi * n); break;
        // cos z = +-sech z interlaces with the zeros of cos; one root per window.
        case Config::C: roots.push_back(bisect_root(config, n * pi, (n + 1) * pi)); break;
        case Config::CF: roots.push_back(bisect_root(config, (n - 1) * pi, n * pi)); break;
        }
    }
    return roots;
}

ModeBasis::ModeBasis(BoundaryConfig config, double L, double D, std::vector<ModeEntry> entries)
    : config_(config), L_(L), D_(D), entries_(std::move(entries)) {}

const ModeEntry& ModeBasis::entry(int n) const {
    if (n < 1 || n > size())
        throw IndexOutOfRange("mode index " + std::to_string(n) + " outside 1.." + std::to_string(size()));
    return entries_[static_cast<std::size_t>(n - 1)];
}

double ModeBasis::eval(int n, double x, int deriv) const {
    const ModeEntry& e = entry(n);
    if (deriv < 0 || deriv > 3) throw IndexOutOfRange("derivative order must be 0..3");
    return e.cn * std::pow(e.kappa, deriv) * raw_shape(config_.kind, e, e.kappa * x, deriv);
}

std::vector<double> simpson_weights(int intervals, double h) {
    std::vector<double> w(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i) {
        const double c = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        w[static_cast<std::size_t>(i)] = c * h / 3.0;
    }
    return w;
}

ModeBasis build_mode_basis(const BoundaryConfig& config, const BeamParams& params, int N) {
    require_valid(params, config);
    const auto roots = solve_characteristic_roots(config.kind, N);
    const double L = params.L;
    const int intervals = kDefaultNormalizationIntervals;
    const double h = L / intervals;
    const auto weights = simpson_weights(intervals, h);

    std::vector<ModeEntry> entries;
    entries.reserve(roots.size());
    for (int n = 1; n <= N; ++n) {
        ModeEntry e;
        e.n = n;
        const double z = roots[static_cast<std::size_t>(n - 1)];
        e.kappa = z / L;
        e.omega = std::sqrt(params.D) * e.kappa * e.kappa;
        if (config.kind == Config::H) {
            e.Cn = 0.0;
            e.one_minus_Cn = 1.0;
            e.cn = std::sqrt(2.0 / L);
        } else {
            e.Cn = shape_ratio(config.kind, z);
            e.one_minus_Cn = one_minus_shape_ratio(config.kind, z);
            double norm_sq = 0.0;
            for (int i = 0; i <= intervals; ++i) {
                const double r = raw_shape(config.kind, e, e.kappa * (i * h), 0);
                norm_sq += weights[static_cast<std::size_t>(i)] * r * r;
            }
            if (!(norm_sq > 1e-300) || !std::isfinite(norm_sq))
                throw NormalizationFailure("mode " + std::to_string(n) + " has vanishing L2 norm");
            e.cn = 1.0 / std::sqrt(norm_sq);
        }
        entries.push_back(e);
    }
    return ModeBasis(config, L, params.D, std::move(entries));
}

double eval_mode(const ModeBasis& basis, int n, double x, int deriv) { return basis.eval(n, x, deriv); }

Eigen::MatrixXd hinged_overlap_closed_form(int N, double L) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
    for (int m = 1; m <= N; ++m)
        for (int n = 1; n <= N; ++n) {
            if (m == n || (m + n) % 2 == 0) continue;
            S(m - 1, n - 1) = (2.0 * m * n / L) * 2.0 / static_cast<double>(n * n - m * m);
        }
    return S;
}

namespace {

struct SampledModes {
    std::vector<double> weights;
    Eigen::MatrixXd value; // (points, N)
    Eigen::MatrixXd slope; // (points, N)
};

SampledModes sample_modes(const ModeBasis& basis, int intervals, bool with_slope, const Execution& exec) {
    if (intervals < 512) throw InvalidParams("overlap quadrature needs at least 512 intervals");
    if (intervals % 2 != 0) ++intervals;
    const double h = basis.length() / intervals;
    SampledModes s;
    s.weights = simpson_weights(intervals, h);
    const int N = basis.size();
    s.value.resize(intervals + 1, N);
    if (with_slope) s.slope.resize(intervals + 1, N);
    parallel_for(static_cast<std::size_t>(N), exec, [&](std::size_t col) {
        const int n = static_cast<int>(col) + 1;
        for (int i = 0; i <= intervals; ++i) {
            const double x = i * h;
            s.value(i, n - 1) = basis.eval(n, x, 0);
            if (with_slope) s.slope(i, n - 1) = basis.eval(n, x, 1);
        }
    });
    return s;
}

} // namespace

OverlapMatrix overlap_matrix_quadrature(const ModeBasis& basis, int quadrature_points, const Execution& exec) {
    const auto s = sample_modes(basis, quadrature_points, true, exec);
    const int N = basis.size();
    const Eigen::Map<const Eigen::VectorXd> w(s.weights.data(), static_cast<Eigen::Index>(s.weights.size()));
    OverlapMatrix out;
    out.S.resize(N, N);
    parallel_for(static_cast<std::size_t>(N), exec, [&](std::size_t row) {
        const auto m = static_cast<Eigen::Index>(row);
        for (Eigen::Index n = 0; n < N; ++n)
            out.S(m, n) = (s.slope.col(m).array() * s.value.col(n).array() * w.array()).sum();
    });
    if (basis.config().kind == Config::CF) {
        out.boundary_values.resize(static_cast<std::size_t>(N));
        for (int n = 1; n <= N; ++n) out.boundary_values[static_cast<std::size_t>(n - 1)] = basis.eval(n, basis.length());
    }
    return out;
}

OverlapMatrix overlap_matrix(const ModeBasis& basis, int quadrature_points, const Execution& exec) {
    if (basis.config().kind == Config::H) {
        if (quadrature_points < 512) throw InvalidParams("overlap quadrature needs at least 512 intervals");
        return {hinged_overlap_closed_form(basis.size(), basis.length()), {}};
    }
    return overlap_matrix_quadrature(basis, quadrature_points, exec);
}

Eigen::MatrixXd gram_matrix(const ModeBasis& basis, int quadrature_points) {
    const auto s = sample_modes(basis, quadrature_points, false, Execution::serial());
    const Eigen::Map<const Eigen::VectorXd> w(s.weights.data(), static_cast<Eigen::Index>(s.weights.size()));
    return s.value.transpose() * w.asDiagonal() * s.value;
}

} // namespace beamflutter
