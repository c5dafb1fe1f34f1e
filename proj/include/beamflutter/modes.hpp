/**
 * @file modes.hpp
 * @brief In-vacuo Euler-Bernoulli eigenpairs for the C, H and CF configurations.
 *
 * Mode shapes (y = kappa x):
 *   H      s(x) = cn sin(y)
 *   C, CF  s(x) = cn [(cosh y - cos y) - Cn (sinh y - sin y)]
 * with kappa_n L the n-th positive root of the characteristic equation and
 * cn > 0 the L2(0, L) normalisation. The hyperbolic part is evaluated as
 * ((1 - Cn) e^y + (1 + Cn) e^-y) / 2 with 1 - Cn computed in closed form, so
 * no cosh/sinh cancellation occurs for large kappa x.
 */
#pragma once

#include "beamflutter/model.hpp"
#include "beamflutter/parallel.hpp"

#include <Eigen/Dense>

#include <vector>

namespace beamflutter {

inline constexpr int kMaxClampedModes = 10;

/// Characteristic equation divided by cosh(z):
///   H: sin z tanh z,  C: cos z - 1/cosh z,  CF: cos z + 1/cosh z.
double characteristic_residual(Config config, double z);

/// First N roots kappa_n L (N <= 10 for C and CF). H returns n*pi exactly.
std::vector<double> solve_characteristic_roots(Config config, int N);

struct ModeEntry {
    int n = 0;
    double kappa = 0.0; ///< wavenumber kappa_n (1/length)
    double Cn = 0.0;    ///< shape ratio (0 for H)
    double cn = 0.0;    ///< L2 normalisation constant
    double omega = 0.0; ///< sqrt(D) kappa_n^2
    double one_minus_Cn = 1.0;
};

class ModeBasis {
public:
    ModeBasis(BoundaryConfig config, double L, double D, std::vector<ModeEntry> entries);

    const BoundaryConfig& config() const noexcept { return config_; }
    double length() const noexcept { return L_; }
    double stiffness() const noexcept { return D_; }
    int size() const noexcept { return static_cast<int>(entries_.size()); }
    const std::vector<ModeEntry>& entries() const noexcept { return entries_; }
    const ModeEntry& entry(int n) const; ///< 1-based

    /// s_n^{(deriv)}(x), deriv in 0..3.
    double eval(int n, double x, int deriv = 0) const;

private:
    BoundaryConfig config_;
    double L_;
    double D_;
    std::vector<ModeEntry> entries_;
};

inline constexpr int kDefaultNormalizationIntervals = 4096;

ModeBasis build_mode_basis(const BoundaryConfig& config, const BeamParams& params, int N);

double eval_mode(const ModeBasis& basis, int n, double x, int deriv = 0);

/// S(m, n) = (d/dx s_m, s_n) for 0-based m, n.
struct OverlapMatrix {
    Eigen::MatrixXd S;
    std::vector<double> boundary_values; ///< s_n(L), filled for CF
};

inline constexpr int kDefaultQuadraturePoints = 4096;

/// H: closed form; C and CF: composite Simpson (quadrature_points intervals, >= 512).
OverlapMatrix overlap_matrix(const ModeBasis& basis, int quadrature_points = kDefaultQuadraturePoints,
                             const Execution& exec = Execution::serial());

/// Composite-Simpson evaluation for any configuration (the quadrature route).
OverlapMatrix overlap_matrix_quadrature(const ModeBasis& basis, int quadrature_points = kDefaultQuadraturePoints,
                                        const Execution& exec = Execution::serial());

/// (2 m n / L)(1 - (-1)^{m+n}) / (n^2 - m^2), zero diagonal (1-based m, n).
Eigen::MatrixXd hinged_overlap_closed_form(int N, double L);

/// Gram matrix (s_m, s_n) by composite Simpson.
Eigen::MatrixXd gram_matrix(const ModeBasis& basis, int quadrature_points = kDefaultQuadraturePoints);

/// Composite Simpson weights for `intervals` (even) uniform intervals of width h.
std::vector<double> simpson_weights(int intervals, double h);

} // namespace beamflutter
