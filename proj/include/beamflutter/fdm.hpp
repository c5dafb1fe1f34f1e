/**
 * @file fdm.hpp
 * @brief Method-of-lines discretisation of the extensible piston-theory beam.
 *
 * Uniform nodes x_i = i h, i = 0..M-1. Boundary conditions enter through two
 * ghost nodes on each side; Dirichlet nodes (w = 0) stay at zero and are not
 * evolved. Interior operators are the 5-point fourth difference, the 3-point
 * second difference and the central first difference.
 */
#pragma once

#include "beamflutter/model.hpp"
#include "beamflutter/modes.hpp"

#include <Eigen/Dense>

namespace beamflutter {

struct Grid {
    int M = 0;
    double L = 0.0;
    double h = 0.0;
    Eigen::VectorXd x;
};

inline constexpr int kMinResolution = 32;

Grid build_grid(double L, int M);

/// 128 nodes for unit-scale beams, 512 for long panels (L > 10).
int default_resolution(double L);

struct BeamState {
    double t = 0.0;
    Eigen::VectorXd w;
    Eigen::VectorXd v;
};

/// Samples the initial profiles on the grid. ModeID needs `basis`.
BeamState sample_initial(const InitialData& data, const Grid& grid, const BoundaryConfig& config,
                         const ModeBasis* basis = nullptr);

/// Nodes carrying unknowns: [first, last] inclusive.
struct ActiveRange {
    int first = 1;
    int last = 0;
    int count() const { return last - first + 1; }
};

ActiveRange active_range(const BoundaryConfig& config, const Grid& grid);

/// ||w_x||^2 as sum_i h ((w_{i+1} - w_i) / h)^2.
double norm_wx_sq(const Eigen::VectorXd& w, const Grid& grid);

/// b1 - b2 ||w_x||^2.
double extensible_coefficient(const Eigen::VectorXd& w, const Grid& grid, const BeamParams& params);

/// Extended vector e with e[i + 2] = w[i] and two ghosts on each side.
/// The free-end ghosts solve w_xx(L) = 0 and D w_xxx(L) + coeff w_x(L) = 0
/// (coeff forced to 0 for the linear closure).
Eigen::VectorXd apply_ghosts(const BoundaryConfig& config, const Eigen::VectorXd& w, double coeff, const Grid& grid,
                             double D = 1.0);

/// Ghost-closed 3-point second difference at every node.
Eigen::VectorXd second_difference(const BoundaryConfig& config, const Eigen::VectorXd& w, const Grid& grid);

/// Ghost-closed central first difference at every node.
Eigen::VectorXd first_difference(const BoundaryConfig& config, const Eigen::VectorXd& w, double coeff,
                                 const Grid& grid, double D = 1.0);

/// Trapezoid weights h (h/2 at the two end nodes).
Eigen::VectorXd trapezoid_weights(const Grid& grid);

struct StateDerivative {
    Eigen::VectorXd dw;
    Eigen::VectorXd dv;
};

StateDerivative rhs(const BeamState& state, const Grid& grid, const BeamParams& params, const BoundaryConfig& config);

/// Allocation-free spatial operator used by the integrator.
class BeamOperator {
public:
    BeamOperator(const Grid& grid, const BeamParams& params, const BoundaryConfig& config);

    const Grid& grid() const noexcept { return grid_; }
    const BeamParams& params() const noexcept { return params_; }
    const BoundaryConfig& config() const noexcept { return config_; }
    ActiveRange range() const noexcept { return range_; }

    double coefficient(const Eigen::VectorXd& w) const;

    /// a = -D d4 w - coeff d2 w - beta U d1 w - k v on active nodes, 0 elsewhere.
    void acceleration(const Eigen::VectorXd& w, const Eigen::VectorXd& v, double coeff, Eigen::VectorXd& a) const;

    /// Pentadiagonal d(a)/d(w) at fixed coeff, LAPACK general-band layout
    /// (kl = ku = 2, ldab = 7, column-major, size 7 x M).
    void displacement_jacobian(double coeff, Eigen::MatrixXd& band) const;

private:
    void extend(const Eigen::VectorXd& w, double coeff) const;

    Grid grid_;
    BeamParams params_;
    BoundaryConfig config_;
    ActiveRange range_;
    mutable Eigen::VectorXd ext_;
    mutable Eigen::VectorXd probe_w_;
    mutable Eigen::VectorXd probe_v_;
    mutable Eigen::VectorXd probe_a_;
};

/// Midpoint displacement (C, H; cubic interpolation when no node sits at L/2)
/// or tip displacement (CF).
double observable(const Eigen::VectorXd& w, const Grid& grid, const BoundaryConfig& config);

} // namespace beamflutter
