/**
 * @file energy.hpp
 * @brief Discrete energy functionals.
 *
 *   E     = 1/2 (D ||w_xx||^2 + ||w_t||^2)
 *   Pi    = 1/4 (b2 ||w_x||^4 - 2 b1 ||w_x||^2)
 *   scrE  = E + Pi
 *   Ehat  = E + b2/4 ||w_x||^4
 *
 * ||w_xx|| and ||w_t|| use trapezoid weights with the ghost-closed second
 * difference; ||w_x||^2 is norm_wx_sq.
 */
#pragma once

#include "beamflutter/fdm.hpp"

namespace beamflutter {

struct EnergySample {
    double t = 0.0;
    double E = 0.0;
    double Pi = 0.0;
    double scriptE = 0.0;
    double Ehat = 0.0;
};

EnergySample energies(const BeamState& state, const Grid& grid, const BeamParams& params,
                      const BoundaryConfig& config);

/// ||v||^2 with trapezoid weights.
double velocity_norm_sq(const Eigen::VectorXd& v, const Grid& grid);

/// (w_x, v) with trapezoid weights and the ghost-closed central difference.
double flow_pairing(const Eigen::VectorXd& w, const Eigen::VectorXd& v, const Grid& grid, const BeamParams& params,
                    const BoundaryConfig& config);

} // namespace beamflutter
