#include "beamflutter/energy.hpp"

namespace beamflutter {

double velocity_norm_sq(const Eigen::VectorXd& v, const Grid& grid) {
    return trapezoid_weights(grid).dot(v.cwiseAbs2());
}

double flow_pairing(const Eigen::VectorXd& w, const Eigen::VectorXd& v, const Grid& grid, const BeamParams& params,
                    const BoundaryConfig& config) {
    const Eigen::VectorXd wx =
        first_difference(config, w, extensible_coefficient(w, grid, params), grid, params.D);
    return trapezoid_weights(grid).dot(wx.cwiseProduct(v));
}

EnergySample energies(const BeamState& state, const Grid& grid, const BeamParams& params,
                      const BoundaryConfig& config) {
    const Eigen::VectorXd wt = trapezoid_weights(grid);
    const Eigen::VectorXd wxx = second_difference(config, state.w, grid);
    const double bend = wt.dot(wxx.cwiseAbs2());
    const double kin = wt.dot(state.v.cwiseAbs2());
    const double n = norm_wx_sq(state.w, grid);

    EnergySample s;
    s.t = state.t;
    s.E = 0.5 * (params.D * bend + kin);
    s.Pi = 0.25 * (params.b2 * n * n - 2.0 * params.b1 * n);
    s.scriptE = s.E + s.Pi;
    s.Ehat = s.E + 0.25 * params.b2 * n * n;
    return s;
}

} // namespace beamflutter
