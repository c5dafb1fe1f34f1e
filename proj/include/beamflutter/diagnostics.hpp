/**
 * @file diagnostics.hpp
 * @brief Regime descriptors extracted from trajectories: growth rates, limit
 * cycles, steady (buckled) states, energy bookkeeping.
 */
#pragma once

#include "beamflutter/energy.hpp"
#include "beamflutter/integrator.hpp"

#include <utility>
#include <vector>

namespace beamflutter {

inline constexpr int kMinGrowthSamples = 16;

/// Least-squares slope of log E over samples with t in [t0, t1], halved, so
/// the result is an amplitude rate comparable to max Re lambda.
double fit_growth_rate(const std::vector<EnergySample>& trace, std::pair<double, double> window);

struct Peak {
    double t = 0.0;
    double value = 0.0;
};

/// Local maxima (or minima) of a sampled series, refined by the vertex of the
/// three-point parabola.
std::vector<Peak> find_peaks(const std::vector<double>& t, const std::vector<double>& y, bool maxima = true);

struct LcoOptions {
    double transient_cut = 0.5; ///< fraction of the time span discarded
    int window_peaks = 10;      ///< P
    double threshold = 0.02;
    int conclusive_peaks = 20;
};

struct LcoReport {
    bool converged = false;
    bool conclusive = false; ///< at least conclusive_peaks maxima after the cut
    double amplitude = 0.0;  ///< mean peak value over the window
    double period = 0.0;     ///< mean spacing of successive maxima
    double relative_spread = 0.0;
    double amplitude_spread = 0.0;
    double period_spread = 0.0;
    int peaks_used = 0;
};

LcoReport detect_lco(const std::vector<double>& t, const std::vector<double>& y, const LcoOptions& options = {});

struct SteadyOptions {
    double velocity_tol = 1e-3;  ///< bound on ||w_t||_inf at the final time
    double profile_tol = 1e-3;   ///< relative profile change over the last 10%
    double profile_floor = 1e-3; ///< scale floor for near-zero profiles
};

struct SteadyStateReport {
    bool is_steady = false;
    Eigen::VectorXd profile;
    double residual = 0.0;       ///< ||w_t||_inf at the final time
    double profile_change = 0.0; ///< relative change since ~0.9 T
};

SteadyStateReport detect_steady(const Trajectory& traj, const SteadyOptions& options = {});

/// Relative sup-norm distance ||a - s b|| / max(||a||, ||b||) with s = +1,
/// or the better of s = +-1 when allow_sign_flip.
double profile_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool allow_sign_flip = false);

/// E(t) + k int ||w_t||^2 + beta U int (w_x, w_t) - E(0) at every sample,
/// time integrals by the trapezoid rule. Meaningful for b1 = b2 = 0.
std::vector<double> energy_identity_residual(const Trajectory& traj);

/// Mean of scriptE over the final `fraction` of the trace.
double late_plateau(const std::vector<EnergySample>& trace, double fraction = 0.2);

/// Mean of E (or scriptE) over the fractional time window [a, b] of the trace.
double window_mean(const std::vector<EnergySample>& trace, double a, double b, bool script = false);

/// max scriptE over the second half of the trace over the max over the first half.
double peak_growth_ratio(const std::vector<EnergySample>& trace);

/// max_t |scriptE(t) / scriptE(0) - 1|.
double relative_drift(const std::vector<EnergySample>& trace, bool script = true);

} // namespace beamflutter
