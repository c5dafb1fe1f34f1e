/**
 * @file integrator.hpp
 * @brief Adaptive TR-BDF2 time stepping of the semi-discrete beam.
 *
 * TR-BDF2 (gamma = 2 - sqrt 2) is L-stable and second order, with an embedded
 * third-order error estimate. Stage equations are solved by a quasi-Newton
 * iteration whose Jacobian freezes b1 - b2 ||w_x||^2 at the step start, so the
 * nonlocal coefficient is lagged inside the linear algebra but the stage
 * residuals use the current iterate. With b2 = 0 the problem is linear and one
 * iteration is exact.
 */
#pragma once

#include "beamflutter/energy.hpp"
#include "beamflutter/fdm.hpp"
#include "beamflutter/parallel.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace beamflutter {

struct IntegrateOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double sample_dt = 0.0;             ///< 0: horizon / 2000
    std::vector<double> snapshot_times; ///< empty: 0, T/10, ..., T
    double divergence_threshold = 1e12; ///< max|w| that ends a run as diverged
    double initial_step = 0.0;          ///< 0: automatic
    int max_newton = 10;
    double newton_tol = 1e-3; ///< iteration stop, in error-weighted units
    long max_steps = 200'000'000;
};

enum class RunStatus { Completed, Diverged, StepSizeUnderflow, StepLimit };

std::string_view to_string(RunStatus s);

struct Snapshot {
    double t = 0.0;
    Eigen::VectorXd w;
    Eigen::VectorXd v;
};

struct IntegratorStats {
    long steps = 0;
    long rejected = 0;
    long newton_failures = 0;
    long newton_iterations = 0;
    long rhs_evaluations = 0;
    long factorizations = 0;
};

struct Trajectory {
    Grid grid;
    BoundaryConfig config;
    BeamParams params;

    std::vector<double> t;
    std::vector<double> observable;
    std::vector<EnergySample> energy;
    std::vector<double> velocity_sq;  ///< ||w_t||^2 per sample
    std::vector<double> flow_pairing; ///< (w_x, w_t) per sample

    std::vector<Snapshot> snapshots; ///< requested times, then the final state
    BeamState final_state;
    RunStatus status = RunStatus::Completed;
    std::string diagnosis;
    IntegratorStats stats;

    bool diverged() const noexcept { return status != RunStatus::Completed; }
};

Trajectory integrate(const BeamState& initial, const BeamParams& params, const BoundaryConfig& config,
                     const Grid& grid, double horizon, const IntegrateOptions& options = {});

/// One independent integration of a battery.
struct SimulationCase {
    BeamState initial;
    BeamParams params;
    BoundaryConfig config;
    Grid grid;
    double horizon = 1.0;
    IntegrateOptions options;
};

struct CaseResult {
    std::optional<Trajectory> trajectory;
    std::string error; ///< set when the case threw
};

/// Runs every case; results keep the input order whatever the execution policy.
std::vector<CaseResult> run_battery(const std::vector<SimulationCase>& cases,
                                    const Execution& exec = Execution::openmp());

} // namespace beamflutter
