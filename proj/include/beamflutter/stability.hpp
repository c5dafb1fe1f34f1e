/**
 * @file stability.hpp
 * @brief Modal flutter prediction: perturbed-frequency eigenproblem, U_crit search, sweeps.
 *
 * Substituting w = e^{lambda t} sum_j a_j s_j into the linear beam and
 * projecting onto s_m gives the quadratic eigenproblem
 *
 *   (lambda^2 I + k lambda I + K) a = 0,   K_mm = D kappa_m^4,  K_mn = beta U (s_n', s_m),
 *
 * which is the harmonic ansatz e^{-i omega t} with lambda = -i omega. It is
 * solved through the companion linearisation [[0, I], [-K, -k I]].
 */
#pragma once

#include "beamflutter/model.hpp"
#include "beamflutter/modes.hpp"
#include "beamflutter/parallel.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace beamflutter {

inline constexpr int kDefaultModalTruncation = 6;

struct QepProblem {
    int N = 0;
    double damping = 0.0; ///< k = k0 + beta
    Eigen::MatrixXd K;
};

QepProblem assemble_qep(const ModeBasis& basis, const OverlapMatrix& overlaps, const BeamParams& params);

struct ModalSpectrum {
    std::vector<std::complex<double>> lambdas; ///< exponential rates, sorted by decreasing real part
    std::vector<std::complex<double>> omegas;  ///< omega = i lambda
    double max_growth = 0.0;                   ///< max Re lambda
    double dominant_frequency = 0.0;           ///< |Im lambda| at the max-growth root
    double max_residual = 0.0;                 ///< max ||(lambda^2 + k lambda + K) v|| / ||K||, unit v
};

ModalSpectrum solve_qep(const QepProblem& problem);

struct StabilityVerdict {
    bool unstable = false;
    double growth = 0.0;
    double frequency = 0.0;
};

StabilityVerdict classify(const ModalSpectrum& spectrum, double tol);

/// Default instability threshold on Re lambda: 1e-6 * omega_1.
double default_growth_tolerance(const ModeBasis& basis);

/// Basis and overlaps for one (configuration, L, D, N), reusable across U, beta, k0.
class ModalModel {
public:
    ModalModel(const BoundaryConfig& config, const BeamParams& params, int N = kDefaultModalTruncation,
               const Execution& exec = Execution::serial());

    const ModeBasis& basis() const noexcept { return basis_; }
    const OverlapMatrix& overlaps() const noexcept { return overlaps_; }

    ModalSpectrum spectrum(const BeamParams& params) const;
    double growth_tolerance() const { return default_growth_tolerance(basis_); }

private:
    ModeBasis basis_;
    OverlapMatrix overlaps_;
};

struct UcritResult {
    double u_crit = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    ModalSpectrum spectrum_at_crit;
    double omega_crit = 0.0;
};

struct UcritOptions {
    double tol = 1e-6;            ///< final bracket width (speed units)
    int scan_points = 64;         ///< forward scan resolution over u_range
    std::optional<double> growth_tol; ///< default: 1e-6 omega_1
};

UcritResult find_ucrit(const ModalModel& model, const BeamParams& params_base, std::pair<double, double> u_range,
                       const UcritOptions& options = {});

UcritResult find_ucrit(const BoundaryConfig& config, const BeamParams& params_base, std::pair<double, double> u_range,
                       double tol, int N = kDefaultModalTruncation);

enum class SweepAxis { L, Beta, K0 };

std::string_view to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(std::string_view s);

struct SweepPoint {
    double axis_value = 0.0;
    std::optional<UcritResult> result; ///< empty when no onset was found
    std::string error;
};

struct SweepRequest {
    BoundaryConfig config;
    BeamParams base;
    SweepAxis axis = SweepAxis::L;
    std::vector<double> values;
    std::pair<double, double> u_range{0.0, 1000.0};
    double tol = 1e-6;
    int N = kDefaultModalTruncation;
};

/// One U_crit per axis value; per-point failures are recorded, never thrown.
std::vector<SweepPoint> sweep_ucrit(const SweepRequest& request, const Execution& exec = Execution::openmp());

} // namespace beamflutter
