/**
 * @file model.hpp
 * @brief Shared vocabulary: boundary configuration, beam coefficients, initial data.
 *
 * The model is the extensible (Krieger) beam with linear piston-theory loading,
 *
 *   w_tt + D w_xxxx + k0 w_t + [b1 - b2 ||w_x||^2] w_xx = -beta (w_t + U w_x),
 *
 * restricted to zero rotational inertia, zero square-root damping and zero
 * static pressure.
 */
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace beamflutter {

enum class Config { C, H, CF };

/// Closure used at the free end of a cantilever.
enum class FreeEnd {
    PhysicalNonlinear, ///< D w_xxx + (b1 - b2||w_x||^2) w_x = 0, energy-consistent
    LinearNonPhysical  ///< w_xxx = 0, the textbook free end (no energy balance when b2 > 0)
};

struct BoundaryConfig {
    Config kind = Config::C;
    FreeEnd cf_free_end = FreeEnd::PhysicalNonlinear;

    /// cf_free_end is normalised to PhysicalNonlinear unless kind == CF.
    static BoundaryConfig make(Config kind, FreeEnd free_end = FreeEnd::PhysicalNonlinear) {
        return {kind, kind == Config::CF ? free_end : FreeEnd::PhysicalNonlinear};
    }

    bool operator==(const BoundaryConfig&) const = default;
};

std::string_view to_string(Config c);
std::string_view to_string(FreeEnd f);
Config config_from_string(std::string_view s);
FreeEnd free_end_from_string(std::string_view s);

/// Scalar model coefficients. Rotational inertia, square-root damping and
/// static pressure are identically zero in this model and are not stored.
struct BeamParams {
    double D = 1.0;    ///< bending stiffness
    double L = 1.0;    ///< length
    double beta = 1.0; ///< piston-theory density coefficient
    double U = 0.0;    ///< flow speed
    double k0 = 0.0;   ///< imposed (frictional) damping, may be negative down to -beta
    double b1 = 0.0;   ///< in-axis pre-stress, > 0 compression
    double b2 = 0.0;   ///< extensible restoring coefficient

    static constexpr double alpha = 0.0;
    static constexpr double k1 = 0.0;

    /// Total damping k = k0 + beta.
    double k() const noexcept { return k0 + beta; }

    bool operator==(const BeamParams&) const = default;
};

struct Violation {
    std::string field;
    std::string rule;
    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool operator==(const ValidationReport&) const = default;
};

/// Pure check of the BeamParams invariants; never throws.
ValidationReport validate_params(const BeamParams& params, const BoundaryConfig& config);

/// Throws InvalidParams listing every violation when the report is not ok.
void require_valid(const BeamParams& params, const BoundaryConfig& config);

// ---------------------------------------------------------------------------
// Initial data. Every profile is a function of xhat = x / L.

struct ModeID {
    int n = 1;
    bool operator==(const ModeID&) const = default;
};
struct PolynomialID {
    bool operator==(const PolynomialID&) const = default;
};
struct ElementaryIV {
    double scale = 1.0;
    bool operator==(const ElementaryIV&) const = default;
};
struct SineID {
    double eps = 0.0;
    bool operator==(const SineID&) const = default;
};
struct ZeroID {
    bool operator==(const ZeroID&) const = default;
};
/// Tabulated displacement / velocity on a uniform xhat grid over [0, 1]
/// (linear interpolation in between). Either table may be empty (= zero).
struct CustomID {
    std::vector<double> w0;
    std::vector<double> w1;
    bool operator==(const CustomID&) const = default;
};

using InitialData = std::variant<ModeID, PolynomialID, ElementaryIV, SineID, ZeroID, CustomID>;

/// Displacement profile w0(xhat) for every variant except ModeID.
double initial_displacement(const InitialData& data, Config config, double xhat);
/// Velocity profile w1(xhat) for every variant except ModeID.
double initial_velocity(const InitialData& data, Config config, double xhat);

std::string describe(const InitialData& data);

} // namespace beamflutter
