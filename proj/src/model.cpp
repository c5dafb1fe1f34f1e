#include "beamflutter/model.hpp"

#include "beamflutter/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace beamflutter {

std::string_view to_string(Config c) {
    switch (c) {
    case Config::C: return "C";
    case Config::H: return "H";
    case Config::CF: return "CF";
    }
    return "?";
}

std::string_view to_string(FreeEnd f) {
    return f == FreeEnd::PhysicalNonlinear ? "physical" : "linear";
}

Config config_from_string(std::string_view s) {
    if (s == "C") return Config::C;
    if (s == "H") return Config::H;
    if (s == "CF") return Config::CF;
    throw InvalidParams("unknown configuration '" + std::string(s) + "' (expected C, H or CF)");
}

FreeEnd free_end_from_string(std::string_view s) {
    if (s == "physical") return FreeEnd::PhysicalNonlinear;
    if (s == "linear") return FreeEnd::LinearNonPhysical;
    throw InvalidParams("unknown free-end closure '" + std::string(s) + "' (expected physical or linear)");
}

ValidationReport validate_params(const BeamParams& p, const BoundaryConfig& /*config*/) {
    ValidationReport report;
    auto check = [&](bool ok, const char* field, const char* rule) {
        if (!ok) report.violations.push_back({field, rule});
    };
    auto finite = [](double v) { return std::isfinite(v); };

    check(finite(p.D) && p.D > 0.0, "d", "D > 0");
    check(finite(p.L) && p.L > 0.0, "l", "L > 0");
    check(finite(p.beta) && p.beta >= 0.0, "beta", "beta >= 0");
    check(finite(p.U) && p.U >= 0.0, "u", "U >= 0");
    check(finite(p.k0), "k0", "k0 finite");
    check(finite(p.b1), "b1", "b1 finite");
    check(finite(p.b2) && p.b2 >= 0.0, "b2", "b2 >= 0");
    if (finite(p.k0) && finite(p.beta))
        check(p.k0 + p.beta >= 0.0, "k0", "k = k0 + beta >= 0");
    return report;
}

void require_valid(const BeamParams& params, const BoundaryConfig& config) {
    const auto report = validate_params(params, config);
    if (report.ok()) return;
    std::ostringstream os;
    os << "invalid beam parameters:";
    for (const auto& v : report.violations) os << " [" << v.field << ": " << v.rule << "]";
    throw InvalidParams(os.str());
}

namespace {

double table_lookup(const std::vector<double>& table, double xhat) {
    if (table.empty()) return 0.0;
    if (table.size() == 1) return table.front();
    const double pos = std::clamp(xhat, 0.0, 1.0) * static_cast<double>(table.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), table.size() - 2);
    const double frac = pos - static_cast<double>(i);
    return table[i] * (1.0 - frac) + table[i + 1] * frac;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

double initial_displacement(const InitialData& data, Config config, double x) {
    return std::visit(
        overloaded{
            [](const ModeID&) -> double {
                throw MissingBasis("mode initial data must be sampled through a ModeBasis");
            },
            [&](const PolynomialID&) {
                if (config == Config::CF)
                    return x * x * (10.0 + x * (-20.0 + x * (15.0 - 4.0 * x)));
                const double q = x * (1.0 - x);
                return q * q * q;
            },
            [](const ElementaryIV&) { return 0.0; },
            [&](const SineID& s) { return s.eps * std::sin(2.0 * std::numbers::pi * x); },
            [](const ZeroID&) { return 0.0; },
            [&](const CustomID& c) { return table_lookup(c.w0, x); },
        },
        data);
}

double initial_velocity(const InitialData& data, Config config, double x) {
    return std::visit(
        overloaded{
            [](const ModeID&) { return 0.0; },
            [](const PolynomialID&) { return 0.0; },
            [&](const ElementaryIV& e) {
                return config == Config::CF ? e.scale * x : e.scale * x * (1.0 - x);
            },
            [&](const SineID&) { return x * (1.0 - x); },
            [](const ZeroID&) { return 0.0; },
            [&](const CustomID& c) { return table_lookup(c.w1, x); },
        },
        data);
}

std::string describe(const InitialData& data) {
    return std::visit(
        overloaded{
            [](const ModeID& m) { return "mode" + std::to_string(m.n); },
            [](const PolynomialID&) { return std::string("polynomial"); },
            [](const ElementaryIV& e) {
                std::ostringstream os;
                os << "elementary(" << e.scale << ")";
                return os.str();
            },
            [](const SineID& s) {
                std::ostringstream os;
                os << "sine(" << s.eps << ")";
                return os.str();
            },
            [](const ZeroID&) { return std::string("zero"); },
            [](const CustomID&) { return std::string("custom"); },
        },
        data);
}

} // namespace beamflutter
