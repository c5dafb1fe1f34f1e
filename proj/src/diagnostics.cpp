#include "beamflutter/diagnostics.hpp"

#include "beamflutter/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace beamflutter {

double fit_growth_rate(const std::vector<EnergySample>& trace, std::pair<double, double> window) {
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int n = 0;
    for (const auto& s : trace) {
        if (s.t < window.first || s.t > window.second) continue;
        if (!(s.E > 0.0)) throw NonpositiveEnergy("energy " + std::to_string(s.E) + " at t=" + std::to_string(s.t));
        ++n;
    }
    if (n < kMinGrowthSamples)
        throw NonpositiveEnergy("growth fit needs " + std::to_string(kMinGrowthSamples) + " samples in the window, got " +
                                std::to_string(n));
    // centre t for conditioning
    double tbar = 0.0;
    for (const auto& s : trace)
        if (s.t >= window.first && s.t <= window.second) tbar += s.t;
    tbar /= n;
    for (const auto& s : trace) {
        if (s.t < window.first || s.t > window.second) continue;
        const double x = s.t - tbar;
        const double y = std::log(s.E);
        st += x;
        sy += y;
        stt += x * x;
        sty += x * y;
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    return 0.5 * slope;
}

std::vector<Peak> find_peaks(const std::vector<double>& t, const std::vector<double>& y, bool maxima) {
    std::vector<Peak> out;
    const double s = maxima ? 1.0 : -1.0;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        const double a = s * y[i - 1], b = s * y[i], c = s * y[i + 1];
        if (!(b > a && b >= c)) continue;
        const double denom = a - 2.0 * b + c;
        double off = 0.0, val = b;
        if (denom < 0.0) {
            off = 0.5 * (a - c) / denom;
            val = b - 0.25 * (a - c) * off;
        }
        const double dt = off >= 0 ? t[i + 1] - t[i] : t[i] - t[i - 1];
        out.push_back({t[i] + off * dt, s * val});
    }
    return out;
}

namespace {

std::pair<double, double> mean_and_relstd(const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    return {mean, mean != 0.0 ? std::sqrt(var) / std::abs(mean) : (var > 0 ? INFINITY : 0.0)};
}

} // namespace

LcoReport detect_lco(const std::vector<double>& t, const std::vector<double>& y, const LcoOptions& options) {
    if (t.size() != y.size()) throw DimensionMismatch("time and value series differ in length");
    LcoReport r;
    if (t.size() < 3) throw InsufficientPeaks("series too short");
    const double t_cut = t.front() + options.transient_cut * (t.back() - t.front());
    std::vector<Peak> peaks;
    for (const auto& p : find_peaks(t, y, true))
        if (p.t >= t_cut) peaks.push_back(p);
    if (peaks.size() < 4)
        throw InsufficientPeaks("only " + std::to_string(peaks.size()) + " maxima after the transient cut");
    r.conclusive = static_cast<int>(peaks.size()) >= options.conclusive_peaks;
    const std::size_t use = std::min<std::size_t>(peaks.size(), static_cast<std::size_t>(options.window_peaks) + 1);
    const std::vector<Peak> win(peaks.end() - static_cast<long>(use), peaks.end());

    // last P maxima for the amplitude, the P spacings ending there for the period
    std::vector<double> amps, periods;
    for (std::size_t i = 0; i < win.size(); ++i) {
        if (i > 0) periods.push_back(win[i].t - win[i - 1].t);
        if (i > 0 || use <= static_cast<std::size_t>(options.window_peaks))
            amps.push_back(std::abs(win[i].value));
    }
    const auto [amp, amp_spread] = mean_and_relstd(amps);
    const auto [per, per_spread] = mean_and_relstd(periods);
    r.amplitude = amp;
    r.period = per;
    r.amplitude_spread = amp_spread;
    r.period_spread = per_spread;
    r.relative_spread = std::max(amp_spread, per_spread);
    r.peaks_used = static_cast<int>(amps.size());
    r.converged = r.relative_spread < options.threshold;
    return r;
}

double profile_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool allow_sign_flip) {
    if (a.size() != b.size()) throw DimensionMismatch("profiles differ in length");
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    if (scale == 0.0) return 0.0;
    double d = (a - b).cwiseAbs().maxCoeff();
    if (allow_sign_flip) d = std::min(d, (a + b).cwiseAbs().maxCoeff());
    return d / scale;
}

SteadyStateReport detect_steady(const Trajectory& traj, const SteadyOptions& options) {
    SteadyStateReport r;
    r.profile = traj.final_state.w;
    r.residual = traj.final_state.v.size() ? traj.final_state.v.cwiseAbs().maxCoeff() : 0.0;
    const double t_end = traj.final_state.t;
    // snapshot closest to 0.9 t_end, excluding the final one
    const Snapshot* ref = nullptr;
    for (const auto& s : traj.snapshots) {
        if (s.t >= t_end) continue;
        if (ref == nullptr || std::abs(s.t - 0.9 * t_end) < std::abs(ref->t - 0.9 * t_end)) ref = &s;
    }
    if (ref == nullptr) {
        r.profile_change = INFINITY;
    } else {
        const double scale = std::max(r.profile.cwiseAbs().maxCoeff(), options.profile_floor);
        r.profile_change = (r.profile - ref->w).cwiseAbs().maxCoeff() / scale;
    }
    r.is_steady = !traj.diverged() && r.residual < options.velocity_tol && r.profile_change < options.profile_tol;
    return r;
}

std::vector<double> energy_identity_residual(const Trajectory& traj) {
    const auto& p = traj.params;
    std::vector<double> res(traj.t.size());
    if (traj.t.empty()) return res;
    const double e0 = traj.energy.front().E;
    double damp = 0.0, flow = 0.0;
    res[0] = 0.0;
    for (std::size_t i = 1; i < traj.t.size(); ++i) {
        const double dt = traj.t[i] - traj.t[i - 1];
        damp += 0.5 * dt * (traj.velocity_sq[i] + traj.velocity_sq[i - 1]);
        flow += 0.5 * dt * (traj.flow_pairing[i] + traj.flow_pairing[i - 1]);
        res[i] = traj.energy[i].E + p.k() * damp + p.beta * p.U * flow - e0;
    }
    return res;
}

double late_plateau(const std::vector<EnergySample>& trace, double fraction) {
    if (trace.empty()) return 0.0;
    const double t_end = trace.back().t;
    const double t_start = t_end - fraction * (t_end - trace.front().t);
    double sum = 0.0;
    int n = 0;
    for (const auto& s : trace)
        if (s.t >= t_start) {
            sum += s.scriptE;
            ++n;
        }
    return sum / n;
}

double window_mean(const std::vector<EnergySample>& trace, double a, double b, bool script) {
    if (trace.empty()) return 0.0;
    const double t0 = trace.front().t;
    const double span = trace.back().t - t0;
    const double lo = t0 + a * span;
    const double hi = t0 + b * span;
    double sum = 0.0;
    int n = 0;
    for (const auto& s : trace)
        if (s.t >= lo && s.t <= hi) {
            sum += script ? s.scriptE : s.E;
            ++n;
        }
    return n ? sum / n : 0.0;
}

double peak_growth_ratio(const std::vector<EnergySample>& trace) {
    if (trace.size() < 2) return 1.0;
    const double t_mid = 0.5 * (trace.front().t + trace.back().t);
    double early = 0.0, late = 0.0;
    for (const auto& s : trace) {
        double& m = s.t <= t_mid ? early : late;
        m = std::max(m, s.scriptE);
    }
    return early > 0.0 ? late / early : INFINITY;
}

double relative_drift(const std::vector<EnergySample>& trace, bool script) {
    if (trace.empty()) return 0.0;
    const double ref = script ? trace.front().scriptE : trace.front().E;
    double worst = 0.0;
    for (const auto& s : trace) worst = std::max(worst, std::abs((script ? s.scriptE : s.E) / ref - 1.0));
    return worst;
}

} // namespace beamflutter
