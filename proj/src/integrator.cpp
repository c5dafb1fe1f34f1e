#include "beamflutter/integrator.hpp"

#include "beamflutter/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace beamflutter {

std::string_view to_string(RunStatus s) {
    switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::StepSizeUnderflow: return "step-size-underflow";
    case RunStatus::StepLimit: return "step-limit";
    }
    return "?";
}

namespace {

constexpr double kGamma = 2.0 - std::numbers::sqrt2;
constexpr double kDiag = kGamma / 2.0;
constexpr double kBdfA = 1.0 / (kGamma * (2.0 - kGamma));
constexpr double kBdfB = (1.0 - kGamma) * (1.0 - kGamma) / (kGamma * (2.0 - kGamma));
constexpr double kErrConst = (-3.0 * kGamma * kGamma + 4.0 * kGamma - 2.0) / (12.0 * (2.0 - kGamma));

class Stepper {
public:
    Stepper(const BeamOperator& op, const IntegrateOptions& opt, IntegratorStats& stats)
        : op_(op), opt_(opt), stats_(stats), range_(op.range()), M_(op.grid().M), ipiv_(M_),
          gband_(7, M_), rw_(M_), rv_(M_), tmp_(M_), fw_(M_), fv_(M_) {
        linear_ = op.params().b2 == 0.0;
        sqrt_d_ = std::sqrt(op.params().D);
    }

    void eval(const Eigen::VectorXd& w, const Eigen::VectorXd& v, Eigen::VectorXd& fw, Eigen::VectorXd& fv) {
        fw = v;
        op_.acceleration(w, v, op_.coefficient(w), fv);
        ++stats_.rhs_evaluations;
    }

    /// Factors G = (1 + c k) I - c^2 Lw with Lw frozen at `coeff`. The previous
    /// factorisation is kept while c is unchanged and coeff has barely moved.
    bool factor(double c, double coeff) {
        const double scale = std::abs(coeff_) + op_.params().D / (op_.grid().L * op_.grid().L);
        if (valid_ && c == c_ && std::abs(coeff - coeff_) <= 1e-3 * scale) return true;
        op_.displacement_jacobian(coeff, lband_);
        c_ = c;
        coeff_ = coeff;
        const double k = op_.params().k();
        gband_ = -c * c * lband_;
        for (int j = 0; j < M_; ++j) {
            const bool active = j >= range_.first && j <= range_.last;
            gband_(4, j) += 1.0 + (active ? c * k : 0.0);
        }
        ++stats_.factorizations;
        const lapack_int info = LAPACKE_dgbtrf_work(LAPACK_COL_MAJOR, M_, M_, 2, 2, gband_.data(), 7, ipiv_.data());
        valid_ = info == 0;
        return valid_;
    }

    void invalidate() { valid_ = false; }

    /// (I - cJ) d = r, in place on (rw, rv).
    void solve(Eigen::VectorXd& rw, Eigen::VectorXd& rv) {
        band_multiply(rw, tmp_);
        rv += c_ * tmp_;
        lu_solve(rv);
        rw += c_ * rv;
    }

    /// Weighted RMS with one scale per field: atol + rtol max(||w||_inf) for w and
    /// atol + rtol max(||v||_inf, sqrt(D) ||w_xx||_inf) for v, the pairing of the energy norm.
    double wrms(const Eigen::VectorXd& dw, const Eigen::VectorXd& dv, const Eigen::VectorXd& w0,
                const Eigen::VectorXd& v0, const Eigen::VectorXd& w1, const Eigen::VectorXd& v1) const {
        const double sw = opt_.atol + opt_.rtol * std::max(w0.cwiseAbs().maxCoeff(), w1.cwiseAbs().maxCoeff());
        const double vref = std::max({v0.cwiseAbs().maxCoeff(), v1.cwiseAbs().maxCoeff(), bending_scale(w0),
                                      bending_scale(w1)});
        const double sv = opt_.atol + opt_.rtol * vref;
        double sum = 0.0;
        for (int i = range_.first; i <= range_.last; ++i) sum += (dw[i] / sw) * (dw[i] / sw) + (dv[i] / sv) * (dv[i] / sv);
        return std::sqrt(sum / (2.0 * range_.count()));
    }

    /// Solves (w, v) - c f(w, v) = (bw, bv) starting from the given guess.
    bool stage(const Eigen::VectorXd& bw, const Eigen::VectorXd& bv, Eigen::VectorXd& w, Eigen::VectorXd& v) {
        double prev = 0.0;
        for (int it = 0; it < opt_.max_newton; ++it) {
            eval(w, v, fw_, fv_);
            rw_ = bw + c_ * fw_ - w;
            rv_ = bv + c_ * fv_ - v;
            solve(rw_, rv_);
            w += rw_;
            v += rv_;
            ++stats_.newton_iterations;
            if (!w.allFinite() || !v.allFinite()) return false;
            if (linear_) return true;
            const double nrm = wrms(rw_, rv_, w, v, w, v);
            if (nrm <= opt_.newton_tol) return true;
            if (it > 0 && nrm > 0.9 * prev) return false;
            prev = nrm;
        }
        return false;
    }

private:
    /// sqrt(D) max |w_xx| over interior nodes.
    double bending_scale(const Eigen::VectorXd& w) const {
        double m = 0.0;
        for (int i = 1; i + 1 < M_; ++i) m = std::max(m, std::abs(w[i + 1] - 2.0 * w[i] + w[i - 1]));
        return sqrt_d_ * m / (op_.grid().h * op_.grid().h);
    }

    /// Substitution with the dgbtrf factors; dgbtrs spends its time in per-column BLAS calls.
    void lu_solve(Eigen::VectorXd& b) const {
        constexpr int kv = 4;
        const double* ab = gband_.data();
        double* x = b.data();
        for (int j = 0; j + 1 < M_; ++j) {
            const int l = ipiv_[static_cast<std::size_t>(j)] - 1;
            if (l != j) std::swap(x[l], x[j]);
            const int lm = std::min(2, M_ - 1 - j);
            for (int i = 1; i <= lm; ++i) x[j + i] -= ab[7 * j + kv + i] * x[j];
        }
        for (int j = M_ - 1; j >= 0; --j) {
            x[j] /= ab[7 * j + kv];
            const double t = x[j];
            for (int i = std::max(0, j - kv); i < j; ++i) x[i] -= t * ab[7 * j + kv + i - j];
        }
    }

    /// y = Lw x; Lw has nonzero rows only on active nodes.
    void band_multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
        const double* ab = lband_.data();
        y.setZero();
        for (int i = range_.first; i <= range_.last; ++i) {
            double sum = 0.0;
            for (int j = std::max(0, i - 2); j <= std::min(M_ - 1, i + 2); ++j) sum += ab[7 * j + 4 + i - j] * x[j];
            y[i] = sum;
        }
    }

    const BeamOperator& op_;
    const IntegrateOptions& opt_;
    IntegratorStats& stats_;
    ActiveRange range_;
    int M_;
    bool linear_ = false;
    bool valid_ = false;
    double c_ = 0.0;
    double coeff_ = 0.0;
    double sqrt_d_ = 1.0;
    std::vector<lapack_int> ipiv_;
    Eigen::MatrixXd lband_;
    Eigen::MatrixXd gband_;
    Eigen::VectorXd rw_, rv_, tmp_, fw_, fv_;
};

class Recorder {
public:
    Recorder(Trajectory& traj, const BeamOperator& op, double horizon, const IntegrateOptions& opt)
        : traj_(traj), op_(op) {
        const double dt = opt.sample_dt > 0.0 ? opt.sample_dt : horizon / 2000.0;
        const long n = static_cast<long>(std::floor(horizon / dt * (1.0 + 1e-12)));
        for (long j = 0; j <= n; ++j) sample_times_.push_back(static_cast<double>(j) * dt);
        snapshot_times_ = opt.snapshot_times;
        if (snapshot_times_.empty())
            for (int j = 0; j <= 10; ++j) snapshot_times_.push_back(horizon * j / 10.0);
        std::sort(snapshot_times_.begin(), snapshot_times_.end());
        traj_.t.reserve(sample_times_.size());
        traj_.observable.reserve(sample_times_.size());
        traj_.energy.reserve(sample_times_.size());
    }

    /// Emits every pending sample with time <= t1 using cubic Hermite data on [t0, t1].
    void emit(double t0, double t1, const Eigen::VectorXd& w0, const Eigen::VectorXd& v0, const Eigen::VectorXd& a0,
              const Eigen::VectorXd& w1, const Eigen::VectorXd& v1, const Eigen::VectorXd& a1) {
        const double h = t1 - t0;
        auto interpolate = [&](double t, Eigen::VectorXd& w, Eigen::VectorXd& v) {
            if (h <= 0.0 || t >= t1) {
                w = w1;
                v = v1;
                return;
            }
            const double s = (t - t0) / h;
            const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
            const double h10 = s * (1 - s) * (1 - s);
            const double h01 = s * s * (3 - 2 * s);
            const double h11 = s * s * (s - 1);
            w = h00 * w0 + h10 * h * v0 + h01 * w1 + h11 * h * v1;
            v = h00 * v0 + h10 * h * a0 + h01 * v1 + h11 * h * a1;
        };
        while (next_sample_ < sample_times_.size() && sample_times_[next_sample_] <= t1) {
            interpolate(sample_times_[next_sample_], sw_, sv_);
            record(sample_times_[next_sample_], sw_, sv_);
            ++next_sample_;
        }
        while (next_snapshot_ < snapshot_times_.size() && snapshot_times_[next_snapshot_] <= t1) {
            interpolate(snapshot_times_[next_snapshot_], sw_, sv_);
            traj_.snapshots.push_back({snapshot_times_[next_snapshot_], sw_, sv_});
            ++next_snapshot_;
        }
    }

private:
    void record(double t, const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
        const Grid& g = op_.grid();
        BeamState s{t, w, v};
        traj_.t.push_back(t);
        traj_.observable.push_back(observable(w, g, op_.config()));
        traj_.energy.push_back(energies(s, g, op_.params(), op_.config()));
        traj_.velocity_sq.push_back(velocity_norm_sq(v, g));
        traj_.flow_pairing.push_back(flow_pairing(w, v, g, op_.params(), op_.config()));
    }

    Trajectory& traj_;
    const BeamOperator& op_;
    std::vector<double> sample_times_;
    std::vector<double> snapshot_times_;
    std::size_t next_sample_ = 0;
    std::size_t next_snapshot_ = 0;
    Eigen::VectorXd sw_, sv_;
};

std::string describe_state(double t, const Eigen::VectorXd& w, const Eigen::VectorXd& v, const BeamOperator& op) {
    const BeamState s{t, w, v};
    const EnergySample e = energies(s, op.grid(), op.params(), op.config());
    std::ostringstream os;
    os << "t=" << t << " max|w|=" << w.cwiseAbs().maxCoeff() << " E=" << e.E;
    return os.str();
}

} // namespace

Trajectory integrate(const BeamState& initial, const BeamParams& params, const BoundaryConfig& config,
                     const Grid& grid, double horizon, const IntegrateOptions& options) {
    require_valid(params, config);
    if (!(horizon > 0.0)) throw InvalidParams("horizon must be positive");
    if (initial.w.size() != grid.M || initial.v.size() != grid.M)
        throw DimensionMismatch("initial state does not match the grid");
    if (!(options.rtol > 0.0) || !(options.atol > 0.0)) throw InvalidParams("tolerances must be positive");

    Trajectory traj;
    traj.grid = grid;
    traj.config = config;
    traj.params = params;

    const BeamOperator op(grid, params, config);
    Stepper stepper(op, options, traj.stats);
    Recorder recorder(traj, op, horizon, options);

    Eigen::VectorXd w0 = initial.w, v0 = initial.v;
    Eigen::VectorXd fw0(grid.M), a0(grid.M);
    stepper.eval(w0, v0, fw0, a0);
    recorder.emit(0.0, 0.0, w0, v0, a0, w0, v0, a0);

    Eigen::VectorXd zw(grid.M), zv(grid.M), fzw(grid.M), fzv(grid.M);
    Eigen::VectorXd w1(grid.M), v1(grid.M), fw1(grid.M), a1(grid.M);
    Eigen::VectorXd bw(grid.M), bv(grid.M), ew(grid.M), ev(grid.M);

    const double h_min = 1e-13 * std::max(1.0, horizon);
    const double h_max = horizon / 8.0;
    double t = 0.0;
    double h = options.initial_step > 0.0 ? options.initial_step
                                          : std::min(horizon, options.sample_dt > 0 ? options.sample_dt : horizon) * 1e-4;
    bool last_rejected = false;

    while (t < horizon) {
        if (traj.stats.steps + traj.stats.rejected >= options.max_steps) {
            traj.status = RunStatus::StepLimit;
            traj.diagnosis = "step limit reached at " + describe_state(t, w0, v0, op);
            break;
        }
        if (h < h_min) {
            traj.status = RunStatus::StepSizeUnderflow;
            traj.diagnosis = "step size underflow at " + describe_state(t, w0, v0, op);
            break;
        }
        h = std::min(h, h_max);
        const bool final_step = t + h >= horizon * (1.0 - 1e-14);
        if (final_step) h = horizon - t;
        const double c = kDiag * h;

        if (!stepper.factor(c, op.coefficient(w0))) {
            h *= 0.25;
            ++traj.stats.rejected;
            continue;
        }

        // trapezoidal stage to t + gamma h
        bw = w0 + c * fw0;
        bv = v0 + c * a0;
        zw = w0 + kGamma * h * fw0;
        zv = v0 + kGamma * h * a0;
        bool ok = stepper.stage(bw, bv, zw, zv);
        if (ok) {
            stepper.eval(zw, zv, fzw, fzv);
            // BDF2 stage to t + h
            bw = kBdfA * zw - kBdfB * w0;
            bv = kBdfA * zv - kBdfB * v0;
            w1 = zw + (1.0 - kGamma) * h * fzw;
            v1 = zv + (1.0 - kGamma) * h * fzv;
            ok = stepper.stage(bw, bv, w1, v1);
        }
        if (!ok) {
            stepper.invalidate();
            ++traj.stats.newton_failures;
            ++traj.stats.rejected;
            h *= 0.25;
            last_rejected = true;
            continue;
        }
        stepper.eval(w1, v1, fw1, a1);

        const double s = 2.0 * kErrConst * h;
        ew = s * (fw0 / kGamma - fzw / (kGamma * (1.0 - kGamma)) + fw1 / (1.0 - kGamma));
        ev = s * (a0 / kGamma - fzv / (kGamma * (1.0 - kGamma)) + a1 / (1.0 - kGamma));
        stepper.solve(ew, ev);
        const double err = stepper.wrms(ew, ev, w0, v0, w1, v1);

        if (!(err <= 1.0)) {
            ++traj.stats.rejected;
            const double f = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -1.0 / 3.0)) : 0.2;
            h *= f;
            last_rejected = true;
            continue;
        }

        const double t1 = final_step ? horizon : t + h;
        recorder.emit(t, t1, w0, v0, a0, w1, v1, a1);
        ++traj.stats.steps;
        t = t1;
        w0.swap(w1);
        v0.swap(v1);
        fw0.swap(fw1);
        a0.swap(a1);

        const double wmax = w0.cwiseAbs().maxCoeff();
        if (!std::isfinite(wmax) || wmax > options.divergence_threshold) {
            traj.status = RunStatus::Diverged;
            traj.diagnosis = "displacement exceeded threshold at " + describe_state(t, w0, v0, op);
            break;
        }

        double f = err > 0.0 ? 0.9 * std::pow(err, -1.0 / 3.0) : 5.0;
        f = std::clamp(f, 0.2, last_rejected ? 1.0 : 5.0);
        // small increases are not worth a new factorisation
        if (f < 1.0 || f > 1.2) h *= f;
        last_rejected = false;
    }

    traj.final_state = {t, w0, v0};
    traj.snapshots.push_back({t, w0, v0});
    return traj;
}

std::vector<CaseResult> run_battery(const std::vector<SimulationCase>& cases, const Execution& exec) {
    std::vector<CaseResult> out(cases.size());
    parallel_for(cases.size(), exec, [&](std::size_t i) {
        const SimulationCase& c = cases[i];
        try {
            out[i].trajectory = integrate(c.initial, c.params, c.config, c.grid, c.horizon, c.options);
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    });
    return out;
}

} // namespace beamflutter
