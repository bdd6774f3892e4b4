#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pimnet/errors.hpp"
#include "pimnet/partition.hpp"
#include "pimnet/problem.hpp"

namespace pimnet {

/// Analog device constants. Defaults follow the resistively-coupled capacitor
/// architecture used for all numerical studies (R = 310 kOhm, C = 50 fF).
struct DeviceParams {
    double r = 310e3;    // ohms
    double c = 50e-15;   // farads

    double rc() const { return r * c; }

    void validate() const {
        if (r <= 0.0 || c <= 0.0) throw usage_error("device: R and C must be positive");
    }
};

/// Inverse-temperature schedule beta(t) over [0, duration].
/// beta is dimensionless; the integrator pairs it with RC-normalized time.
struct TemperatureSchedule {
    enum class Kind { constant, linear, geometric };
    Kind kind = Kind::constant;
    double beta_start = 1.0;
    double beta_end = 1.0;   // ignored for constant
    double duration = 0.0;   // seconds; 0 means constant in practice

    double beta(double t) const {
        if (kind == Kind::constant || duration <= 0.0) return beta_start;
        const double frac = std::clamp(t / duration, 0.0, 1.0);
        if (kind == Kind::linear) return beta_start + (beta_end - beta_start) * frac;
        return beta_start * std::pow(beta_end / beta_start, frac);
    }

    void validate() const {
        if (beta_start <= 0.0) throw usage_error("schedule: beta_start must be positive");
        if (kind != Kind::constant && beta_end <= 0.0)
            throw usage_error("schedule: beta_end must be positive");
    }
};

/// Piecewise-linear coefficient schedule (time in seconds, value dimensionless).
struct PiecewiseLinear {
    std::vector<double> times;   // strictly increasing
    std::vector<double> values;  // same length; constant extrapolation outside

    static PiecewiseLinear constant(double v) { return {{0.0}, {v}}; }

    double at(double t) const {
        if (times.empty()) return 0.0;
        if (t <= times.front()) return values.front();
        if (t >= times.back()) return values.back();
        std::size_t hi = 1;
        while (times[hi] < t) ++hi;
        const double f = (t - times[hi - 1]) / (times[hi] - times[hi - 1]);
        return values[hi - 1] + f * (values[hi] - values[hi - 1]);
    }
};

/// Kuramoto coupling K_J(t) and sub-harmonic injection locking K_S(t),
/// both expressed per RC-normalized time unit.
struct KuramotoParams {
    PiecewiseLinear kj = PiecewiseLinear::constant(1.0);
    PiecewiseLinear ks = PiecewiseLinear::constant(0.0);
};

// ---- Drifts -----------------------------------------------------------------
//
// Drift is always -grad H. For the linear model H(V) = -(1/2RC) V^T J~ V, so
// the drift is (J~_Int x + J~_Ext x0)/RC in state/second. The execution layer
// works in RC-normalized time and therefore uses the dimensionless gradient
// (the same expression without the 1/RC factor).

/// Dimensionless linear gradient g = J~_Int x + J~_Ext x0 (out must be sized n).
inline void linear_gradient(const SplitCouplings& sc, std::span<const double> x,
                            std::span<const double> x0, std::span<double> out) {
    const int n = static_cast<int>(sc.j_int.rows());
    if (static_cast<int>(x.size()) != n || static_cast<int>(x0.size()) != n ||
        static_cast<int>(out.size()) != n)
        throw usage_error("linear_gradient: dimension mismatch");
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (SparseSym::InnerIterator it(sc.j_int, i); it; ++it)
            acc += it.value() * x[it.col()];
        for (SparseSym::InnerIterator it(sc.j_ext, i); it; ++it)
            acc += it.value() * x0[it.col()];
        out[i] = acc;
    }
}

/// Linear-model drift in state/second: (J~_Int x + J~_Ext x0) / RC.
inline std::vector<double> linear_drift(const SplitCouplings& sc, const DeviceParams& dev,
                                        std::span<const double> x, std::span<const double> x0,
                                        double /*t*/ = 0.0) {
    dev.validate();
    std::vector<double> out(x.size());
    linear_gradient(sc, x, x0, out);
    const double inv_rc = 1.0 / dev.rc();
    for (double& v : out) v *= inv_rc;
    return out;
}

/// Kuramoto drift per RC-normalized time unit:
///   dtheta_i = -K_J sum_j J_ij sin(theta_i - theta_j) + K_S sin(2 theta_i),
/// internal couplings use live phases, external couplings the latent copy.
inline void kuramoto_gradient(const SplitCouplings& sc, const KuramotoParams& kp,
                              std::span<const double> theta, std::span<const double> theta0,
                              double t, std::span<double> out) {
    const int n = static_cast<int>(sc.j_int.rows());
    if (static_cast<int>(theta.size()) != n || static_cast<int>(theta0.size()) != n ||
        static_cast<int>(out.size()) != n)
        throw usage_error("kuramoto_gradient: dimension mismatch");
    const double kj = kp.kj.at(t), ks = kp.ks.at(t);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (SparseSym::InnerIterator it(sc.j_int, i); it; ++it)
            acc -= it.value() * std::sin(theta[i] - theta[it.col()]);
        for (SparseSym::InnerIterator it(sc.j_ext, i); it; ++it)
            acc -= it.value() * std::sin(theta[i] - theta0[it.col()]);
        out[i] = kj * acc + ks * std::sin(2.0 * theta[i]);
    }
}

inline std::vector<double> kuramoto_drift(const SplitCouplings& sc, const KuramotoParams& kp,
                                          std::span<const double> theta,
                                          std::span<const double> theta0, double t = 0.0) {
    std::vector<double> out(theta.size());
    kuramoto_gradient(sc, kp, theta, theta0, t, out);
    return out;
}

// ---- Euler-Maruyama step ------------------------------------------------------

/// One explicit Euler-Maruyama step:
///   x' = x + drift*dt + sqrt(2*dt/beta) * noise,
/// clamped per coordinate to [-1,1] when `clamp` is set (linear model only;
/// Kuramoto phases are left unbounded). Noise is supplied by the caller so
/// coupled processes can share one Brownian source. Bitwise deterministic
/// given identical inputs.
inline void em_step(std::span<double> x, std::span<const double> drift, double beta, double dt,
                    std::span<const double> noise, bool clamp,
                    std::uint64_t step_index = 0) {
    if (x.size() != drift.size() || x.size() != noise.size())
        throw usage_error("em_step: dimension mismatch");
    if (dt <= 0.0) throw usage_error("em_step: dt must be positive");
    const double sigma = std::sqrt(2.0 * dt / beta);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(drift[i]) || !std::isfinite(noise[i]))
            throw numerical_error("em_step: non-finite drift or noise at step " +
                                  std::to_string(step_index));
        double v = x[i] + drift[i] * dt + sigma * noise[i];
        if (clamp) v = std::clamp(v, -1.0, 1.0);
        x[i] = v;
    }
}

// ---- Quantization --------------------------------------------------------------

/// Nearest hypercube vertex by sign; a tie at exactly 0 resolves to +1.
inline SpinConfig quantize(std::span<const double> x) {
    SpinConfig s;
    s.spins.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) s.spins[i] = x[i] < 0.0 ? -1 : 1;
    return s;
}

/// Kuramoto spin readout: sign(cos theta) per oscillator.
inline SpinConfig quantize_phases(std::span<const double> theta) {
    SpinConfig s;
    s.spins.resize(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
        s.spins[i] = std::cos(theta[i]) < 0.0 ? -1 : 1;
    return s;
}

}  // namespace pimnet
