#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "pimnet/distribution.hpp"
#include "pimnet/errors.hpp"
#include "pimnet/gibbs.hpp"
#include "pimnet/rng.hpp"
#include "pimnet/transport.hpp"

namespace pimnet {

// ---- Divergences --------------------------------------------------------------

/// KL(mu||nu) between two sparse distributions. Returns +infinity when mu has
/// mass outside nu's support (absolute continuity failure is a value here,
/// not an error).
inline double kl_divergence(const EmpiricalDistribution& mu, const EmpiricalDistribution& nu) {
    if (mu.n_spins != nu.n_spins) throw usage_error("kl_divergence: spin count mismatch");
    double kl = 0.0;
    for (const auto& [cfg, p] : mu.support) {
        const double q = nu.mass_at(cfg);
        if (q <= 0.0) return std::numeric_limits<double>::infinity();
        kl += p * std::log(p / q);
    }
    return std::max(kl, 0.0);
}

/// KL(mu||pi) against an exact Gibbs table; uses stored log-probabilities, so
/// it stays finite even where the tabulated mass underflows to zero.
inline double kl_divergence(const EmpiricalDistribution& mu, const GibbsTable& pi) {
    if (mu.n_spins != pi.n) throw usage_error("kl_divergence: spin count mismatch");
    double kl = 0.0;
    for (const auto& [cfg, p] : mu.support)
        kl += p * (std::log(p) - pi.log_probs[cfg]);
    return std::max(kl, 0.0);
}

// ---- Bound functionals ----------------------------------------------------------
//
// All gradient expectations below are dimensionless (gradients of the problem
// potential w.r.t. J~, time in RC units), matching the execution module's
// accumulators.

struct BoundInputs {
    double t = 0.0;                         // epoch time, seconds
    double lipschitz_l = 0.0;               // drift smoothness constant, 1/s
    double mean_pair_grad_l1 = std::numeric_limits<double>::quiet_NaN();
    double mean_ext_grad_l1 = 0.0;          // E ||grad U_ext(X0) - grad U_ext(X_t)||_1
    double mean_grad_err_sq_integral = 0.0; // E int ||delta grad U_ext||^2 du
    double contraction_c = std::numeric_limits<double>::quiet_NaN();
    double w1_start = std::numeric_limits<double>::quiet_NaN();  // W1(mu_0, pi)
};

/// Exact KL identity between the concurrent and ideal laws:
///   KL(mu_tau || nu_tau) = (beta/4) E[ accumulated gradient error ].
inline double kl_lower_bound(const BoundInputs& in, double beta) {
    if (beta <= 0.0) throw usage_error("kl_lower_bound: beta must be positive");
    return 0.25 * beta * in.mean_grad_err_sq_integral;
}

/// Companion total-variation bound via Pinsker's inequality.
inline double pinsker_tv_bound(const BoundInputs& in, double beta) {
    if (beta <= 0.0) throw usage_error("pinsker_tv_bound: beta must be positive");
    return std::sqrt(beta / 8.0 * in.mean_grad_err_sq_integral);
}

/// Bound I on W1(mu_t, nu_t): paired full-gradient term plus self external term.
inline double bound_one(const BoundInputs& in) {
    if (!std::isfinite(in.mean_pair_grad_l1))
        throw usage_error("bound_one: coupled-pair gradient data missing");
    return in.mean_pair_grad_l1 + in.mean_ext_grad_l1;
}

/// Bound II on W1(mu_t, nu_t): external term / (1 - tL), valid only for tL < 1.
/// Invalidity is a value, not an error.
inline std::optional<double> bound_two(const BoundInputs& in) {
    const double tl = in.t * in.lipschitz_l;
    if (tl >= 1.0) return std::nullopt;
    return in.mean_ext_grad_l1 / (1.0 - tl);
}

enum class Contraction { guaranteed, not_guaranteed, inconclusive };

/// Sufficient contraction condition: bound/(1 - C(t)) < W1(mu_0, pi).
inline Contraction contraction_check(double bound_value, const BoundInputs& in) {
    if (!(in.contraction_c > 0.0 && in.contraction_c < 1.0) || !std::isfinite(in.w1_start))
        return Contraction::inconclusive;
    return bound_value / (1.0 - in.contraction_c) < in.w1_start ? Contraction::guaranteed
                                                                : Contraction::not_guaranteed;
}

// ---- Performance metrics --------------------------------------------------------

struct PerformanceRecord {
    long trials = 0;
    long success_count = 0;    // trials that reached the target quality
    double mean_metric = 0.0;  // time or energy per trial
    double target_ratio = 1.0; // e.g. 0.98 of the best known solution
    double bks = 0.0;

    void validate() const {
        if (trials <= 0) throw usage_error("performance record: trials must be positive");
        if (success_count < 0 || success_count > trials)
            throw usage_error("performance record: bad success count");
        if (!(target_ratio > 0.0 && target_ratio <= 1.0))
            throw usage_error("performance record: target ratio must be in (0,1]");
    }
};

/// Metric-to-target: <M> log(0.01)/log(1-p) for 99% confidence; p = 0 is
/// unreachable (nullopt), p = 1 costs a single attempt.
inline std::optional<double> mtt(const PerformanceRecord& rec) {
    rec.validate();
    const double p = static_cast<double>(rec.success_count) / rec.trials;
    if (p <= 0.0) return std::nullopt;
    if (p >= 1.0) return rec.mean_metric;
    const double attempts = std::log(0.01) / std::log1p(-p);
    return rec.mean_metric * std::max(1.0, attempts);
}

/// Communication energy of one anneal: n spins * E_bit * floor(t_anneal/tau)
/// synchronizations (1-bit latent exchange per spin per sync). The quotient
/// gets a few-ulp nudge so exact multiples are not truncated by rounding.
inline double sync_energy(long n, double e_bit, double t_anneal, double tau) {
    if (n <= 0 || e_bit <= 0.0 || t_anneal <= 0.0 || tau <= 0.0)
        throw usage_error("sync_energy: all arguments must be positive");
    return static_cast<double>(n) * e_bit * std::floor(t_anneal / tau * (1.0 + 4e-15));
}

/// Cut error 1 - Cut/BKS.
inline double cut_error(double cut, double bks) {
    if (bks <= 0.0) throw usage_error("cut_error: BKS must be positive");
    return 1.0 - cut / bks;
}

// ---- Bootstrap ----------------------------------------------------------------

struct BootstrapResult {
    double point = 0.0;  // statistic on the full sample
    double mean = 0.0;
    double se = 0.0;
    double lo = 0.0, hi = 0.0;  // 2.5% / 97.5% percentiles
};

namespace detail {

inline BootstrapResult summarize(double point, std::vector<double>& vals) {
    BootstrapResult r;
    r.point = point;
    double sum = 0.0;
    for (double v : vals) sum += v;
    r.mean = sum / vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - r.mean) * (v - r.mean);
    r.se = vals.size() > 1 ? std::sqrt(var / (vals.size() - 1)) : 0.0;
    std::sort(vals.begin(), vals.end());
    r.lo = vals[static_cast<std::size_t>(0.025 * (vals.size() - 1))];
    r.hi = vals[static_cast<std::size_t>(std::ceil(0.975 * (vals.size() - 1)))];
    return r;
}

inline EmpiricalDistribution resample(const std::vector<std::uint64_t>& samples, int n_spins,
                                      const CounterRng& rng, std::uint32_t tag,
                                      std::uint64_t round,
                                      std::vector<std::uint64_t>* indices = nullptr) {
    const std::size_t t = samples.size();
    std::vector<std::pair<std::uint64_t, double>> weighted;
    weighted.reserve(t);
    for (std::size_t d = 0; d < t; ++d) {
        const auto idx = rng.uniform_index(RngContext::bootstrap, tag, round,
                                           static_cast<std::uint32_t>(d), t);
        weighted.emplace_back(samples[idx], 1.0);
        if (indices) indices->push_back(idx);
    }
    return EmpiricalDistribution::from_weighted(weighted, n_spins);
}

}  // namespace detail

/// Bootstrap (over trials) of W1 between a sampled process and a fixed target.
inline BootstrapResult bootstrap_w1_vs(const std::vector<std::uint64_t>& samples, int n_spins,
                                       const EmpiricalDistribution& target, int resamples,
                                       const CounterRng& rng, std::uint32_t tag) {
    const auto base = EmpiricalDistribution::from_samples(samples, n_spins);
    std::vector<double> vals;
    vals.reserve(resamples);
    for (int r = 0; r < resamples; ++r)
        vals.push_back(w1_hamming(detail::resample(samples, n_spins, rng, tag, r), target));
    return detail::summarize(w1_hamming(base, target), vals);
}

/// Paired bootstrap of W1 between two synchronously sampled processes: each
/// resample draws trial indices once and applies them to both sample sets.
inline BootstrapResult bootstrap_w1_paired(const std::vector<std::uint64_t>& xs,
                                           const std::vector<std::uint64_t>& ys, int n_spins,
                                           int resamples, const CounterRng& rng,
                                           std::uint32_t tag) {
    if (xs.size() != ys.size()) throw usage_error("paired bootstrap: sample count mismatch");
    const auto bx = EmpiricalDistribution::from_samples(xs, n_spins);
    const auto by = EmpiricalDistribution::from_samples(ys, n_spins);
    std::vector<double> vals;
    vals.reserve(resamples);
    const std::size_t t = xs.size();
    for (int r = 0; r < resamples; ++r) {
        std::vector<std::pair<std::uint64_t, double>> wx, wy;
        wx.reserve(t);
        wy.reserve(t);
        for (std::size_t d = 0; d < t; ++d) {
            const auto idx = rng.uniform_index(RngContext::bootstrap, tag, r,
                                               static_cast<std::uint32_t>(d), t);
            wx.emplace_back(xs[idx], 1.0);
            wy.emplace_back(ys[idx], 1.0);
        }
        vals.push_back(w1_hamming(EmpiricalDistribution::from_weighted(wx, n_spins),
                                  EmpiricalDistribution::from_weighted(wy, n_spins)));
    }
    return detail::summarize(w1_hamming(bx, by), vals);
}

}  // namespace pimnet
