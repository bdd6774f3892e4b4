#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "pimnet/errors.hpp"
#include "pimnet/partition.hpp"
#include "pimnet/problem.hpp"

namespace pimnet {

/// Spectral quantities of the dimensionless coupling matrices.
struct SpectrumReport {
    double rho_int = 0.0;          // spectral radius of J_Int
    double rho_ext = 0.0;          // spectral radius of J_Ext
    double rho_full = 0.0;         // spectral radius of J
    double mean_abs_lambda = 0.0;  // mean |eigenvalue| of J
    int dominant_sign = 0;         // sign of the eigenvalue achieving rho_full
    bool estimated = false;        // true when the iterative fallback was used
};

namespace detail {

// Above this size a full dense eigendecomposition is no longer desk-scale.
inline constexpr int kDenseSpectrumLimit = 4096;

struct ExtremalEigen {
    double radius = 0.0;
    int dominant_sign = 0;
};

inline void check_symmetric(const SparseSym& m, const char* what) {
    SparseSym diff = SparseSym(m.transpose()) - m;
    for (int i = 0; i < diff.outerSize(); ++i)
        for (SparseSym::InnerIterator it(diff, i); it; ++it)
            if (std::abs(it.value()) > 1e-12)
                throw usage_error(std::string(what) + ": matrix is not symmetric");
}

inline ExtremalEigen dense_extremal(const SparseSym& m, double* mean_abs = nullptr) {
    Eigen::MatrixXd dense(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense,
                                                          Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = solver.eigenvalues();
    ExtremalEigen out;
    const double lo = ev.minCoeff(), hi = ev.maxCoeff();
    if (std::abs(lo) > std::abs(hi)) {
        out.radius = std::abs(lo);
        out.dominant_sign = lo < 0 ? -1 : 1;
    } else {
        out.radius = std::abs(hi);
        out.dominant_sign = hi < 0 ? -1 : 1;
    }
    if (mean_abs) *mean_abs = ev.cwiseAbs().mean();
    return out;
}

// Power iteration on the symmetric matrix; |Rayleigh quotient| converges to the
// spectral radius. Relative tolerance 1e-8 (the heuristics need 2 figures).
inline ExtremalEigen power_extremal(const SparseSym& m, int max_iter = 5000,
                                    double tol = 1e-8) {
    const int n = static_cast<int>(m.rows());
    if (m.nonZeros() == 0) return {0.0, 0};
    CounterRng rng(0x9E3779B97F4A7C15ull);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = rng.normal_pair(RngContext::misc, 0, i, 0)[0];
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd w = m * v;
        const double norm = w.norm();
        if (norm == 0.0) return {0.0, 0};
        const double next = v.dot(w);
        w /= norm;
        // degenerate +/- pairs make plain power iteration oscillate; track |.|
        if (std::abs(std::abs(next) - std::abs(lambda)) <=
            tol * std::max(1.0, std::abs(next)) && it > 2) {
            return {std::abs(next), next < 0 ? -1 : 1};
        }
        lambda = next;
        v = w;
    }
    return {std::abs(lambda), lambda < 0 ? -1 : 1};
}

}  // namespace detail

/// Spectral report for the dimensionless problem matrices. Dense solve up to
/// n = 4096; beyond that, extremal eigenvalues come from power iteration and
/// mean |lambda| from the trace-based estimate sqrt(tr(J^2)/n), flagged via
/// `estimated`.
inline SpectrumReport spectrum(const ProblemInstance& inst, const SplitCouplings& sc) {
    detail::check_symmetric(inst.couplings, "spectrum(J)");
    detail::check_symmetric(sc.j_int, "spectrum(J_Int)");
    detail::check_symmetric(sc.j_ext, "spectrum(J_Ext)");
    SpectrumReport r;
    if (inst.n <= detail::kDenseSpectrumLimit) {
        const auto full = detail::dense_extremal(inst.couplings, &r.mean_abs_lambda);
        r.rho_full = full.radius;
        r.dominant_sign = full.dominant_sign;
        r.rho_int = sc.j_int.nonZeros() ? detail::dense_extremal(sc.j_int).radius : 0.0;
        r.rho_ext = sc.j_ext.nonZeros() ? detail::dense_extremal(sc.j_ext).radius : 0.0;
    } else {
        r.estimated = true;
        const auto full = detail::power_extremal(inst.couplings);
        r.rho_full = full.radius;
        r.dominant_sign = full.dominant_sign;
        r.rho_int = detail::power_extremal(sc.j_int).radius;
        r.rho_ext = detail::power_extremal(sc.j_ext).radius;
        double frob2 = 0.0;
        for (int i = 0; i < inst.couplings.outerSize(); ++i)
            for (SparseSym::InnerIterator it(inst.couplings, i); it; ++it)
                frob2 += it.value() * it.value();
        r.mean_abs_lambda = std::sqrt(frob2 / inst.n);
    }
    return r;
}

enum class TauFlipMode { radius, mean_abs };

/// Spin-flip time heuristic tau_flip = RC / rho(J~) (or the mean-|lambda|
/// variant). Sync periods below it keep few spins flipping per epoch.
inline double tau_flip(const SpectrumReport& spec, double rc, TauFlipMode mode) {
    if (rc <= 0.0) throw usage_error("tau_flip: rc must be positive");
    const double stat = mode == TauFlipMode::radius ? spec.rho_full : spec.mean_abs_lambda;
    if (stat <= 0.0)
        throw usage_error("tau_flip: heuristic undefined for empty coupling spectrum");
    return rc / stat;
}

}  // namespace pimnet
