#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pimnet/errors.hpp"
#include "pimnet/problem.hpp"

namespace pimnet {

// Enumeration is capped at n <= 24 (2^24 energies is the desk-scale ceiling).
inline constexpr int kMaxEnumerationSpins = 24;

/// Exact Gibbs distribution over all 2^n configurations.
/// Index encoding: bit i of the configuration index is 1 iff spin i == +1.
struct GibbsTable {
    int n = 0;
    double beta = 0.0;
    std::vector<double> energies;   // indexed by configuration
    std::vector<double> probs;      // normalized, sums to 1 within 1e-12
    std::vector<double> log_probs;  // exact log form, safe at large beta
};

/// All 2^n energies by Gray-code enumeration (O(2^n * avg degree)).
inline std::vector<double> enumerate_energies(const ProblemInstance& inst) {
    if (inst.n > kMaxEnumerationSpins)
        throw capacity_error("enumeration limited to n <= 24 spins");
    const int n = inst.n;
    const std::size_t total = std::size_t{1} << n;
    std::vector<double> energies(total);

    SpinConfig s;
    s.spins.assign(n, -1);
    // local fields r_i = sum_j J_ij s_j, kept incrementally
    std::vector<double> r(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (SparseSym::InnerIterator it(inst.couplings, i); it; ++it)
            r[i] += it.value() * s.spins[it.col()];

    double e = energy(inst, s);
    std::uint64_t code = 0;  // Gray code of the current configuration
    energies[0] = e;
    for (std::size_t k = 1; k < total; ++k) {
        const int i = std::countr_zero(k);
        const double h_i = inst.field.size() > 0 ? inst.field[i] : 0.0;
        e += 2.0 * s.spins[i] * (r[i] + h_i);
        const double delta = -2.0 * s.spins[i];
        for (SparseSym::InnerIterator it(inst.couplings, i); it; ++it)
            r[it.col()] += it.value() * delta;
        s.spins[i] = -s.spins[i];
        code ^= (std::uint64_t{1} << i);
        energies[code] = e;
    }
    return energies;
}

/// Exact Gibbs table with log-sum-exp-stable normalization.
/// beta = 0 is permitted (uniform distribution); negative beta is rejected.
inline GibbsTable enumerate_gibbs(const ProblemInstance& inst, double beta) {
    if (beta < 0.0) throw usage_error("enumerate_gibbs: beta must be >= 0");
    GibbsTable t;
    t.n = inst.n;
    t.beta = beta;
    t.energies = enumerate_energies(inst);
    const std::size_t total = t.energies.size();
    t.log_probs.resize(total);
    t.probs.resize(total);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (double e : t.energies) max_logit = std::max(max_logit, -beta * e);
    double z = 0.0;
    for (std::size_t k = 0; k < total; ++k) z += std::exp(-beta * t.energies[k] - max_logit);
    const double log_z = max_logit + std::log(z);
    for (std::size_t k = 0; k < total; ++k) {
        t.log_probs[k] = -beta * t.energies[k] - log_z;
        t.probs[k] = std::exp(t.log_probs[k]);
    }
    return t;
}

/// Exact minimum energy and every configuration achieving it.
struct GroundStates {
    double energy = 0.0;
    std::vector<std::uint64_t> configs;
};

inline GroundStates ground_states(const ProblemInstance& inst) {
    const auto energies = enumerate_energies(inst);
    GroundStates g;
    g.energy = energies[0];
    for (double e : energies) g.energy = std::min(g.energy, e);
    const double tol = 1e-9 * std::max(1.0, std::abs(g.energy));
    for (std::size_t k = 0; k < energies.size(); ++k)
        if (energies[k] <= g.energy + tol) g.configs.push_back(k);
    return g;
}

}  // namespace pimnet
