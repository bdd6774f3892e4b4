#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "pimnet/errors.hpp"
#include "pimnet/gibbs.hpp"

namespace pimnet {

/// Probability mass over quantized spin configurations (hypercube vertices).
/// Support entries are sorted by configuration index; masses are positive and
/// sum to 1 within 1e-12.
struct EmpiricalDistribution {
    int n_spins = 0;
    std::vector<std::pair<std::uint64_t, double>> support;
    std::size_t sample_count = 0;

    double mass_at(std::uint64_t cfg) const {
        auto it = std::lower_bound(support.begin(), support.end(), cfg,
                                   [](const auto& p, std::uint64_t c) { return p.first < c; });
        return (it != support.end() && it->first == cfg) ? it->second : 0.0;
    }

    static EmpiricalDistribution from_samples(const std::vector<std::uint64_t>& configs,
                                              int n_spins) {
        if (n_spins < 1 || n_spins > 63)
            throw capacity_error("empirical distribution limited to 1..63 spins");
        if (configs.empty()) throw usage_error("empirical distribution needs samples");
        std::map<std::uint64_t, std::size_t> counts;
        for (auto c : configs) {
            if (n_spins < 63 && c >= (std::uint64_t{1} << n_spins))
                throw usage_error("configuration index out of range");
            ++counts[c];
        }
        EmpiricalDistribution d;
        d.n_spins = n_spins;
        d.sample_count = configs.size();
        d.support.reserve(counts.size());
        const double inv = 1.0 / static_cast<double>(configs.size());
        for (const auto& [cfg, cnt] : counts)
            d.support.emplace_back(cfg, static_cast<double>(cnt) * inv);
        return d;
    }

    /// Weighted variant (used by bootstrap resampling): counts need not be 1.
    static EmpiricalDistribution from_weighted(
        const std::vector<std::pair<std::uint64_t, double>>& weighted, int n_spins) {
        std::map<std::uint64_t, double> acc;
        double total = 0.0;
        for (const auto& [cfg, w] : weighted) {
            if (w < 0.0) throw usage_error("negative weight");
            if (w > 0.0) acc[cfg] += w;
            total += w;
        }
        if (total <= 0.0) throw usage_error("empty distribution");
        EmpiricalDistribution d;
        d.n_spins = n_spins;
        d.sample_count = weighted.size();
        for (const auto& [cfg, w] : acc) d.support.emplace_back(cfg, w / total);
        return d;
    }

    /// Exact Gibbs table as a sparse distribution. Entries below `prune`
    /// (relative to the maximum mass) are dropped and the rest renormalized;
    /// at the default threshold the induced W1 perturbation is far below the
    /// 1e-9 transport tolerance.
    static EmpiricalDistribution from_gibbs(const GibbsTable& t, double prune = 1e-15) {
        EmpiricalDistribution d;
        d.n_spins = t.n;
        d.sample_count = 0;
        double max_p = 0.0;
        for (double p : t.probs) max_p = std::max(max_p, p);
        double total = 0.0;
        for (std::size_t k = 0; k < t.probs.size(); ++k) {
            if (t.probs[k] > prune * max_p) {
                d.support.emplace_back(k, t.probs[k]);
                total += t.probs[k];
            }
        }
        for (auto& [cfg, p] : d.support) p /= total;
        return d;
    }
};

}  // namespace pimnet
