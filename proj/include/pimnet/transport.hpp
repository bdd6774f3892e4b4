#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "pimnet/distribution.hpp"
#include "pimnet/errors.hpp"

namespace pimnet {
namespace transport {

// Exact solver for the balanced transportation problem
//
//     min sum_ij gamma_ij c_ij   s.t.  sum_j gamma_ij = a_i,  sum_i gamma_ij = b_j
//
// via the network simplex on the bipartite graph. The basis is a spanning
// tree over m source + k sink nodes; entering arcs are found with rotating
// block pricing, the leaving arc by the minimum flow on the backward arcs of
// the induced cycle. Costs are evaluated lazily so the dense m*k cost matrix
// is never materialized.
class NetworkSimplex {
public:
    using CostFn = std::function<double(int, int)>;

    NetworkSimplex(std::vector<double> supply, std::vector<double> demand, CostFn cost)
        : a_(std::move(supply)), b_(std::move(demand)), cost_(std::move(cost)) {
        m_ = static_cast<int>(a_.size());
        k_ = static_cast<int>(b_.size());
        if (m_ == 0 || k_ == 0) throw usage_error("transport: empty marginal");
        double sa = 0.0, sb = 0.0;
        for (double v : a_) sa += v;
        for (double v : b_) sb += v;
        if (std::abs(sa - sb) > 1e-9 * std::max(sa, sb))
            throw usage_error("transport: marginals are not balanced");
        // rescale the demand side so the residual imbalance is exactly zero
        const double fix = sa / sb;
        for (double& v : b_) v *= fix;
    }

    double solve() {
        build_initial_basis();
        rebuild_tree();
        double max_cost = 1.0;
        for (const Arc& arc : arcs_) max_cost = std::max(max_cost, std::abs(arc.cost));
        const double eps = 1e-11 * max_cost;
        const std::int64_t narcs = static_cast<std::int64_t>(m_) * k_;
        const int block =
            std::max<int>(64, static_cast<int>(std::sqrt(static_cast<double>(narcs))));
        const long max_pivots = 200000 + 64L * (m_ + k_);

        std::int64_t cursor = 0;
        long pivots = 0;
        while (true) {
            // rotating block search for the most negative reduced cost
            int best_i = -1, best_j = -1;
            double best_rc = -eps;
            std::int64_t scanned = 0;
            while (scanned < narcs) {
                const std::int64_t stop = std::min<std::int64_t>(narcs, scanned + block);
                for (; scanned < stop; ++scanned) {
                    const std::int64_t e = (cursor + scanned) % narcs;
                    const int i = static_cast<int>(e / k_);
                    const int j = static_cast<int>(e % k_);
                    const double rc = cost_(i, j) - u_[i] - v_[j];
                    if (rc < best_rc) {
                        best_rc = rc;
                        best_i = i;
                        best_j = j;
                    }
                }
                if (best_i >= 0) break;
            }
            if (best_i < 0) break;  // optimal
            cursor = (cursor + scanned) % narcs;
            pivot(best_i, best_j);
            if (++pivots > max_pivots)
                throw numerical_error("transport: pivot limit exceeded");
        }
        double total = 0.0;
        for (const Arc& arc : arcs_) total += arc.flow * arc.cost;
        return total;
    }

private:
    struct Arc {
        int src, dst;  // source index in [0,m), sink index in [0,k)
        double flow;
        double cost;
    };

    int node_of_src(int i) const { return i; }
    int node_of_dst(int j) const { return m_ + j; }

    void build_initial_basis() {
        arcs_.clear();
        arcs_.reserve(m_ + k_ - 1);
        int i = 0, j = 0;
        double ra = a_[0], rb = b_[0];
        while (true) {
            const double f = std::min(ra, rb);
            arcs_.push_back({i, j, f, cost_(i, j)});
            ra -= f;
            rb -= f;
            if (i == m_ - 1 && j == k_ - 1) break;
            if (ra <= rb && i < m_ - 1) {
                ++i;
                ra = a_[i];
            } else {
                ++j;
                rb = b_[j];
            }
        }
    }

    // Recompute adjacency, parents, depths and duals from the basic arcs.
    void rebuild_tree() {
        const int n = m_ + k_;
        adj_.assign(n, {});
        for (int e = 0; e < static_cast<int>(arcs_.size()); ++e) {
            adj_[node_of_src(arcs_[e].src)].push_back(e);
            adj_[node_of_dst(arcs_[e].dst)].push_back(e);
        }
        parent_.assign(n, -1);
        parent_arc_.assign(n, -1);
        depth_.assign(n, 0);
        u_.assign(m_, 0.0);
        v_.assign(k_, 0.0);
        // BFS from node 0 (a source): u_0 = 0 pins the duals
        std::vector<int> queue = {0};
        std::vector<char> visited(n, 0);
        visited[0] = 1;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const int x = queue[q];
            for (int e : adj_[x]) {
                const Arc& arc = arcs_[e];
                const int y = node_of_src(arc.src) == x ? node_of_dst(arc.dst)
                                                        : node_of_src(arc.src);
                if (visited[y]) continue;
                visited[y] = 1;
                parent_[y] = x;
                parent_arc_[y] = e;
                depth_[y] = depth_[x] + 1;
                if (y >= m_)
                    v_[y - m_] = arc.cost - u_[arc.src];
                else
                    u_[y] = arc.cost - v_[arc.dst];
                queue.push_back(y);
            }
        }
    }

    void pivot(int enter_i, int enter_j) {
        // Gather the tree path between the entering arc's endpoints. Backward
        // arcs (flow decreases) are the parent arcs above sink nodes on the
        // sink-side climb and above source nodes on the source-side climb.
        int s = node_of_src(enter_i), t = node_of_dst(enter_j);
        thread_local std::vector<int> path_arcs;
        thread_local std::vector<signed char> path_sign;
        path_arcs.clear();
        path_sign.clear();
        int x = s, y = t;
        while (x != y) {
            if (depth_[x] >= depth_[y]) {
                path_arcs.push_back(parent_arc_[x]);
                path_sign.push_back(x < m_ ? -1 : +1);  // climbing the source side
                x = parent_[x];
            } else {
                path_arcs.push_back(parent_arc_[y]);
                path_sign.push_back(y >= m_ ? -1 : +1);  // climbing the sink side
                y = parent_[y];
            }
        }
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        for (std::size_t p = 0; p < path_arcs.size(); ++p) {
            if (path_sign[p] < 0 && arcs_[path_arcs[p]].flow < theta) {
                theta = arcs_[path_arcs[p]].flow;
                leave = path_arcs[p];
            }
        }
        if (leave < 0) throw numerical_error("transport: unbounded pivot cycle");
        for (std::size_t p = 0; p < path_arcs.size(); ++p)
            arcs_[path_arcs[p]].flow += path_sign[p] * theta;
        arcs_[leave] = {enter_i, enter_j, theta, cost_(enter_i, enter_j)};
        rebuild_tree();
    }

    int m_ = 0, k_ = 0;
    std::vector<double> a_, b_;
    CostFn cost_;
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> parent_, parent_arc_, depth_;
    std::vector<double> u_, v_;
};

inline double min_cost_transport(std::vector<double> a, std::vector<double> b,
                                 NetworkSimplex::CostFn cost) {
    return NetworkSimplex(std::move(a), std::move(b), std::move(cost)).solve();
}

// Hamming ground metric equals shortest-path distance on the hypercube, so the
// transport program is also an uncapacitated min-cost flow on the hypercube
// with unit arc costs. Successive shortest paths over the residual graph with
// node potentials and Dial buckets solve that orders of magnitude faster than
// the dense bipartite simplex once supports grow past a few hundred states.
// Exact, like the simplex; the two routes are cross-checked in the test suite.
class HypercubeFlow {
public:
    HypercubeFlow(int n_spins, const std::vector<std::pair<std::uint64_t, double>>& mu,
                  const std::vector<std::pair<std::uint64_t, double>>& nu)
        : n_(n_spins), size_(std::size_t{1} << n_spins) {
        excess_.assign(size_, 0.0);
        double sa = 0.0, sb = 0.0;
        for (const auto& [cfg, p] : mu) sa += p;
        for (const auto& [cfg, p] : nu) sb += p;
        if (std::abs(sa - sb) > 1e-9 * std::max(sa, sb))
            throw usage_error("transport: marginals are not balanced");
        for (const auto& [cfg, p] : mu) excess_[cfg] += p;
        for (const auto& [cfg, p] : nu) excess_[cfg] -= p * (sa / sb);
    }

    double solve() {
        double total_mass = 0.0;
        for (double e : excess_)
            if (e > 0.0) total_mass += e;
        const double eps = 1e-15 * std::max(1.0, total_mass);
        const double flow_eps = 1e-14 * std::max(1.0, total_mass);

        std::vector<std::uint32_t> supplies;
        for (std::uint32_t v = 0; v < size_; ++v)
            if (excess_[v] > eps) supplies.push_back(v);

        potential_.assign(size_, 0);
        dist_.assign(size_, kUnset);
        parent_bit_.assign(size_, -1);
        // net flow on edge {u, u^bit}, positive in the bit 0 -> 1 direction,
        // keyed by (node with the bit cleared, bit)
        flow_.assign(size_ * n_, 0.0);
        std::vector<std::uint32_t> touched;
        std::vector<std::vector<std::uint32_t>> buckets(2 * n_ + 3);
        const long max_rounds = 1000 + 64L * static_cast<long>(size_);
        long rounds = 0;

        double cost = 0.0;
        while (true) {
            while (!supplies.empty() && excess_[supplies.back()] <= eps) supplies.pop_back();
            if (supplies.empty()) break;
            if (++rounds > max_rounds)
                throw numerical_error("transport: augmentation limit exceeded");

            // residual arc u -> u^bit: cost -1 while it cancels opposing flow
            auto arc = [&](std::uint32_t u, int bit, double& capacity) {
                const std::uint32_t base = u & ~(std::uint32_t{1} << bit);
                const double f = flow_[std::size_t{base} * n_ + bit];
                const double directed = (u == base) ? f : -f;  // flow along u -> v
                if (directed < -flow_eps) {
                    capacity = -directed;
                    return -1;
                }
                capacity = std::numeric_limits<double>::infinity();
                return 1;
            };

            // multi-source shortest path by reduced cost; source offsets keep
            // the implicit super-source arcs at nonnegative reduced cost
            for (auto& bucket : buckets) bucket.clear();
            std::int32_t max_pi = std::numeric_limits<std::int32_t>::min();
            for (std::uint32_t sv : supplies)
                if (excess_[sv] > eps) max_pi = std::max(max_pi, potential_[sv]);
            for (std::uint32_t sv : supplies) {
                if (excess_[sv] <= eps) continue;
                const int d0 = max_pi - potential_[sv];
                dist_[sv] = d0;
                parent_bit_[sv] = -1;
                if (d0 >= static_cast<int>(buckets.size())) buckets.resize(d0 + 1);
                buckets[d0].push_back(sv);
                touched.push_back(sv);
            }
            std::int64_t found = -1;
            int found_d = 0;
            for (int d = 0; d < static_cast<int>(buckets.size()) && found < 0; ++d) {
                for (std::size_t qi = 0; qi < buckets[d].size(); ++qi) {
                    const std::uint32_t u = buckets[d][qi];
                    if (dist_[u] != d) continue;  // stale entry
                    if (excess_[u] < -eps) {
                        found = u;
                        found_d = d;
                        break;
                    }
                    for (int bit = 0; bit < n_; ++bit) {
                        const std::uint32_t v = u ^ (std::uint32_t{1} << bit);
                        double capacity;
                        const int c = arc(u, bit, capacity);
                        const int nd = d + c + potential_[u] - potential_[v];
                        if (dist_[v] == kUnset) touched.push_back(v);
                        if (nd < dist_[v]) {
                            dist_[v] = nd;
                            parent_bit_[v] = static_cast<std::int8_t>(bit);
                            if (nd >= static_cast<int>(buckets.size()))
                                buckets.resize(nd + 1);
                            buckets[nd].push_back(v);
                        }
                    }
                }
            }
            if (found < 0) throw numerical_error("transport: no augmenting path");

            // potentials: pi[v] += min(d[v], d_t) - d_t keeps both the real
            // residual arcs and the implicit super-source arcs nonnegative
            for (std::uint32_t v : touched)
                potential_[v] += std::min<int>(dist_[v], found_d) - found_d;

            // pass 1: walk back for the bottleneck
            const std::uint32_t sink = static_cast<std::uint32_t>(found);
            double theta = -excess_[sink];
            std::uint32_t v = sink;
            while (parent_bit_[v] >= 0) {
                const int bit = parent_bit_[v];
                const std::uint32_t u = v ^ (std::uint32_t{1} << bit);
                double capacity;
                arc(u, bit, capacity);  // capacity of u -> v as used by the path
                theta = std::min(theta, capacity);
                v = u;
            }
            theta = std::min(theta, excess_[v]);

            // pass 2: apply the augmentation and accumulate the true path cost
            std::uint32_t w = sink;
            long path_cost = 0;
            while (parent_bit_[w] >= 0) {
                const int bit = parent_bit_[w];
                const std::uint32_t u = w ^ (std::uint32_t{1} << bit);
                double capacity;
                path_cost += arc(u, bit, capacity);
                const std::uint32_t base = u & ~(std::uint32_t{1} << bit);
                flow_[std::size_t{base} * n_ + bit] += (u == base) ? theta : -theta;
                w = u;
            }
            excess_[w] -= theta;
            excess_[sink] += theta;
            cost += theta * static_cast<double>(path_cost);

            for (std::uint32_t t : touched) {
                dist_[t] = kUnset;
                parent_bit_[t] = -1;
            }
            touched.clear();
        }
        return cost;
    }

private:
    static constexpr std::int32_t kUnset = std::numeric_limits<std::int32_t>::max();
    int n_;
    std::size_t size_;
    std::vector<double> excess_;
    std::vector<double> flow_;
    std::vector<std::int32_t> potential_;
    std::vector<std::int32_t> dist_;
    std::vector<std::int8_t> parent_bit_;
};

}  // namespace transport

/// Exact 1-Wasserstein distance between two distributions over spin
/// configurations with the Hamming ground metric, solved as a min-cost flow
/// on the support. Combined support is capped at 2^16 states; up to 16 spins
/// the flow runs on the hypercube graph, beyond that on the dense bipartite
/// transportation program.
inline double w1_hamming(const EmpiricalDistribution& mu, const EmpiricalDistribution& nu) {
    if (mu.n_spins != nu.n_spins) throw usage_error("w1_hamming: spin count mismatch");
    if (mu.support.size() + nu.support.size() > (std::size_t{1} << 16))
        throw capacity_error("w1_hamming: combined support exceeds 2^16 states");
    if (mu.support == nu.support) return 0.0;
    // the hypercube flow wins on broad supports; near-point-mass cases are
    // cheaper as a dense transportation program
    if (mu.n_spins <= 16 && std::min(mu.support.size(), nu.support.size()) > 8)
        return transport::HypercubeFlow(mu.n_spins, mu.support, nu.support).solve();
    std::vector<double> a, b;
    std::vector<std::uint64_t> ca, cb;
    a.reserve(mu.support.size());
    ca.reserve(mu.support.size());
    for (const auto& [cfg, p] : mu.support) {
        ca.push_back(cfg);
        a.push_back(p);
    }
    b.reserve(nu.support.size());
    cb.reserve(nu.support.size());
    for (const auto& [cfg, p] : nu.support) {
        cb.push_back(cfg);
        b.push_back(p);
    }
    auto cost = [&ca, &cb](int i, int j) {
        return static_cast<double>(std::popcount(ca[i] ^ cb[j]));
    };
    return transport::min_cost_transport(std::move(a), std::move(b), cost);
}

}  // namespace pimnet
