#pragma once

#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pimnet/errors.hpp"
#include "pimnet/hash.hpp"
#include "pimnet/rng.hpp"

namespace pimnet {

using SparseSym = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class InstanceKind { gset, sk, lattice, custom };

inline const char* to_string(InstanceKind k) {
    switch (k) {
        case InstanceKind::gset: return "gset";
        case InstanceKind::sk: return "sk";
        case InstanceKind::lattice: return "lattice";
        default: return "custom";
    }
}

/// A spin configuration s in {-1,+1}^n.
struct SpinConfig {
    std::vector<std::int8_t> spins;

    int n() const { return static_cast<int>(spins.size()); }

    // Packed index: bit i of the result is 1 iff spin i == +1. Requires n <= 64.
    std::uint64_t packed() const {
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < spins.size(); ++i)
            if (spins[i] > 0) k |= (std::uint64_t{1} << i);
        return k;
    }

    static SpinConfig from_packed(std::uint64_t k, int n) {
        SpinConfig s;
        s.spins.resize(n);
        for (int i = 0; i < n; ++i) s.spins[i] = (k >> i) & 1 ? 1 : -1;
        return s;
    }
};

/// An Ising problem: symmetric couplings J (zero diagonal), optional field h.
/// Energy convention throughout: H(s) = -1/2 s^T J s - h^T s.
struct ProblemInstance {
    int n = 0;
    SparseSym couplings;      // dimensionless problem weights
    Eigen::VectorXd field;    // length n, may be all-zero
    InstanceKind kind = InstanceKind::custom;
    std::string name;
    std::uint64_t seed = 0;   // generator seed, 0 for parsed instances

    bool has_field() const { return field.size() > 0 && field.cwiseAbs().maxCoeff() > 0.0; }

    std::size_t edge_count() const {
        return static_cast<std::size_t>(couplings.nonZeros()) / 2;
    }
};

namespace detail {

struct EdgeEntry {
    int u, v;      // u < v
    double w;
};

inline ProblemInstance build_instance(int n, std::vector<EdgeEntry> edges, InstanceKind kind,
                                      std::string name, std::uint64_t seed = 0) {
    if (n < 1) throw usage_error("instance needs at least one spin");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(edges.size() * 2);
    for (const auto& e : edges) {
        if (e.u == e.v) throw usage_error("self-coupling not allowed");
        trip.emplace_back(e.u, e.v, e.w);
        trip.emplace_back(e.v, e.u, e.w);
    }
    ProblemInstance inst;
    inst.n = n;
    inst.couplings.resize(n, n);
    inst.couplings.setFromTriplets(trip.begin(), trip.end());
    inst.couplings.makeCompressed();
    inst.field = Eigen::VectorXd::Zero(n);
    inst.kind = kind;
    inst.name = std::move(name);
    inst.seed = seed;
    return inst;
}

}  // namespace detail

/// H(s) = -1/2 s^T J s - h^T s. The 1/2 absorbs the double count of symmetric pairs.
inline double energy(const ProblemInstance& inst, const SpinConfig& s) {
    if (s.n() != inst.n) throw usage_error("energy: spin count mismatch");
    double quad = 0.0;
    for (int i = 0; i < inst.n; ++i) {
        double row = 0.0;
        for (SparseSym::InnerIterator it(inst.couplings, i); it; ++it)
            row += it.value() * s.spins[it.col()];
        quad += s.spins[i] * row;
    }
    double lin = 0.0;
    if (inst.field.size() > 0)
        for (int i = 0; i < inst.n; ++i) lin += inst.field[i] * s.spins[i];
    return -0.5 * quad - lin;
}

/// Total edge weight of the MaxCut graph W = -J (each pair counted once).
inline double total_cut_weight(const ProblemInstance& inst) {
    double sum = 0.0;
    for (int i = 0; i < inst.n; ++i)
        for (SparseSym::InnerIterator it(inst.couplings, i); it; ++it)
            if (it.col() > i) sum += -it.value();
    return sum;
}

/// Cut value C = 1/2 (sum_E W_uv - H(s)) for a MaxCut encoding J = -W, h = 0.
inline double cut_value(const ProblemInstance& inst, const SpinConfig& s) {
    if (inst.has_field()) throw usage_error("cut_value: nonzero field, cut undefined");
    return 0.5 * (total_cut_weight(inst) - energy(inst, s));
}

// ---- GSet format ------------------------------------------------------------
// "n m" header then m lines "u v w" with 1-based node indices. The stored
// coupling matrix is J = -W (MaxCut encoding).

inline ProblemInstance parse_gset(std::istream& in, const std::string& name = "gset") {
    std::string line;
    long lineno = 0;
    auto next_line = [&](bool required) -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        if (required) throw parse_error("unexpected end of file", lineno + 1);
        return false;
    };

    next_line(true);
    std::istringstream hdr(line);
    long n = 0, m = 0;
    if (!(hdr >> n >> m) || n < 1 || m < 0)
        throw parse_error("malformed header, expected \"n m\"", lineno);

    std::vector<detail::EdgeEntry> edges;
    edges.reserve(m);
    std::set<std::pair<int, int>> seen;
    for (long e = 0; e < m; ++e) {
        next_line(true);
        std::istringstream ss(line);
        long u = 0, v = 0;
        double w = 0.0;
        if (!(ss >> u >> v >> w)) throw parse_error("malformed edge line", lineno);
        std::string rest;
        if (ss >> rest) throw parse_error("trailing tokens on edge line", lineno);
        if (u < 1 || u > n || v < 1 || v > n)
            throw parse_error("node index out of range", lineno);
        if (u == v) throw parse_error("self-loop", lineno);
        int a = static_cast<int>(std::min(u, v)) - 1;
        int b = static_cast<int>(std::max(u, v)) - 1;
        if (!seen.emplace(a, b).second) throw parse_error("duplicate edge", lineno);
        edges.push_back({a, b, -w});  // J = -W
    }
    if (next_line(false)) throw parse_error("trailing content after edge list", lineno);
    return detail::build_instance(static_cast<int>(n), std::move(edges), InstanceKind::gset,
                                  name);
}

namespace detail {
inline std::string format_weight(double w) {
    char buf[40];
    if (w == std::floor(w) && std::abs(w) < 1e15)
        std::snprintf(buf, sizeof(buf), "%.0f", w);
    else
        std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}
}  // namespace detail

/// Emits the same GSet text format, edges canonicalized (u < v, sorted).
inline std::string serialize_gset(const ProblemInstance& inst) {
    std::vector<std::pair<std::pair<int, int>, double>> edges;
    for (int i = 0; i < inst.n; ++i)
        for (SparseSym::InnerIterator it(inst.couplings, i); it; ++it)
            if (it.col() > i) edges.push_back({{i, static_cast<int>(it.col())}, -it.value()});
    std::sort(edges.begin(), edges.end());
    std::string out = std::to_string(inst.n) + " " + std::to_string(edges.size()) + "\n";
    for (const auto& [uv, w] : edges)
        out += std::to_string(uv.first + 1) + " " + std::to_string(uv.second + 1) + " " +
               detail::format_weight(w) + "\n";
    return out;
}

// ---- Generators -------------------------------------------------------------

/// Sherrington-Kirkpatrick: J_ij ~ N(0, 1/n) i.i.d. for i < j, mirrored, h = 0.
inline ProblemInstance gen_sk(int n, std::uint64_t seed) {
    if (n < 2) throw usage_error("gen_sk: n must be >= 2");
    CounterRng rng(seed);
    const double sigma = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<detail::EdgeEntry> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    std::uint64_t pair = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++pair) {
            const auto z = rng.normal_pair(RngContext::instance, 0, pair, 0);
            edges.push_back({i, j, sigma * z[0]});
        }
    }
    return detail::build_instance(n, std::move(edges), InstanceKind::sk,
                                  "sk-n" + std::to_string(n) + "-s" + std::to_string(seed),
                                  seed);
}

/// Nearest-neighbor grid, uniform coupling; periodic wraps both dimensions.
/// Wrap edges that duplicate an existing edge (dimension of size 2) are merged.
inline ProblemInstance gen_lattice(int rows, int cols, bool periodic, double coupling) {
    if (rows < 2 || cols < 2) throw usage_error("gen_lattice: rows and cols must be >= 2");
    const int n = rows * cols;
    auto idx = [cols](int r, int c) { return r * cols + c; };
    std::set<std::pair<int, int>> seen;
    std::vector<detail::EdgeEntry> edges;
    auto add = [&](int a, int b) {
        if (a == b) return;
        auto key = std::minmax(a, b);
        if (seen.emplace(key.first, key.second).second)
            edges.push_back({key.first, key.second, coupling});
    };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) add(idx(r, c), idx(r, c + 1));
            else if (periodic) add(idx(r, c), idx(r, 0));
            if (r + 1 < rows) add(idx(r, c), idx(r + 1, c));
            else if (periodic) add(idx(r, c), idx(0, c));
        }
    }
    std::string name = "lattice-" + std::to_string(rows) + "x" + std::to_string(cols) +
                       (periodic ? "-periodic" : "-open");
    return detail::build_instance(n, std::move(edges), InstanceKind::lattice, std::move(name));
}

/// Erdos-Renyi G(n, m) with weights drawn from the given set (bimodal by default).
inline ProblemInstance gen_er(int n, long m, std::uint64_t seed,
                              std::vector<double> weights = {1.0, -1.0}) {
    if (n < 2) throw usage_error("gen_er: n must be >= 2");
    const long max_edges = static_cast<long>(n) * (n - 1) / 2;
    if (m < 0 || m > max_edges) throw usage_error("gen_er: edge count out of range");
    CounterRng rng(seed);
    std::set<std::pair<int, int>> seen;
    std::vector<detail::EdgeEntry> edges;
    edges.reserve(m);
    std::uint64_t draw = 0;
    while (static_cast<long>(edges.size()) < m) {
        const int u = static_cast<int>(rng.uniform_index(RngContext::instance, 0, draw, 0, n));
        const int v = static_cast<int>(rng.uniform_index(RngContext::instance, 0, draw, 1, n));
        const std::uint64_t wi =
            rng.uniform_index(RngContext::instance, 0, draw, 2, weights.size());
        ++draw;
        if (u == v) continue;
        auto key = std::minmax(u, v);
        if (!seen.emplace(key.first, key.second).second) continue;
        // MaxCut encoding: J = -W
        edges.push_back({key.first, key.second, -weights[wi]});
    }
    return detail::build_instance(n, std::move(edges), InstanceKind::custom,
                                  "er-n" + std::to_string(n) + "-m" + std::to_string(m) + "-s" +
                                      std::to_string(seed),
                                  seed);
}

/// Barabasi-Albert preferential attachment, m_attach edges per new node,
/// weights from the given set. MaxCut encoding (J = -W).
inline ProblemInstance gen_ba(int n, int m_attach, std::uint64_t seed,
                              std::vector<double> weights = {1.0, -1.0}) {
    if (n < 2 || m_attach < 1 || m_attach >= n)
        throw usage_error("gen_ba: need 1 <= m_attach < n");
    CounterRng rng(seed);
    std::vector<int> endpoints;  // node repeated once per incident edge
    std::set<std::pair<int, int>> seen;
    std::vector<detail::EdgeEntry> edges;
    std::uint64_t draw = 0;
    // seed clique over the first m_attach+1 nodes
    for (int i = 0; i <= m_attach; ++i)
        for (int j = i + 1; j <= m_attach; ++j) {
            seen.emplace(i, j);
            const std::uint64_t wi =
                rng.uniform_index(RngContext::instance, 0, draw++, 2, weights.size());
            edges.push_back({i, j, -weights[wi]});
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    for (int v = m_attach + 1; v < n; ++v) {
        int added = 0;
        while (added < m_attach) {
            const std::uint64_t pick =
                rng.uniform_index(RngContext::instance, 0, draw, 0, endpoints.size());
            const std::uint64_t wi =
                rng.uniform_index(RngContext::instance, 0, draw, 2, weights.size());
            ++draw;
            const int u = endpoints[pick];
            if (u == v) continue;
            auto key = std::minmax(u, v);
            if (!seen.emplace(key.first, key.second).second) continue;
            edges.push_back({key.first, key.second, -weights[wi]});
            ++added;
        }
        for (int k = 0; k < m_attach; ++k) endpoints.push_back(v);
        for (std::size_t e = edges.size() - m_attach; e < edges.size(); ++e)
            endpoints.push_back(edges[e].u == v ? edges[e].v : edges[e].u);
    }
    return detail::build_instance(n, std::move(edges), InstanceKind::custom,
                                  "ba-n" + std::to_string(n) + "-m" + std::to_string(m_attach) +
                                      "-s" + std::to_string(seed),
                                  seed);
}

/// Content hash over the canonical serialization plus field and metadata.
inline std::string instance_hash(const ProblemInstance& inst) {
    Sha256 h;
    h.update(serialize_gset(inst));
    if (inst.has_field()) {
        for (int i = 0; i < inst.n; ++i) {
            const double v = inst.field[i];
            h.update(&v, sizeof(v));
        }
    }
    return h.hex_digest();
}

inline std::string instance_metadata_json(const ProblemInstance& inst) {
    std::ostringstream os;
    os << "{\"name\":\"" << inst.name << "\",\"kind\":\"" << to_string(inst.kind)
       << "\",\"n\":" << inst.n << ",\"edges\":" << inst.edge_count()
       << ",\"seed\":" << inst.seed << ",\"hash\":\"" << instance_hash(inst) << "\"}";
    return os.str();
}

}  // namespace pimnet
