#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "pimnet/errors.hpp"
#include "pimnet/problem.hpp"
#include "pimnet/rng.hpp"

namespace pimnet {

/// Assignment of spins to B disjoint, nonempty blocks covering [0, n).
struct Partition {
    int n = 0;
    std::vector<std::vector<int>> blocks;
    std::vector<int> block_of;  // spin index -> block index

    int b() const { return static_cast<int>(blocks.size()); }

    static Partition from_blocks(int n, std::vector<std::vector<int>> blocks) {
        Partition p;
        p.n = n;
        p.blocks = std::move(blocks);
        p.block_of.assign(n, -1);
        for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
            if (p.blocks[bi].empty()) throw usage_error("partition: empty block");
            for (int i : p.blocks[bi]) {
                if (i < 0 || i >= n) throw usage_error("partition: index out of range");
                if (p.block_of[i] != -1) throw usage_error("partition: blocks not disjoint");
                p.block_of[i] = static_cast<int>(bi);
            }
        }
        for (int i = 0; i < n; ++i)
            if (p.block_of[i] == -1) throw usage_error("partition: blocks do not cover [0,n)");
        return p;
    }
};

/// Contiguous index ranges of size ceil(n/b) or floor(n/b); the first n%b
/// blocks take the larger size.
inline Partition make_contiguous_partition(int n, int b) {
    if (b < 1 || b > n) throw usage_error("partition: need 1 <= b <= n");
    std::vector<std::vector<int>> blocks(b);
    const int base = n / b, extra = n % b;
    int next = 0;
    for (int bi = 0; bi < b; ++bi) {
        const int size = base + (bi < extra ? 1 : 0);
        blocks[bi].resize(size);
        std::iota(blocks[bi].begin(), blocks[bi].end(), next);
        next += size;
    }
    return Partition::from_blocks(n, std::move(blocks));
}

/// Uniformly random balanced assignment (a shuffled contiguous partition),
/// used for partition-sensitivity studies.
inline Partition make_random_partition(int n, int b, std::uint64_t seed) {
    if (b < 1 || b > n) throw usage_error("partition: need 1 <= b <= n");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    CounterRng rng(seed);
    for (int i = n - 1; i > 0; --i) {
        const auto j = rng.uniform_index(RngContext::misc, 0, i, 0, i + 1);
        std::swap(perm[i], perm[j]);
    }
    const Partition contig = make_contiguous_partition(n, b);
    std::vector<std::vector<int>> blocks(b);
    for (int bi = 0; bi < b; ++bi) {
        for (int i : contig.blocks[bi]) blocks[bi].push_back(perm[i]);
        std::sort(blocks[bi].begin(), blocks[bi].end());
    }
    return Partition::from_blocks(n, std::move(blocks));
}

/// J split into within-block (block diagonal under the partition) and
/// cross-block parts; j_int + j_ext reproduces J entrywise.
struct SplitCouplings {
    SparseSym j_int;
    SparseSym j_ext;
};

inline SplitCouplings split(const ProblemInstance& inst, const Partition& p) {
    if (p.n != inst.n) throw usage_error("split: partition/instance size mismatch");
    std::vector<Eigen::Triplet<double>> ti, te;
    for (int i = 0; i < inst.n; ++i) {
        for (SparseSym::InnerIterator it(inst.couplings, i); it; ++it) {
            const int j = static_cast<int>(it.col());
            if (p.block_of[i] == p.block_of[j])
                ti.emplace_back(i, j, it.value());
            else
                te.emplace_back(i, j, it.value());
        }
    }
    SplitCouplings s;
    s.j_int.resize(inst.n, inst.n);
    s.j_ext.resize(inst.n, inst.n);
    s.j_int.setFromTriplets(ti.begin(), ti.end());
    s.j_ext.setFromTriplets(te.begin(), te.end());
    s.j_int.makeCompressed();
    s.j_ext.makeCompressed();
    return s;
}

}  // namespace pimnet
