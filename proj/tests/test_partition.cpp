#include <catch2/catch_amalgamated.hpp>

#include "pimnet/partition.hpp"

using namespace pimnet;

TEST_CASE("contiguous partition sizes", "[partition]") {
    const auto p = make_contiguous_partition(12, 4);
    REQUIRE(p.b() == 4);
    for (const auto& blk : p.blocks) CHECK(blk.size() == 3);

    const auto mono = make_contiguous_partition(12, 1);
    CHECK(mono.blocks[0].size() == 12);

    const auto odd = make_contiguous_partition(10, 4);
    std::vector<std::size_t> sizes;
    for (const auto& blk : odd.blocks) sizes.push_back(blk.size());
    CHECK(sizes == std::vector<std::size_t>{3, 3, 2, 2});

    CHECK_THROWS_AS(make_contiguous_partition(3, 4), usage_error);
}

TEST_CASE("split reproduces J exactly and respects block structure", "[partition]") {
    const auto inst = gen_er(24, 80, 5, {1.0, -2.0, 0.5});
    const auto p = make_contiguous_partition(24, 3);
    const auto sc = split(inst, p);

    SparseSym sum = sc.j_int + sc.j_ext;
    CHECK((SparseSym(sum - inst.couplings)).norm() == 0.0);
    for (int i = 0; i < inst.n; ++i) {
        for (SparseSym::InnerIterator it(sc.j_int, i); it; ++it)
            CHECK(p.block_of[i] == p.block_of[it.col()]);
        for (SparseSym::InnerIterator it(sc.j_ext, i); it; ++it)
            CHECK(p.block_of[i] != p.block_of[it.col()]);
    }
}

TEST_CASE("b=1 split has empty externals; full split has empty internals", "[partition]") {
    const auto inst = gen_sk(6, 2);
    const auto whole = split(inst, make_contiguous_partition(6, 1));
    CHECK(whole.j_ext.nonZeros() == 0);
    CHECK((SparseSym(whole.j_int - inst.couplings)).norm() == 0.0);

    auto pair = detail::build_instance(2, {{0, 1, 1.0}}, InstanceKind::custom, "pair");
    const auto cut_all = split(pair, make_contiguous_partition(2, 2));
    CHECK(cut_all.j_int.nonZeros() == 0);
    CHECK(cut_all.j_ext.coeff(0, 1) == 1.0);
}

TEST_CASE("split commutes with consistent relabeling", "[partition]") {
    const auto inst = gen_er(12, 30, 8);
    const auto p = make_contiguous_partition(12, 3);
    const auto sc = split(inst, p);

    // rotate labels by 5
    std::vector<int> perm(12);
    for (int i = 0; i < 12; ++i) perm[i] = (i + 5) % 12;
    std::vector<detail::EdgeEntry> edges;
    for (int i = 0; i < inst.n; ++i)
        for (SparseSym::InnerIterator it(inst.couplings, i); it; ++it)
            if (it.col() > i) {
                int a = perm[i], b = perm[it.col()];
                edges.push_back({std::min(a, b), std::max(a, b), it.value()});
            }
    const auto relabeled =
        detail::build_instance(12, std::move(edges), InstanceKind::custom, "perm");
    std::vector<std::vector<int>> pblocks(p.b());
    for (int bi = 0; bi < p.b(); ++bi) {
        for (int i : p.blocks[bi]) pblocks[bi].push_back(perm[i]);
        std::sort(pblocks[bi].begin(), pblocks[bi].end());
    }
    const auto sc2 = split(relabeled, Partition::from_blocks(12, pblocks));
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            CHECK(sc.j_int.coeff(i, j) == Catch::Approx(sc2.j_int.coeff(perm[i], perm[j])));
            CHECK(sc.j_ext.coeff(i, j) == Catch::Approx(sc2.j_ext.coeff(perm[i], perm[j])));
        }
}

TEST_CASE("random partition is balanced and seeded", "[partition]") {
    const auto a = make_random_partition(100, 7, 3);
    const auto b = make_random_partition(100, 7, 3);
    const auto c = make_random_partition(100, 7, 4);
    CHECK(a.blocks == b.blocks);
    CHECK(a.blocks != c.blocks);
    for (const auto& blk : a.blocks) {
        CHECK(blk.size() >= 14);
        CHECK(blk.size() <= 15);
    }
}
