#include <catch2/catch_amalgamated.hpp>

#include "pimnet/gibbs.hpp"

using namespace pimnet;

TEST_CASE("single free spin is uniform", "[gibbs]") {
    auto inst = detail::build_instance(2, {{0, 1, 0.0}}, InstanceKind::custom, "free");
    const auto t = enumerate_gibbs(inst, 3.0);
    for (double p : t.probs) CHECK(p == Catch::Approx(0.25));
}

TEST_CASE("two-spin ferromagnet concentrates on the ground pair", "[gibbs]") {
    auto inst = detail::build_instance(2, {{0, 1, 1.0}}, InstanceKind::custom, "pair");
    const auto t = enumerate_gibbs(inst, 30.0);
    // configs 0b00 (both -1) and 0b11 (both +1) are the ground states
    CHECK(t.probs[0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(t.probs[3] == Catch::Approx(0.5).margin(1e-12));
    CHECK(t.probs[1] < 1e-12);
}

TEST_CASE("normalization is exact and beta=0 is uniform", "[gibbs]") {
    const auto inst = gen_sk(10, 4);
    const auto t = enumerate_gibbs(inst, 2.5);
    double sum = 0.0;
    for (double p : t.probs) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    const auto u = enumerate_gibbs(inst, 0.0);
    for (double p : u.probs) CHECK(p == Catch::Approx(1.0 / 1024));
    CHECK_THROWS_AS(enumerate_gibbs(inst, -1.0), usage_error);
}

TEST_CASE("gray-code energies match direct evaluation", "[gibbs]") {
    const auto inst = gen_sk(8, 77);
    const auto energies = enumerate_energies(inst);
    for (std::uint64_t k = 0; k < energies.size(); k += 13) {
        const auto s = SpinConfig::from_packed(k, inst.n);
        CHECK(energies[k] == Catch::Approx(energy(inst, s)).margin(1e-10));
    }
}

TEST_CASE("lattice ground states are the two uniform configs", "[gibbs]") {
    const auto inst = gen_lattice(4, 3, true, 1.0);
    const auto g = ground_states(inst);
    CHECK(g.energy == Catch::Approx(-24.0));
    REQUIRE(g.configs.size() == 2);
    CHECK(g.configs[0] == 0);
    CHECK(g.configs[1] == (std::uint64_t{1} << 12) - 1);

    const auto t = enumerate_gibbs(inst, 10.0);
    std::uint64_t argmax = 0;
    for (std::uint64_t k = 1; k < t.probs.size(); ++k)
        if (t.probs[k] > t.probs[argmax]) argmax = k;
    CHECK((argmax == 0 || argmax == (std::uint64_t{1} << 12) - 1));
}

TEST_CASE("maxcut optimum equals energy minimum through the affine relation", "[gibbs]") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto inst = gen_er(10, 25, seed);
        const auto energies = enumerate_energies(inst);
        double emin = energies[0];
        std::uint64_t argmin = 0;
        for (std::uint64_t k = 1; k < energies.size(); ++k)
            if (energies[k] < emin) {
                emin = energies[k];
                argmin = k;
            }
        double cmax = -1e300;
        for (std::uint64_t k = 0; k < energies.size(); ++k)
            cmax = std::max(cmax,
                            cut_value(inst, SpinConfig::from_packed(k, inst.n)));
        CHECK(cut_value(inst, SpinConfig::from_packed(argmin, inst.n)) ==
              Catch::Approx(cmax));
    }
}

TEST_CASE("enumeration cap", "[gibbs]") {
    ProblemInstance big;
    big.n = 25;
    big.couplings.resize(25, 25);
    big.field = Eigen::VectorXd::Zero(25);
    CHECK_THROWS_AS(enumerate_energies(big), capacity_error);
}
