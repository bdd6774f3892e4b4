#include <catch2/catch_amalgamated.hpp>

#include "pimnet/spectrum.hpp"

using namespace pimnet;

TEST_CASE("two-spin bond spectrum", "[spectrum]") {
    auto inst = detail::build_instance(2, {{0, 1, 1.0}}, InstanceKind::custom, "pair");
    const auto sc = split(inst, make_contiguous_partition(2, 1));
    const auto r = spectrum(inst, sc);
    CHECK(r.rho_full == Catch::Approx(1.0));
    CHECK(r.mean_abs_lambda == Catch::Approx(1.0));
    CHECK(r.rho_int == Catch::Approx(1.0));
    CHECK(r.rho_ext == 0.0);
}

TEST_CASE("torus ferromagnet has spectral radius 4", "[spectrum]") {
    const auto inst = gen_lattice(4, 3, true, 1.0);
    const auto sc = split(inst, make_contiguous_partition(12, 1));
    const auto r = spectrum(inst, sc);
    CHECK(r.rho_full == Catch::Approx(4.0).epsilon(1e-8));
    CHECK(r.dominant_sign == 1);
    CHECK(r.mean_abs_lambda <= r.rho_full + 1e-12);
}

TEST_CASE("b=1 internal spectrum equals the full spectrum", "[spectrum]") {
    const auto inst = gen_sk(40, 6);
    const auto sc = split(inst, make_contiguous_partition(40, 1));
    const auto r = spectrum(inst, sc);
    CHECK(r.rho_int == Catch::Approx(r.rho_full));
    CHECK(r.rho_int <= r.rho_full + r.rho_ext + 1e-9);
}

TEST_CASE("iterative fallback agrees with the dense path", "[spectrum]") {
    const auto inst = gen_er(300, 1500, 13);
    const auto sc = split(inst, make_contiguous_partition(300, 4));
    const auto dense = spectrum(inst, sc);
    const auto full = detail::power_extremal(inst.couplings);
    CHECK(full.radius == Catch::Approx(dense.rho_full).epsilon(1e-6));
    CHECK(detail::power_extremal(sc.j_int).radius ==
          Catch::Approx(dense.rho_int).epsilon(1e-6));
    CHECK(detail::power_extremal(sc.j_ext).radius ==
          Catch::Approx(dense.rho_ext).epsilon(1e-6));
}

TEST_CASE("asymmetric input is rejected", "[spectrum]") {
    ProblemInstance bad;
    bad.n = 2;
    bad.couplings.resize(2, 2);
    std::vector<Eigen::Triplet<double>> t{{0, 1, 1.0}};
    bad.couplings.setFromTriplets(t.begin(), t.end());
    bad.field = Eigen::VectorXd::Zero(2);
    const auto sc = split(bad, make_contiguous_partition(2, 1));
    CHECK_THROWS_AS(spectrum(bad, sc), usage_error);
}

TEST_CASE("tau_flip scaling and mode ordering", "[spectrum]") {
    const auto inst = gen_lattice(4, 3, true, 1.0);
    const auto sc = split(inst, make_contiguous_partition(12, 1));
    const auto r = spectrum(inst, sc);
    const double rc = 15.5e-9;
    CHECK(tau_flip(r, rc, TauFlipMode::radius) == Catch::Approx(3.875e-9).epsilon(1e-6));
    CHECK(tau_flip(r, rc, TauFlipMode::mean_abs) >= tau_flip(r, rc, TauFlipMode::radius));

    for (std::uint64_t seed : {2u, 9u}) {
        const auto g = gen_er(64, 256, seed);
        const auto gsc = split(g, make_contiguous_partition(64, 4));
        const auto gr = spectrum(g, gsc);
        CHECK(tau_flip(gr, rc, TauFlipMode::mean_abs) >=
              tau_flip(gr, rc, TauFlipMode::radius));
    }

    SpectrumReport empty;
    CHECK_THROWS_AS(tau_flip(empty, rc, TauFlipMode::radius), usage_error);
    CHECK_THROWS_AS(tau_flip(r, 0.0, TauFlipMode::radius), usage_error);
}
