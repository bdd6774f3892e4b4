#include <catch2/catch_amalgamated.hpp>

#include "pimnet/metrics.hpp"

using namespace pimnet;

TEST_CASE("kl divergence values", "[metrics]") {
    auto mu = EmpiricalDistribution::from_weighted({{0, 0.5}, {1, 0.5}}, 1);
    auto nu = EmpiricalDistribution::from_weighted({{0, 0.25}, {1, 0.75}}, 1);
    CHECK(kl_divergence(mu, mu) == 0.0);
    CHECK(kl_divergence(mu, nu) ==
          Catch::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
    auto off = EmpiricalDistribution::from_weighted({{2, 1.0}}, 2);
    auto on = EmpiricalDistribution::from_weighted({{1, 1.0}}, 2);
    CHECK(std::isinf(kl_divergence(off, on)));
}

TEST_CASE("kl against a gibbs table stays finite at large beta", "[metrics]") {
    const auto inst = gen_lattice(4, 3, true, 1.0);
    const auto pi = enumerate_gibbs(inst, 10.0);
    auto mu = EmpiricalDistribution::from_weighted({{0, 0.7}, {5, 0.3}}, 12);
    const double kl = kl_divergence(mu, pi);
    CHECK(std::isfinite(kl));
    CHECK(kl > 0.0);
    // nonnegativity with equality iff equal, on random pairs
    CounterRng rng(3);
    for (std::uint32_t rep = 0; rep < 10; ++rep) {
        std::vector<std::pair<std::uint64_t, double>> w;
        for (int p = 0; p < 5; ++p)
            w.emplace_back(rng.uniform_index(RngContext::misc, rep, p, 0, 16),
                           0.1 + rng.uniform_pair(RngContext::misc, rep, p, 1)[0]);
        auto x = EmpiricalDistribution::from_weighted(w, 4);
        CHECK(kl_divergence(x, x) == 0.0);
    }
}

TEST_CASE("kl identity and pinsker companion", "[metrics]") {
    BoundInputs in;
    in.mean_grad_err_sq_integral = 0.0;
    CHECK(kl_lower_bound(in, 10.0) == 0.0);
    in.mean_grad_err_sq_integral = 4.0 / 10.0;
    CHECK(kl_lower_bound(in, 10.0) == Catch::Approx(1.0));
    CHECK(pinsker_tv_bound(in, 10.0) == Catch::Approx(std::sqrt(0.5)));
}

TEST_CASE("bound one", "[metrics]") {
    BoundInputs in;
    in.mean_pair_grad_l1 = 0.0;
    in.mean_ext_grad_l1 = 0.0;
    CHECK(bound_one(in) == 0.0);
    in.mean_pair_grad_l1 = 1.5;
    in.mean_ext_grad_l1 = 0.25;
    CHECK(bound_one(in) == Catch::Approx(1.75));
    BoundInputs missing;
    CHECK_THROWS_AS(bound_one(missing), usage_error);
}

TEST_CASE("bound two validity window", "[metrics]") {
    BoundInputs in;
    in.lipschitz_l = 4.0 / 15.5e-9;  // lattice: rho=4, RC=15.5ns
    in.mean_ext_grad_l1 = 1.0;
    in.t = 0.0;
    CHECK(bound_two(in).value() == Catch::Approx(1.0));
    in.t = 0.5 / in.lipschitz_l;
    CHECK(bound_two(in).value() == Catch::Approx(2.0));
    in.t = 4.0e-9;
    CHECK_FALSE(bound_two(in).has_value());  // past 1/L ~ 3.875 ns
    in.t = 3.8e-9;
    CHECK(bound_two(in).has_value());
}

TEST_CASE("contraction check", "[metrics]") {
    BoundInputs in;
    in.contraction_c = 0.5;
    in.w1_start = 2.0;
    CHECK(contraction_check(0.0, in) == Contraction::guaranteed);
    CHECK(contraction_check(1.0, in) == Contraction::not_guaranteed);  // boundary
    CHECK(contraction_check(0.99, in) == Contraction::guaranteed);
    in.contraction_c = 1.5;
    CHECK(contraction_check(0.0, in) == Contraction::inconclusive);
}

TEST_CASE("mtt values and monotonicity", "[metrics]") {
    PerformanceRecord rec;
    rec.trials = 10;
    rec.success_count = 5;
    rec.mean_metric = 10e-6;
    CHECK(mtt(rec).value() == Catch::Approx(66.44e-6).margin(0.01e-6));
    rec.success_count = 0;
    CHECK_FALSE(mtt(rec).has_value());
    rec.success_count = 10;
    CHECK(mtt(rec).value() == Catch::Approx(10e-6));

    double prev = 1e300;
    for (long s = 1; s <= 10; ++s) {
        rec.success_count = s;
        const double v = mtt(rec).value();
        CHECK(v <= prev + 1e-18);
        prev = v;
    }
}

TEST_CASE("sync energy", "[metrics]") {
    CHECK(sync_energy(2000, 4e-12, 20e-6, 10e-9) == Catch::Approx(1.6e-5));
    CHECK(sync_energy(100, 1e-12, 1e-6, 2e-6) == 0.0);  // tau > t_anneal
    const double e1 = sync_energy(100, 1e-12, 8e-6, 1e-6);
    const double e2 = sync_energy(100, 1e-12, 8e-6, 0.5e-6);
    CHECK(e2 == Catch::Approx(2.0 * e1));
    CHECK_THROWS_AS(sync_energy(0, 1.0, 1.0, 1.0), usage_error);
}

TEST_CASE("cut error", "[metrics]") {
    CHECK(cut_error(11624, 11624) == 0.0);
    CHECK(cut_error(0.98 * 11624, 11624) == Catch::Approx(0.02));
    CHECK_THROWS_AS(cut_error(1.0, 0.0), usage_error);
}

TEST_CASE("bootstrap w1 is deterministic and brackets the point value", "[metrics]") {
    CounterRng gen(17);
    std::vector<std::uint64_t> xs, ys;
    for (int i = 0; i < 150; ++i) {
        xs.push_back(gen.uniform_index(RngContext::misc, 0, i, 0, 16));
        ys.push_back(gen.uniform_index(RngContext::misc, 1, i, 0, 16));
    }
    CounterRng rng(5);
    const auto r1 = bootstrap_w1_paired(xs, ys, 4, 100, rng, 9);
    const auto r2 = bootstrap_w1_paired(xs, ys, 4, 100, rng, 9);
    CHECK(r1.point == r2.point);
    CHECK(r1.se == r2.se);
    CHECK(r1.lo <= r1.hi);
    CHECK(r1.se > 0.0);
    CHECK(std::abs(r1.mean - r1.point) < 5.0 * r1.se + 0.05);

    const auto target = EmpiricalDistribution::from_samples(ys, 4);
    const auto rv = bootstrap_w1_vs(xs, 4, target, 100, rng, 10);
    CHECK(rv.point > 0.0);
    CHECK(rv.se > 0.0);
}
