#include <catch2/catch_amalgamated.hpp>
#include <bit>

#include "pimnet/transport.hpp"
#include "transport_oracle.hpp"

using namespace pimnet;

namespace {

// random distribution over <= max_points configs of an n-spin cube
EmpiricalDistribution random_dist(int n_spins, int max_points, std::uint64_t seed,
                                  std::uint32_t tag) {
    CounterRng rng(seed);
    const int points = 1 + static_cast<int>(rng.uniform_index(RngContext::misc, tag, 0, 0,
                                                              max_points));
    std::vector<std::pair<std::uint64_t, double>> w;
    for (int p = 0; p < points; ++p) {
        const auto cfg = rng.uniform_index(RngContext::misc, tag, 1 + p, 0,
                                           std::uint64_t{1} << n_spins);
        const double mass =
            0.05 + rng.uniform_pair(RngContext::misc, tag, 1 + p, 1)[0];
        w.emplace_back(cfg, mass);
    }
    return EmpiricalDistribution::from_weighted(w, n_spins);
}

}  // namespace

TEST_CASE("w1 trivial cases", "[transport]") {
    auto mu = EmpiricalDistribution::from_weighted({{0b000, 1.0}}, 3);
    auto nu = EmpiricalDistribution::from_weighted({{0b011, 1.0}}, 3);
    CHECK(w1_hamming(mu, mu) == 0.0);
    CHECK(w1_hamming(mu, nu) == Catch::Approx(2.0));

    auto half = EmpiricalDistribution::from_weighted({{0b00, 0.5}, {0b11, 0.5}}, 2);
    auto shifted = EmpiricalDistribution::from_weighted({{0b00, 0.25}, {0b11, 0.75}}, 2);
    // move 0.25 mass across Hamming distance 2
    CHECK(w1_hamming(half, shifted) == Catch::Approx(0.5));
}

TEST_CASE("network simplex matches the brute-force plan oracle", "[transport]") {
    for (std::uint32_t rep = 0; rep < 60; ++rep) {
        const int n_spins = 2 + rep % 3;
        const auto mu = random_dist(n_spins, 4, 1000 + rep, 2 * rep);
        const auto nu = random_dist(n_spins, 4, 2000 + rep, 2 * rep + 1);
        std::vector<double> a, b;
        std::vector<std::uint64_t> ca, cb;
        for (auto& [c, p] : mu.support) {
            ca.push_back(c);
            a.push_back(p);
        }
        for (auto& [c, p] : nu.support) {
            cb.push_back(c);
            b.push_back(p);
        }
        auto cost = [&](int i, int j) {
            return static_cast<double>(std::popcount(ca[i] ^ cb[j]));
        };
        const double expected = pimnet_test::oracle_transport(a, b, cost);
        CHECK(w1_hamming(mu, nu) == Catch::Approx(expected).margin(1e-9));
    }
}

TEST_CASE("simplex agrees with the oracle on non-metric costs", "[transport]") {
    CounterRng rng(77);
    for (std::uint32_t rep = 0; rep < 30; ++rep) {
        const int m = 2 + rng.uniform_index(RngContext::misc, rep, 0, 0, 3);
        const int k = 2 + rng.uniform_index(RngContext::misc, rep, 0, 1, 3);
        std::vector<double> a(m), b(k);
        double sa = 0, sb = 0;
        for (int i = 0; i < m; ++i)
            sa += a[i] = 0.1 + rng.uniform_pair(RngContext::misc, rep, 10 + i, 0)[0];
        for (int j = 0; j < k; ++j)
            sb += b[j] = 0.1 + rng.uniform_pair(RngContext::misc, rep, 20 + j, 0)[0];
        for (auto& v : a) v /= sa;
        for (auto& v : b) v /= sb;
        std::vector<double> c(m * k);
        for (int i = 0; i < m * k; ++i)
            c[i] = rng.uniform_pair(RngContext::misc, rep, 30 + i, 0)[0] * 5.0;
        auto cost = [&](int i, int j) { return c[i * k + j]; };
        const double expected = pimnet_test::oracle_transport(a, b, cost);
        const double got = transport::min_cost_transport(a, b, cost);
        CHECK(got == Catch::Approx(expected).margin(1e-9));
    }
}

TEST_CASE("w1 is a metric on random triples", "[transport]") {
    for (std::uint32_t rep = 0; rep < 20; ++rep) {
        const int n = 4;
        const auto x = random_dist(n, 6, 31, 3 * rep);
        const auto y = random_dist(n, 6, 37, 3 * rep + 1);
        const auto z = random_dist(n, 6, 41, 3 * rep + 2);
        const double xy = w1_hamming(x, y), yx = w1_hamming(y, x);
        const double yz = w1_hamming(y, z), xz = w1_hamming(x, z);
        CHECK(xy == Catch::Approx(yx).margin(1e-9));     // symmetry
        CHECK(xz <= xy + yz + 1e-9);                     // triangle inequality
        CHECK(w1_hamming(x, x) == 0.0);                  // identity
        if (x.support != y.support) CHECK(xy > 0.0);
    }
}

TEST_CASE("point-mass w1 equals the Hamming distance exactly", "[transport]") {
    CounterRng rng(8);
    for (std::uint32_t rep = 0; rep < 20; ++rep) {
        const auto c1 = rng.uniform_index(RngContext::misc, rep, 0, 0, 1 << 16);
        const auto c2 = rng.uniform_index(RngContext::misc, rep, 1, 0, 1 << 16);
        auto mu = EmpiricalDistribution::from_weighted({{c1, 1.0}}, 16);
        auto nu = EmpiricalDistribution::from_weighted({{c2, 1.0}}, 16);
        CHECK(w1_hamming(mu, nu) == static_cast<double>(std::popcount(c1 ^ c2)));
    }
}

TEST_CASE("capacity and mismatch guards", "[transport]") {
    auto mu = EmpiricalDistribution::from_weighted({{0, 1.0}}, 3);
    auto nu = EmpiricalDistribution::from_weighted({{0, 1.0}}, 4);
    CHECK_THROWS_AS(w1_hamming(mu, nu), usage_error);
}

TEST_CASE("hypercube flow and bipartite simplex agree on medium supports", "[transport]") {
    CounterRng rng(44);
    for (std::uint32_t rep = 0; rep < 8; ++rep) {
        const int n = 8 + rep % 3;
        std::vector<std::pair<std::uint64_t, double>> wa, wb;
        for (int i = 0; i < 50 + static_cast<int>(rep) * 20; ++i) {
            wa.emplace_back(rng.uniform_index(RngContext::misc, rep, i, 0, 1u << n),
                            0.05 + rng.uniform_pair(RngContext::misc, rep, i, 1)[0]);
            wb.emplace_back(rng.uniform_index(RngContext::misc, rep, i, 2, 1u << n),
                            0.05 + rng.uniform_pair(RngContext::misc, rep, i, 3)[0]);
        }
        const auto mu = EmpiricalDistribution::from_weighted(wa, n);
        const auto nu = EmpiricalDistribution::from_weighted(wb, n);
        const double cube = transport::HypercubeFlow(n, mu.support, nu.support).solve();
        std::vector<double> a, b;
        std::vector<std::uint64_t> ca, cb;
        for (auto& [c, p] : mu.support) {
            ca.push_back(c);
            a.push_back(p);
        }
        for (auto& [c, p] : nu.support) {
            cb.push_back(c);
            b.push_back(p);
        }
        const double simplex = transport::min_cost_transport(
            a, b, [&](int i, int j) { return double(std::popcount(ca[i] ^ cb[j])); });
        CHECK(cube == Catch::Approx(simplex).margin(1e-9));
    }
}

TEST_CASE("moderate-size solve against greedy upper bound sanity", "[transport]") {
    // 200-point supports: optimal cost must not exceed a greedy matching cost
    // and must be nonnegative
    CounterRng rng(90);
    std::vector<std::pair<std::uint64_t, double>> wa, wb;
    for (int i = 0; i < 200; ++i) {
        wa.emplace_back(rng.uniform_index(RngContext::misc, 1, i, 0, 1 << 12), 1.0);
        wb.emplace_back(rng.uniform_index(RngContext::misc, 2, i, 0, 1 << 12), 1.0);
    }
    auto mu = EmpiricalDistribution::from_weighted(wa, 12);
    auto nu = EmpiricalDistribution::from_weighted(wb, 12);
    const double w = w1_hamming(mu, nu);
    CHECK(w >= 0.0);
    CHECK(w <= 12.0);
    // identical-support fast path
    CHECK(w1_hamming(mu, mu) == 0.0);
}
