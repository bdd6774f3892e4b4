#include <catch2/catch_amalgamated.hpp>

#include "pimnet/hash.hpp"
#include "pimnet/rng.hpp"

using namespace pimnet;

TEST_CASE("philox blocks are deterministic and address-sensitive", "[rng-hash]") {
    CounterRng rng(42);
    const auto a = rng.block(RngContext::dynamics, 1, 2, 3);
    const auto b = rng.block(RngContext::dynamics, 1, 2, 3);
    CHECK(a.x == b.x);
    CHECK(rng.block(RngContext::dynamics, 1, 2, 4).x != a.x);
    CHECK(rng.block(RngContext::dynamics, 2, 2, 3).x != a.x);
    CHECK(rng.block(RngContext::init, 1, 2, 3).x != a.x);
    CHECK(CounterRng(43).block(RngContext::dynamics, 1, 2, 3).x != a.x);
}

TEST_CASE("normal stream has standard moments", "[rng-hash]") {
    CounterRng rng(7);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; i += 2) {
        const auto z = rng.normal_pair(RngContext::misc, 0, i / 2, 0);
        sum += z[0] + z[1];
        sum2 += z[0] * z[0] + z[1] * z[1];
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("uniform_index stays in range and covers values", "[rng-hash]") {
    CounterRng rng(99);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 7000; ++i)
        ++counts[rng.uniform_index(RngContext::misc, 1, i, 0, 7)];
    for (int c : counts) CHECK(c > 700);
}

TEST_CASE("sha256 matches FIPS 180-4 vectors", "[rng-hash]") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // streaming across block boundaries
    Sha256 h;
    std::string million(1000000, 'a');
    for (std::size_t i = 0; i < million.size(); i += 9973)
        h.update(million.data() + i, std::min<std::size_t>(9973, million.size() - i));
    CHECK(h.hex_digest() ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}
