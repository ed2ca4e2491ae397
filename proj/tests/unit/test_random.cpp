#include "core/random.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

using namespace moran;

TEST_CASE("philox4x32-10 known answers")
{
    using C = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct")
{
    RandomStream x(42), y(42), z(43), w(42, 1);
    int same_z = 0, same_w = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto v = x();
        CHECK(v == y());
        same_z += v == z();
        same_w += v == w();
    }
    CHECK(same_z == 0);
    CHECK(same_w == 0);

    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 10000; ++i)
        seeds.insert(derive_seed(7, i));
    CHECK(seeds.size() == 10000);
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}

TEST_CASE("uniform and bounded draws")
{
    RandomStream rng(1);
    double sum = 0.0;
    const int n = 200000;
    std::array<int, 7> counts{};
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        const auto k = rng.below(7);
        REQUIRE(k < 7);
        ++counts[k];
    }
    CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    for (int c : counts)
        CHECK(std::abs(c - n / 7.0) < 4.0 * std::sqrt(n * (1.0 / 7.0) * (6.0 / 7.0)));
    CHECK(rng.below(1) == 0);
}
