#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "vfsk/rng.hpp"

using namespace vfsk;

TEST_CASE("philox known-answer vectors") {
    // Reference outputs of Philox4x32-10 published with Random123.
    const auto zero = Philox4x32::bijection({0, 0, 0, 0}, {0, 0});
    CHECK(zero == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const auto ones = Philox4x32::bijection({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                            {0xffffffffu, 0xffffffffu});
    CHECK(ones == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    const auto pi = Philox4x32::bijection({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                          {0xa4093822u, 0x299f31d0u});
    CHECK(pi == Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("draws are pure functions of their address") {
    const StreamKey k{7, 3};
    CHECK(normal_at(k, DrawTag::Generic, 11) == normal_at(k, DrawTag::Generic, 11));
    CHECK(normal_at(k, DrawTag::Generic, 11) != normal_at(k, DrawTag::LangevinAux, 11));
    CHECK(normal_at(k, DrawTag::Generic, 11) != normal_at({7, 4}, DrawTag::Generic, 11));
    CHECK(normal_at(k, DrawTag::Generic, 11) != normal_at({8, 3}, DrawTag::Generic, 11));

    CounterRng a(k, DrawTag::Generic), b(k, DrawTag::Generic);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("uniforms lie strictly inside (0,1) and have the right moments") {
    CounterRng rng({1, 0}, DrawTag::Generic);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform32();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        s += u;
        s2 += u * u;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(var - 1.0 / 12.0) < 1e-3);

    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double u = uniform_at({5, 9}, DrawTag::ChainUniform, i);
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("normals have unit variance and light tails") {
    const int n = 200000;
    double s = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = normal_at({2, 0}, DrawTag::Generic, static_cast<std::uint64_t>(i));
        s += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("sequential and addressed normals agree") {
    const StreamKey k{11, 2};
    CounterRng rng(k, DrawTag::WienerIncrement);
    for (std::uint64_t i = 0; i < 64; ++i) CHECK(rng.normal() == normal_at(k, DrawTag::WienerIncrement, i));
}
