#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fspde/philox.hpp"

using namespace fspde;

// Known-answer vectors for philox4x32-10 from the reference distribution.
TEST_CASE("philox known-answer vectors") {
    {
        const auto r = Philox4x32::generate({0u, 0u, 0u, 0u}, {0u, 0u});
        CHECK(r[0] == 0x6627e8d5u);
        CHECK(r[1] == 0xe169c58du);
        CHECK(r[2] == 0xbc57ac4cu);
        CHECK(r[3] == 0x9b00dbd8u);
    }
    {
        const auto r = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                            {0xffffffffu, 0xffffffffu});
        CHECK(r[0] == 0x408f276du);
        CHECK(r[1] == 0x41c83b0eu);
        CHECK(r[2] == 0xa20bc7c6u);
        CHECK(r[3] == 0x6d5451fdu);
    }
    {
        const auto r = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                            {0xa4093822u, 0x299f31d0u});
        CHECK(r[0] == 0xd16cfe09u);
        CHECK(r[1] == 0x94fdccebu);
        CHECK(r[2] == 0x5001e420u);
        CHECK(r[3] == 0x24126ea1u);
    }
}

TEST_CASE("normals are deterministic and keyed") {
    CHECK(normal_at(42, 3, 7) == normal_at(42, 3, 7));
    CHECK(normal_at(42, 3, 7) != normal_at(42, 3, 8));
    CHECK(normal_at(42, 3, 7) != normal_at(43, 3, 7));
}

TEST_CASE("normal moments at scale") {
    const std::size_t n = 1u << 20;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = normal_at(2024, i, 0);
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    const double m = s1 / n;
    const double v = s2 / n - m * m;
    const double k4 = s4 / n;
    CHECK(std::abs(m) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(v == doctest::Approx(1.0).epsilon(0.01));
    CHECK(k4 == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("split seeds differ") {
    CHECK(split_seed(1, 0) != split_seed(1, 1));
    CHECK(split_seed(1, 0) != split_seed(2, 0));
    CHECK(split_seed(5, 9) == split_seed(5, 9));
}
