#include <cmath>

#include <gtest/gtest.h>

#include "coverlab/rng.hpp"

using namespace coverlab;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswerZero) {
    auto r = philox4x32({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(r[0], 0x6627e8d5u);
    EXPECT_EQ(r[1], 0xe169c58du);
    EXPECT_EQ(r[2], 0xbc57ac4cu);
    EXPECT_EQ(r[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
    auto r = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(r[0], 0x408f276du);
    EXPECT_EQ(r[1], 0x41c83b0eu);
    EXPECT_EQ(r[2], 0xa20bc7c6u);
    EXPECT_EQ(r[3], 0x6d5451fdu);
}

TEST(PhiloxStream, SameStreamRepeats) {
    PhiloxStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(PhiloxStream, StreamsDiffer) {
    PhiloxStream a(42, 7), b(42, 8), c(43, 7);
    int same_b = 0, same_c = 0;
    for (int i = 0; i < 1000; ++i) {
        double x = a.uniform();
        same_b += x == b.uniform();
        same_c += x == c.uniform();
    }
    EXPECT_EQ(same_b, 0);
    EXPECT_EQ(same_c, 0);
}

TEST(PhiloxStream, UniformMoments) {
    PhiloxStream s(1, 0);
    const int n = 200000;
    double m = 0, m2 = 0, lo = 1, hi = 0;
    for (int i = 0; i < n; ++i) {
        double u = s.uniform();
        m += u;
        m2 += u * u;
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    m /= n;
    m2 /= n;
    EXPECT_NEAR(m, 0.5, 5 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(m2 - m * m, 1.0 / 12, 0.002);
    EXPECT_GE(lo, 0.0);
    EXPECT_LT(hi, 1.0);
}

TEST(PhiloxStream, NormalMoments) {
    PhiloxStream s(2, 3);
    const int n = 200000;
    double m = 0, m2 = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
        double z = s.normal();
        m += z;
        m2 += z * z;
        m4 += z * z * z * z;
    }
    m /= n;
    m2 /= n;
    m4 /= n;
    EXPECT_NEAR(m, 0.0, 5 / std::sqrt(n));
    EXPECT_NEAR(m2, 1.0, 5 * std::sqrt(2.0 / n));
    EXPECT_NEAR(m4, 3.0, 5 * std::sqrt(96.0 / n));
}
