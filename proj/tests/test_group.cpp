#include <gtest/gtest.h>

#include <random>

#include "cylsd/group.hpp"

using namespace cylsd;

namespace {
Rational random_rational(std::mt19937_64& rng, bool nonzero = false) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
    for (;;) {
        Rational r(num(rng), den(rng));
        if (!nonzero || r != 0) return r;
    }
}

ExactAuto random_auto(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> sign(0, 1);
    return {random_rational(rng, true), random_rational(rng), sign(rng) ? 1 : -1};
}
}  // namespace

TEST(Group, ApplyDualMatchesMatrixAction) {
    const ExactAuto e(Rational(2), Rational(3), -1);
    const auto y = apply_dual(e, ExactDualPoint{Rational(1, 2), 5});
    EXPECT_EQ(y.s, Rational(2) * Rational(1, 2) + Rational(3) * 5);
    EXPECT_EQ(y.n, -5);
}

TEST(Group, ComposeIsApplicationOrder) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
        const auto e1 = random_auto(rng), e2 = random_auto(rng);
        const ExactDualPoint y{random_rational(rng), static_cast<long long>(k % 7) - 3};
        EXPECT_EQ(apply_dual(compose(e1, e2), y), apply_dual(e1, apply_dual(e2, y)));
    }
}

TEST(Group, InverseIsTwoSided) {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 200; ++k) {
        const auto e = random_auto(rng);
        EXPECT_TRUE(compose(e, invert(e)).is_identity());
        EXPECT_TRUE(compose(invert(e), e).is_identity());
    }
}

TEST(Group, PointActionIsAdjointOfDualAction) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
        const CylinderAuto d(u(rng) + 3.5, u(rng), (k % 2) ? 1 : -1);
        const CylinderPoint x(u(rng), u(rng));
        const DualPoint y{u(rng), static_cast<long long>(k % 9) - 4};
        EXPECT_NEAR(std::abs(pair(apply_point(d, x), y) - pair(x, apply_dual(d, y))), 0.0, 1e-9);
    }
}

TEST(Group, AngleReduction) {
    EXPECT_DOUBLE_EQ(reduce_angle(-std::numbers::pi / 2), 3 * std::numbers::pi / 2);
    EXPECT_EQ(reduce_angle(two_pi), 0.0);
    const CylinderPoint x(1.0, 6.0), y(2.0, 1.0);
    EXPECT_NEAR((x + y).theta(), 7.0 - two_pi, 1e-12);
    EXPECT_NEAR(angle_distance((x - x).theta(), 0.0), 0.0, 1e-15);
}

TEST(Group, RejectsNonInvertibleEntries) {
    EXPECT_THROW(CylinderAuto(0.0, 1.0, 1), InvalidInput);
    EXPECT_THROW(CylinderAuto(1.0, 1.0, 2), InvalidInput);
    EXPECT_THROW(TorusAuto(0), InvalidInput);
}

TEST(Group, PreservesLineGeometrically) {
    const double omega = 0.7;
    const CylinderAuto keep(2.0, (2.0 - (-1.0)) * omega, -1);
    const CylinderAuto move(2.0, 0.3, -1);
    EXPECT_TRUE(preserves_line(keep, omega));
    EXPECT_FALSE(preserves_line(move, omega));
    for (double t : {-2.0, -0.5, 0.3, 1.9}) {
        const auto x = apply_point(keep, CylinderPoint(t, omega * t));
        EXPECT_NEAR(angle_distance(x.theta(), reduce_angle(omega * x.t())), 0.0, 1e-12);
    }
}

TEST(Group, TorusAutomorphisms) {
    const TorusAuto minus(-1);
    EXPECT_EQ(apply_dual(minus, 3), -3);
    EXPECT_TRUE(compose(minus, minus).is_identity());
    EXPECT_EQ(invert(minus), minus);
}
