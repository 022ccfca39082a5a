#include <gtest/gtest.h>

#include <random>

#include "cylsd/constructions.hpp"
#include "cylsd/solenoid.hpp"

using namespace cylsd;

namespace {
AdicInteger random_adic(const BaseSequence& base, std::size_t precision, std::mt19937_64& rng) {
    std::vector<long long> d;
    for (std::size_t k = 0; k < precision; ++k) d.push_back(std::uniform_int_distribution<long long>(0, base[k] - 1)(rng));
    return {base, d};
}

BaseSequence factorial_base(std::size_t length) { return BaseSequence::arithmetic(2, 1, length); }
BaseSequence dyadic_base(std::size_t length) { return BaseSequence(std::vector<long long>(length, 2)); }
}  // namespace

TEST(Adic, CarryExample) {
    const BaseSequence base({2, 3, 2});
    const auto sum = adic_add_with_carries(AdicInteger(base, {1, 2, 1}), AdicInteger(base, {1, 0, 1}), base);
    EXPECT_EQ(sum.value.digits(), (std::vector<long long>{0, 0, 1}));
    EXPECT_EQ(sum.carries, (std::vector<int>{1, 1, 1}));
}

TEST(Adic, ZeroIsNeutral) {
    const auto base = factorial_base(10);
    std::mt19937_64 rng(1);
    const auto x = random_adic(base, 10, rng);
    EXPECT_EQ(adic_add(x, AdicInteger::zero(base, 10), base), x);
}

TEST(Adic, DigitBounds) {
    const BaseSequence base({2, 3});
    EXPECT_THROW(AdicInteger(base, {2, 0}), InvalidInput);
    EXPECT_THROW(AdicInteger(base, {0, 0, 0}), InvalidInput);
    EXPECT_THROW(BaseSequence({2, 1}), InvalidInput);
}

TEST(Adic, AgreesWithIntegerAdditionModuloPrefix) {
    // Digits encode x = x_0 + x_1 a_0 + x_2 a_0 a_1 + ... modulo a_0 ... a_{k-1}.
    const BaseSequence base({2, 3, 5, 7, 4});
    auto value = [&](const AdicInteger& x) {
        long long v = 0, w = 1;
        for (std::size_t k = 0; k < x.precision(); ++k) {
            v += x.digits()[k] * w;
            w *= base[k];
        }
        return v;
    };
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
        const auto x = random_adic(base, 5, rng), y = random_adic(base, 5, rng);
        EXPECT_EQ(value(adic_add(x, y, base)), (value(x) + value(y)) % 840);
    }
}

TEST(Adic, CommutativeAndAssociative) {
    const auto base = factorial_base(32);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 1000; ++t) {
        const auto x = random_adic(base, 32, rng), y = random_adic(base, 32, rng), z = random_adic(base, 32, rng);
        EXPECT_EQ(adic_add(x, y, base), adic_add(y, x, base));
        EXPECT_EQ(adic_add(adic_add(x, y, base), z, base), adic_add(x, adic_add(y, z, base), base));
    }
}

TEST(Ha, Membership) {
    const auto fact = factorial_base(10);
    EXPECT_EQ(ha_member(Rational(5, 6), fact, 9), 1u);
    EXPECT_EQ(ha_member(Rational(7), fact, 9), 0u);
    EXPECT_EQ(ha_member(Rational(1, 3), dyadic_base(40), 39), std::nullopt);
    EXPECT_EQ(ha_member(Rational(1, 7), fact, 4), std::nullopt);
    EXPECT_EQ(ha_member(Rational(1, 7), fact, 5), 5u);
}

TEST(Ha, MonotoneAndClosedUnderAddition) {
    const auto base = factorial_base(12);
    std::mt19937_64 rng(4);
    for (int t = 0; t < 200; ++t) {
        const auto kx = std::uniform_int_distribution<std::size_t>(0, 5)(rng);
        const auto ky = std::uniform_int_distribution<std::size_t>(0, 5)(rng);
        const Rational x = Rational(std::uniform_int_distribution<int>(-50, 50)(rng)) * ha_generator(base, kx);
        const Rational y = Rational(std::uniform_int_distribution<int>(-50, 50)(rng)) * ha_generator(base, ky);
        const auto dx = ha_member(x, base, 11);
        ASSERT_TRUE(dx);
        EXPECT_LE(*dx, kx);
        for (std::size_t lim = *dx; lim < 12; ++lim) EXPECT_EQ(ha_member(x, base, lim), dx);
        const auto dsum = ha_member(x + y, base, 11);
        ASSERT_TRUE(dsum);
        EXPECT_LE(*dsum, std::max(kx, ky));
    }
}

TEST(SolenoidAutoTest, MultiplierChecks) {
    EXPECT_NO_THROW(SolenoidAuto(Rational(2), Rational(1, 4), -1, dyadic_base(20), 6));
    EXPECT_NO_THROW(SolenoidAuto(Rational(-4, 5), Rational(-9, 5), 1, factorial_base(14), 6));
    EXPECT_THROW(SolenoidAuto(Rational(1, 7), 0, 1, dyadic_base(20), 6), InvalidInput);
    EXPECT_THROW(SolenoidAuto(Rational(3), 0, 1, dyadic_base(20), 6), InvalidInput);
    EXPECT_THROW(SolenoidAuto(Rational(1), Rational(1, 3), 1, dyadic_base(20), 6), InvalidInput);
}

TEST(Pullback, CompatibleRemark3Family) {
    const auto fam = remark3_family(0, 2, -3, Rational(-4, 5), Rational(-1, 5));
    const auto r = pullback_residual(fam.cfs, fam.matrix, factorial_base(14), 6, 4000);
    EXPECT_EQ(r.residual, 0.0);
    EXPECT_EQ(r.grid_size, 4000u);
}

TEST(Pullback, IncompatibleEntryIsNamed) {
    const ExactAuto id = ExactAuto::identity();
    const StatMatrix<ExactAuto> m(3, {id, id, id, ExactAuto(Rational(1, 7), 0, 1), id, id, id, id, id});
    const std::vector<ExactCylinderCF> cfs(3);
    try {
        pullback_residual(cfs, m, dyadic_base(20), 6);
        FAIL();
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("alpha[1][0]"), std::string::npos);
    }
}

TEST(Pullback, DegenerateCfs) {
    const auto fam = remark3_family(0, 2, -3, Rational(-4, 5), Rational(-1, 5));
    const std::vector<ExactCylinderCF> zero(3);
    EXPECT_EQ(pullback_residual(zero, fam.matrix, factorial_base(14), 4, 2000).residual, 0.0);
}

TEST(Pullback, AgreesWithRealGridResidual) {
    const auto fam = remark3_family(0, 2, -3, Rational(-4, 5), Rational(-1, 5));
    auto cfs = fam.cfs;
    cfs[1].lambda += Rational(1, 3);
    const auto base = factorial_base(14);
    const auto exact = pullback_residual(cfs, fam.matrix, base, 3, 3000);
    TupleGrid<DualPoint> grid(3);
    const auto slots = ha_slot_values(base, 3);
    const auto exact_grid = cartesian_grid<ExactDualPoint>(slots, 3, 3000);
    for (std::size_t k = 0; k < exact_grid.size(); ++k) {
        std::vector<DualPoint> t;
        for (const auto& y : exact_grid.tuple(k)) t.push_back(y.cast<double>());
        grid.push(t);
    }
    std::vector<CylinderCF> fcfs;
    for (const auto& cf : cfs) fcfs.push_back(cf.cast<double>());
    const auto real = independence_residual<CylinderCF>(fcfs, fam.float_matrix(), grid);
    EXPECT_GT(exact.residual, 0.1);
    EXPECT_NEAR(exact.residual, real.residual, 1e-12 * (1 + exact.residual));
}
