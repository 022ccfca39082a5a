#include <gtest/gtest.h>

#include "cylsd.hpp"

using namespace cylsd;

TEST(Json, RationalsAreStrings) {
    EXPECT_EQ(rational_json(Rational(-4, 5)), json("-4/5"));
    EXPECT_EQ(rational_from_json(json("-4/5"), "x"), Rational(-4, 5));
    EXPECT_EQ(rational_from_json(json(3), "x"), Rational(3));
    EXPECT_EQ(rational_from_json(json(0.5), "x"), Rational(1, 2));
    EXPECT_THROW(rational_from_json(json("abc"), "x"), InvalidInput);
    EXPECT_THROW(rational_from_json(json::array(), "x"), InvalidInput);
}

TEST(Json, Signs) {
    EXPECT_EQ(sign_from_json(json(-1), "p"), -1);
    EXPECT_THROW(sign_from_json(json(2), "p"), InvalidInput);
}

TEST(Json, CylinderFixtureRoundTrip) {
    const auto fam = remark3_family(Rational(2, 3), 2, -3, Rational(-4, 5), Rational(-1, 5), 1, -1, 1, 1);
    const auto fx = fixture_from_json(json::parse(fixture_json(fam).dump()));
    ASSERT_TRUE(fx.cylinder);
    EXPECT_FALSE(fx.torus);
    EXPECT_EQ(fx.family, "remark3");
    EXPECT_EQ(fx.cylinder->omega, Rational(2, 3));
    EXPECT_EQ(fx.cylinder->matrix, fam.matrix);
    EXPECT_EQ(fx.cylinder->cfs, fam.cfs);
}

TEST(Json, TorusFixtureRoundTrip) {
    const auto fam = remark4_counterexample(1.0, 0.05);
    const auto fx = fixture_from_json(json::parse(fixture_json(fam).dump()));
    ASSERT_TRUE(fx.torus);
    EXPECT_EQ(fx.torus->matrix, fam.matrix);
    ASSERT_EQ(fx.torus->cfs.size(), 4u);
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_EQ(fx.torus->cfs[j].sigma, fam.cfs[j].sigma);
        EXPECT_EQ(fx.torus->cfs[j].twist, fam.cfs[j].twist);
    }
}

TEST(Json, MalformedFixtures) {
    auto j = fixture_json(remark3_family(1, 2, -3, Rational(-4, 5), Rational(-1, 5)));
    auto missing = j;
    missing.erase("cfs");
    EXPECT_THROW(fixture_from_json(missing), InvalidInput);
    auto short_cfs = j;
    short_cfs["cfs"].erase(2);
    EXPECT_THROW(fixture_from_json(short_cfs), InvalidInput);
    auto bad_sign = j;
    bad_sign["matrix"][1][0]["p"] = 3;
    EXPECT_THROW(fixture_from_json(bad_sign), InvalidInput);
    auto zero_a = j;
    zero_a["matrix"][1][0]["a"] = "0";
    EXPECT_THROW(fixture_from_json(zero_a), InvalidInput);
    auto group = j;
    group["group"] = "sphere";
    EXPECT_THROW(fixture_from_json(group), InvalidInput);
    EXPECT_THROW(fixture_from_json(json::array()), InvalidInput);
}

TEST(Json, BaseFiles) {
    const auto arith = base_from_json(json::parse(R"({"arithmetic": {"start": 2, "step": 1, "length": 5}})"));
    EXPECT_EQ(arith.entries(), (std::vector<long long>{2, 3, 4, 5, 6}));
    const auto list = base_from_json(json::parse(R"({"base": [2, 2, 3]})"));
    EXPECT_EQ(list.entries(), (std::vector<long long>{2, 2, 3}));
    EXPECT_THROW(base_from_json(json::parse(R"({"base": [2, 1.5]})")), InvalidInput);
    EXPECT_THROW(base_from_json(json::parse(R"({})")), InvalidInput);
}

TEST(Json, ConditionReport) {
    const auto j = condition_json(lemma2_conditions(2, -3, Rational(-4, 5), Rational(-1, 5)));
    EXPECT_EQ(j.at("identity1_residual"), "0");
    EXPECT_EQ(j.at("cross_det"), "14/5");
    EXPECT_EQ(j.at("corner_det"), "-42/5");
    EXPECT_TRUE(j.at("all_hold").get<bool>());
}
