#include <gtest/gtest.h>

#include <cmath>

#include "daxs/model.hpp"

using namespace daxs;

TEST(Coupling, NamesRoundTrip) {
    for (Coupling c : kAllCouplings) {
        ASSERT_EQ(coupling_from_name(name(c)), c);
    }
    EXPECT_FALSE(coupling_from_name("t13").has_value());
}

TEST(Coupling, SectorPartition) {
    int triplet = 0;
    for (Coupling c : kAllCouplings) triplet += is_triplet(c) ? 1 : 0;
    EXPECT_EQ(triplet, 4);
    EXPECT_TRUE(is_triplet(Coupling::t21));
    EXPECT_TRUE(is_triplet(Coupling::t22));
    EXPECT_TRUE(is_triplet(Coupling::t41));
    EXPECT_TRUE(is_triplet(Coupling::t42));
    EXPECT_FALSE(is_triplet(Coupling::t11));
    EXPECT_FALSE(is_triplet(Coupling::t32));
}

TEST(Coupling, LevelIndices) {
    EXPECT_EQ(right_level(Coupling::t31), 3);
    EXPECT_EQ(left_level(Coupling::t31), 1);
    EXPECT_EQ(right_level(Coupling::t42), 4);
    EXPECT_EQ(left_level(Coupling::t42), 2);
}

TEST(SignedCoupling, FromValueKeepsNegativeZero) {
    const auto z = SignedCoupling::from_value(-0.0);
    EXPECT_EQ(z.magnitude, 0.0);
    EXPECT_EQ(z.sign, -1);
    const auto v = SignedCoupling::from_value(-3.5);
    EXPECT_EQ(v.magnitude, 3.5);
    EXPECT_EQ(v.value(), -3.5);
}

TEST(ModelParams, ValidateRejectsBadValues) {
    ModelParams p;
    p.offsets = {1, 2, 3, 4};
    EXPECT_NO_THROW(validate(p));

    auto bad = p;
    bad.couplings.set_magnitude(Coupling::t11, -1.0);
    EXPECT_THROW(validate(bad), InputError);

    bad = p;
    bad.couplings.set_magnitude(Coupling::t11, std::nan(""));
    EXPECT_THROW(validate(bad), InputError);

    bad = p;
    bad.offsets.r31 = 10.0;  // r31 > r41
    EXPECT_THROW(validate(bad), InputError);

    bad = p;
    bad.offsets.l21 = -1.0;
    EXPECT_THROW(validate(bad), InputError);

    bad = p;
    bad.zeeman = -0.1;
    EXPECT_THROW(validate(bad), InputError);

    bad = p;
    bad.couplings[Coupling::t12].sign = 0;
    EXPECT_THROW(validate(bad), InputError);
}

TEST(ModelParams, JsonRoundTripUsesSignedValues) {
    ModelParams p;
    p.couplings.set_value(Coupling::t11, -2.5);
    p.couplings.set_value(Coupling::t42, 7.0);
    p.couplings.set_value(Coupling::t21, -0.0);
    p.offsets = {10, 5, 15, 20};
    p.zeeman = 1.5;
    const nlohmann::json j = p;
    EXPECT_EQ(j["couplings"]["t11"].get<double>(), -2.5);
    EXPECT_EQ(j["offsets"]["r31"].get<double>(), 15.0);
    const auto back = nlohmann::json::parse(j.dump()).get<ModelParams>();
    EXPECT_EQ(back, p);
    EXPECT_EQ(back.couplings[Coupling::t21].sign, -1);
}

TEST(ModelParams, JsonRejectsMissingAndUnknownCouplings) {
    nlohmann::json j = ModelParams{};
    j["couplings"].erase("t32");
    EXPECT_THROW(j.get<ModelParams>(), InputError);

    nlohmann::json k = ModelParams{};
    k["couplings"]["t99"] = 1.0;
    EXPECT_THROW(k.get<ModelParams>(), InputError);
}

TEST(BranchLabel, CompactNames) {
    EXPECT_EQ(to_string({Sector::triplet, 0, 0}), "T0");
    EXPECT_EQ(to_string({Sector::singlet, 3, 0}), "S3");
    EXPECT_EQ(to_string({Sector::triplet, 1, +1}), "T1+");
    EXPECT_EQ(to_string({Sector::triplet, 1, -1}), "T1-");
}

TEST(BranchLabel, JsonValidation) {
    const BranchLabel b{Sector::triplet, 2, -1};
    const nlohmann::json j = b;
    EXPECT_EQ(j.get<BranchLabel>(), b);
    EXPECT_THROW((nlohmann::json{{"sector", "quartet"}, {"index", 0}}.get<BranchLabel>()), InputError);
    EXPECT_THROW((nlohmann::json{{"sector", "singlet"}, {"index", -1}}.get<BranchLabel>()), InputError);
    EXPECT_THROW((nlohmann::json{{"sector", "singlet"}, {"index", 0}, {"spin_z", 1}}.get<BranchLabel>()),
                 InputError);
    EXPECT_THROW((nlohmann::json{{"sector", "triplet"}, {"index", 0}, {"spin_z", 2}}.get<BranchLabel>()),
                 InputError);
}
