#include <cmath>

#include <gtest/gtest.h>

#include "lemon/neighborhoods.hpp"
#include "lemon/rng.hpp"

using namespace lemon;

namespace {
const auto S = ArcLabel::SmallArc;
}

TEST(Phase, InvolutionIsAnInvolution) {
    SplitMix64 g(3);
    const LemonTable t = build_table(0.9, 40.0);
    for (int i = 0; i < 1000; ++i) {
        const PhasePoint x = sample_mu(t, g);
        const PhasePoint y = involution(involution(x));
        EXPECT_EQ(y.phi, x.phi);
        EXPECT_NEAR(y.theta, x.theta, 1e-15);
        EXPECT_NEAR(chord_half_length(t, involution(x)), chord_half_length(t, x), 1e-15 * t.R());
    }
}

TEST(Phase, Validity) {
    const LemonTable t = build_table(kPi / 4.0, 10.0);
    EXPECT_TRUE(is_valid(t, {S, kPi, 1.0}));
    EXPECT_TRUE(is_valid(t, {S, t.phi_star(), 1.0}));
    EXPECT_FALSE(is_valid(t, {S, 0.1, 1.0}));
    EXPECT_FALSE(is_valid(t, {S, kPi, 0.0}));
    EXPECT_FALSE(is_valid(t, {S, kPi, kPi}));
    EXPECT_TRUE(is_valid(t, {ArcLabel::BigArc, 0.0, 0.5}));
    EXPECT_FALSE(is_valid(t, {ArcLabel::BigArc, t.Phi_star(), 0.5}));
}

TEST(Phase, ReferencePoints) {
    const LemonTable t = build_table(kPi / 4.0, 1800.0);
    const ReferencePoints ref = reference_points(t);
    EXPECT_EQ(ref.x_star, (PhasePoint{S, 7.0 * kPi / 4.0, kPi / 4.0}));
    EXPECT_EQ(ref.y_star, (PhasePoint{S, kPi / 4.0, 3.0 * kPi / 4.0}));
    EXPECT_EQ(involution(ref.x_star), ref.Ix_star);
    EXPECT_EQ(involution(ref.y_star), ref.Iy_star);
}

TEST(Phase, DistanceAcrossArcsIsInfinite) {
    EXPECT_TRUE(std::isinf(phase_distance({S, 1.0, 1.0}, {ArcLabel::BigArc, 0.0, 1.0})));
    EXPECT_DOUBLE_EQ(phase_distance({S, 1.0, 1.0}, {S, 4.0, 5.0}), 5.0);
}

TEST(Neighborhoods, Examples) {
    const LemonTable t = build_table(kPi / 4.0, 1800.0);
    const ReferencePoints ref = reference_points(t);
    const double d = t.delta_star();
    EXPECT_TRUE(in_V_delta(t, ref.x_star, d));
    EXPECT_TRUE(in_U_delta(t, ref.Ix_star, d));
    // Just off the corner B, tilted across the chord AB toward the big arc.
    const PhasePoint near_x{S, ref.x_star.phi - 0.01, ref.x_star.theta + 0.002};
    EXPECT_TRUE(in_V_delta(t, near_x, d));
    EXPECT_FALSE(in_V_delta(t, {S, kPi, kPi / 2.0}, d));
    EXPECT_FALSE(in_V_delta(t, {ArcLabel::BigArc, 0.0, kPi / 4.0}, d));
    EXPECT_THROW(in_V_delta(t, ref.x_star, 0.0), DomainError);
    EXPECT_THROW(in_U_delta(t, ref.x_star, -1.0), DomainError);
}

TEST(Neighborhoods, UIsTheImageOfV) {
    const LemonTable t = build_table(kPi / 6.0, 500.0);
    const ReferencePoints ref = reference_points(t);
    SplitMix64 g(8);
    int members = 0;
    for (int i = 0; i < 20000; ++i) {
        const PhasePoint& c = g.uniform() < 0.5 ? ref.Ix_star : ref.Iy_star;
        const PhasePoint x{S, c.phi + (2.0 * g.uniform() - 1.0) * 0.6, c.theta + (2.0 * g.uniform() - 1.0) * 0.6};
        if (!is_valid(t, x))
            continue;
        const bool u = in_U_delta(t, x, t.delta_star());
        EXPECT_EQ(u, in_V_delta(t, involution(x), t.delta_star()));
        members += u;
    }
    EXPECT_GT(members, 100);
}
