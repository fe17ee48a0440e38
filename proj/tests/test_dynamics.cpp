#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lemon/dynamics.hpp"
#include "lemon/rng.hpp"
#include "oracles.hpp"

using namespace lemon;

namespace {
const auto S = ArcLabel::SmallArc;
const auto B = ArcLabel::BigArc;
}

TEST(Dynamics, AxisTwoOrbit) {
    const LemonTable t = build_table(kPi / 4.0, 10.0);
    const CollisionEvent e = step_or_throw(t, {S, kPi, kPi / 2.0});
    EXPECT_EQ(e.point.arc, B);
    EXPECT_NEAR(e.point.phi, 0.0, 1e-15);
    EXPECT_NEAR(e.point.theta, kPi / 2.0, 1e-15);
    EXPECT_NEAR(*e.tau_prev, 10.0 - (t.b() - 1.0), 1e-13);
    EXPECT_NEAR(e.d, 10.0, 1e-15);
    const CollisionEvent back = step_or_throw(t, e.point);
    EXPECT_EQ(back.point.arc, S);
    EXPECT_NEAR(back.point.phi, kPi, 1e-15);
    const CollisionEvent inv = inverse_or_throw(t, e.point);
    EXPECT_NEAR(inv.point.phi, kPi, 1e-15);
    EXPECT_NEAR(inv.point.theta, kPi / 2.0, 1e-15);
}

TEST(Dynamics, TwoOrbitSurvivesManySteps) {
    const LemonTable t = build_table(kPi / 4.0, 1800.0);
    const Orbit o = orbit(t, {S, kPi, kPi / 2.0}, 100);
    ASSERT_EQ(o.truncation, Truncation::None);
    ASSERT_EQ(o.events.size(), 101u);
    for (std::size_t i = 0; i < o.events.size(); ++i)
        EXPECT_EQ(o.events[i].point.arc, i % 2 == 0 ? S : B);
}

TEST(Dynamics, SameArcStep) {
    const LemonTable t = build_table(kPi / 4.0, 10.0);
    const CollisionEvent e = step_or_throw(t, {S, 2.0, 0.3});
    EXPECT_EQ(e.point.arc, S);
    EXPECT_NEAR(e.point.phi, 2.6, 1e-15);
    EXPECT_EQ(e.point.theta, 0.3);
    EXPECT_NEAR(*e.tau_prev, 2.0 * std::sin(0.3), 1e-15);
}

TEST(Dynamics, ChordThroughCornersIsSingular) {
    const LemonTable t = build_table(kPi / 4.0, 1800.0);
    const StepOutcome s = billiard_step(t, reference_points(t).x_star);
    ASSERT_TRUE(std::holds_alternative<CornerHit>(s));
    EXPECT_EQ(std::get<CornerHit>(s).corner, Corner::A);
    const Orbit o = orbit(t, reference_points(t).x_star, 10);
    EXPECT_EQ(o.truncation, Truncation::CornerHit);
    EXPECT_EQ(o.events.size(), 1u);
    EXPECT_THROW(step_or_throw(t, reference_points(t).x_star), SingularityError);
}

TEST(Dynamics, GrazingIsTangentialEscape) {
    const LemonTable t = build_table(kPi / 4.0, 10.0);
    EXPECT_TRUE(std::holds_alternative<TangentialEscape>(billiard_step(t, {B, 0.0, 1e-13})));
    EXPECT_TRUE(std::holds_alternative<TangentialEscape>(billiard_step(t, {S, kPi, kPi - 1e-13})));
}

// Independent oracle: plane ray casting against both circles.
TEST(Dynamics, AgreesWithRayCastingOracle) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> uphi(0.05, kPi / 2.0 - 0.05), uR(1.5, 60.0);
    int compared = 0;
    for (int k = 0; k < 200; ++k) {
        const LemonTable t = build_table(uphi(gen), uR(gen));
        SplitMix64 g(k);
        for (int i = 0; i < 200; ++i) {
            const PhasePoint x = sample_mu(t, g);
            const StepOutcome s = billiard_step(t, x);
            const CollisionEvent* e = next_event(s);
            if (!e)
                continue;
            const auto h = oracle::naive_step(t, x);
            ASSERT_TRUE(h.has_value());
            EXPECT_EQ(h->point.arc, e->point.arc);
            const double tol = 1e-9 * t.R();
            EXPECT_NEAR(*e->tau_prev, h->tau, tol);
            EXPECT_NEAR(detail::wrap_pi(e->point.phi - h->point.phi), 0.0, tol / t.radius(e->point.arc) + 1e-12);
            EXPECT_NEAR(e->point.theta, h->point.theta, 1e-8);
            EXPECT_NEAR(e->d, chord_half_length(t, e->point), 1e-14 * t.R());
            ++compared;
        }
    }
    EXPECT_GT(compared, 39000);
}

TEST(Dynamics, TimeReversal) {
    for (double R : {3.0, 50.0, 1800.0}) {
        const LemonTable t = build_table(0.7, R);
        SplitMix64 g(1, static_cast<std::uint64_t>(R));
        for (int i = 0; i < 5000; ++i) {
            const PhasePoint x = sample_mu(t, g);
            const CollisionEvent* e = nullptr;
            const StepOutcome s = billiard_step(t, x);
            if (!(e = next_event(s)))
                continue;
            const StepOutcome back = billiard_step(t, involution(e->point));
            const CollisionEvent* b = next_event(back);
            if (!b)
                continue;
            const PhasePoint y = involution(b->point);
            EXPECT_EQ(y.arc, x.arc);
            EXPECT_LT(phase_distance(y, x), 1e-9);
            EXPECT_NEAR(*b->tau_prev, *e->tau_prev, 1e-9 * R);
            const StepOutcome inv = billiard_inverse(t, e->point);
            ASSERT_NE(next_event(inv), nullptr);
            EXPECT_LT(phase_distance(next_event(inv)->point, x), 1e-9);
        }
    }
}

TEST(Dynamics, RemainingReflections) {
    const LemonTable t = build_table(kPi / 4.0, 10.0);
    EXPECT_EQ(remaining_reflections(t, {S, kPi, kPi / 2.0}), 0);
    // Footpoints 2, 3, 4, 5 stay on the arc; 6 is past 2 pi - phi*.
    EXPECT_EQ(remaining_reflections(t, {S, 1.0, 0.5}), 4);
    EXPECT_THROW(remaining_reflections(t, {B, 0.0, 1.0}), DomainError);
}

TEST(Dynamics, RemainingReflectionsCapsAtNeverLeaves) {
    // Period-3 orbit inscribed in the small circle.
    const LemonTable t = build_table(kPi / 4.0, 10.0);
    EXPECT_EQ(remaining_reflections(t, {S, kPi, kPi / 3.0}), std::nullopt);
    EXPECT_EQ(region_of(t, {S, kPi, kPi / 3.0}), (RegionTag{RegionTag::Kind::MrInterior, 0}));
}

TEST(Dynamics, RegionExamples) {
    using K = RegionTag::Kind;
    const LemonTable t = build_table(kPi / 4.0, 10.0);
    EXPECT_EQ(region_of(t, {S, kPi, kPi / 2.0}).kind, K::MrBoth);
    EXPECT_EQ(region_of(t, {B, 0.0, kPi / 2.0}).kind, K::MRBoth);
    const RegionTag in = region_of(t, {S, 1.2, 0.5});
    EXPECT_EQ(in.kind, K::MrIn);
    EXPECT_EQ(in.n, 4);
    EXPECT_EQ(region_of(t, {S, 3.0, 0.5}).kind, K::MrInterior);
    const RegionTag out = region_of(t, {S, 5.0, 0.5});
    EXPECT_EQ(out.kind, K::MrOut);
    EXPECT_EQ(out.n, 4);
    EXPECT_EQ(region_of(t, {B, 0.0, 0.01}).kind, K::MRInterior);
}

TEST(Dynamics, OrbitRejectsNegativeLength) {
    const LemonTable t = build_table(kPi / 4.0, 10.0);
    EXPECT_THROW(orbit(t, {S, kPi, 1.0}, -1), DomainError);
    EXPECT_EQ(orbit(t, {S, kPi, 1.0}, 0).events.size(), 1u);
}
