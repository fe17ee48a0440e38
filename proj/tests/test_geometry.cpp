#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lemon/geometry.hpp"

using namespace lemon;

TEST(Geometry, AxisTableHasClosedFormSeparation) {
    const LemonTable t = build_table(kPi / 2.0, 2.0);
    EXPECT_NEAR(t.b(), std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(t.Phi_star(), kPi / 6.0, 1e-15);
    EXPECT_DOUBLE_EQ(t.delta_star(), 0.0);
}

// 50-digit mpmath values.
TEST(Geometry, FrozenHighPrecisionValues) {
    EXPECT_NEAR(build_table(kPi / 4.0, 10.0).Phi_star(), 0.070769736662213609, 1e-16);
    EXPECT_NEAR(build_table(kPi / 4.0, 10.0).b(), 9.2678618904434541, 1e-14);
    EXPECT_NEAR(build_table(kPi / 6.0, 100.0).b(), 99.132724588402964, 1e-13);
    EXPECT_NEAR(build_table(kPi / 6.0, 100.0).Phi_star(), 0.0050000208335677118, 1e-17);
    EXPECT_NEAR(build_table(kPi / 4.0, 1800.0).b(), 1799.2927543299192, 1e-12);
    EXPECT_NEAR(build_table(kPi / 6.0, 1800.0).Phi_star(), 0.00027777778135002299, 1e-19);
}

TEST(Geometry, RejectsInvalidParameters) {
    EXPECT_THROW(build_table(0.0, 10.0), DomainError);
    EXPECT_THROW(build_table(-0.1, 10.0), DomainError);
    EXPECT_THROW(build_table(kPi / 2.0 + 1e-9, 10.0), DomainError);
    EXPECT_THROW(build_table(kPi / 4.0, 0.5), DomainError);
    EXPECT_THROW(build_table(kPi / 4.0, 1.0), DomainError);
    EXPECT_THROW(build_table(kPi / 4.0, std::nan("")), DomainError);
}

TEST(Geometry, InvariantsOnRandomTables) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> uphi(1e-3, kPi / 2.0 - 1e-3), ulogR(std::log(1.01), std::log(1e4));
    for (int i = 0; i < 2000; ++i) {
        const double phi = uphi(gen), R = std::exp(ulogR(gen));
        const LemonTable t = build_table(phi, R);
        EXPECT_LE(std::abs(R * std::sin(t.Phi_star()) - std::sin(phi)), 1e-12);
        EXPECT_LE(std::abs(R * std::cos(t.Phi_star()) - t.b() - std::cos(phi)), 1e-12 * R);
        EXPECT_GT(t.b(), R - 1.0);
        EXPECT_LT(t.b(), R + 1.0);
        EXPECT_EQ(t.delta_star(), std::min(phi, kPi / 2.0 - phi));
        for (Vec2 c : {t.corner_A(), t.corner_B()}) {
            EXPECT_NEAR(norm(c - t.center_R()), R, 1e-12 * R);
            EXPECT_NEAR(norm(c - t.center_r()), 1.0, 1e-12 * R);
        }
        if (R >= 10.0) {
            EXPECT_LT(t.Phi_star(), 1.002 * std::sin(phi) / R);
        }
        if (R >= 20.0) {
            EXPECT_LT(t.Psi_R(), 1.002 * 2.0 / R);
            EXPECT_GT(t.Psi_R(), 2.0 * t.Phi_star());
        }
        EXPECT_TRUE(t.canonical());
    }
}

TEST(Geometry, MinRadiusThreshold) {
    EXPECT_DOUBLE_EQ(min_radius_threshold(kPi / 6.0), 1773.7);
    EXPECT_DOUBLE_EQ(min_radius_threshold(kPi / 4.0), 1773.7);
    EXPECT_DOUBLE_EQ(min_radius_threshold(kPi / 4.0, ThresholdVariant::Collected), 1773.7);
    const double s = std::sin(0.05);
    EXPECT_NEAR(min_radius_threshold(0.05), 147.0 / (s * s), 1e-9);
    EXPECT_NEAR(min_radius_threshold(0.05, ThresholdVariant::Collected), 165.0 / (s * s), 1e-9);
    // Near the right angle the delta* branch dominates.
    const double p = kPi / 2.0 - 0.001;
    EXPECT_NEAR(min_radius_threshold(p), 14.6 / (0.001 * std::sin(p)), 1e-6);
    EXPECT_NEAR(min_radius_threshold(p, ThresholdVariant::Collected), 16.0 / (0.001 * std::sin(p)), 1e-6);
    EXPECT_GT(min_radius_threshold(kPi / 2.0 - 1e-6), 1e6);
    EXPECT_GT(min_radius_threshold(std::nextafter(kPi / 2.0, 0.0)), 1e15);
    EXPECT_THROW(min_radius_threshold(kPi / 2.0), DomainError);
    EXPECT_THROW(min_radius_threshold(0.0), DomainError);
}

TEST(Geometry, ThresholdDivergesTowardRightAngle) {
    double prev = 1773.7;
    for (double eps : {0.005, 1e-3, 1e-4, 1e-6}) {
        const double v = min_radius_threshold(kPi / 2.0 - eps);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Geometry, ArcPointExamples) {
    const LemonTable t = build_table(kPi / 4.0, 10.0);
    const Vec2 antipode = arc_point(t, ArcLabel::SmallArc, kPi);
    EXPECT_NEAR(antipode.x, t.b() - 1.0, 1e-14);
    EXPECT_NEAR(antipode.y, 0.0, 1e-15);
    const Vec2 axis = arc_point(t, ArcLabel::BigArc, 0.0);
    EXPECT_EQ(axis.x, 10.0);
    EXPECT_EQ(axis.y, 0.0);
    const Vec2 a = arc_point(t, ArcLabel::SmallArc, t.phi_star());
    EXPECT_NEAR(a.x, t.corner_A().x, 1e-14);
    EXPECT_NEAR(a.y, t.corner_A().y, 1e-14);
    EXPECT_THROW(arc_point(t, ArcLabel::SmallArc, 0.5), RangeError);
    EXPECT_THROW(arc_point(t, ArcLabel::BigArc, 0.5), RangeError);
}

TEST(Geometry, CornersAgreeFromBothArcs) {
    for (double R : {2.0, 10.0, 100.0, 1800.0}) {
        for (double phi : {0.1, kPi / 6.0, kPi / 4.0, 1.2}) {
            const LemonTable t = build_table(phi, R);
            const Vec2 a1 = arc_point(t, ArcLabel::SmallArc, t.phi_star());
            const Vec2 a2 = arc_point(t, ArcLabel::BigArc, t.Phi_star());
            EXPECT_LE(norm(a1 - a2), 1e-12 * R);
            const Vec2 b1 = arc_point(t, ArcLabel::SmallArc, kTwoPi - t.phi_star());
            const Vec2 b2 = arc_point(t, ArcLabel::BigArc, -t.Phi_star());
            EXPECT_LE(norm(b1 - b2), 1e-12 * R);
        }
    }
}

TEST(Geometry, LocalPointsMatchPlanePoints) {
    const LemonTable t = build_table(0.6, 50.0);
    for (double phi : {-0.009, 0.0, 0.005}) {
        const Vec2 g = arc_point(t, ArcLabel::BigArc, phi);
        const Vec2 l = local_arc_point(t, ArcLabel::BigArc, phi) + t.center_r();
        EXPECT_NEAR(g.x, l.x, 1e-12 * t.R());
        EXPECT_NEAR(g.y, l.y, 1e-12 * t.R());
    }
}

TEST(Geometry, HarnessTablesFromCenters) {
    const LemonTable t = table_from_centers(1.5, 1.0);
    EXPECT_TRUE(t.canonical());
    EXPECT_FALSE(table_from_centers(1.5, 2.3).canonical());
    EXPECT_NEAR(std::cos(t.phi_star()), 0.125, 1e-15);
    EXPECT_NEAR(norm(t.corner_A() - t.center_R()), 1.5, 1e-14);
    const LemonTable c = table_from_centers(10.0, build_table(kPi / 3.0, 10.0).b());
    EXPECT_TRUE(c.canonical());
    EXPECT_NEAR(c.phi_star(), kPi / 3.0, 1e-12);
    EXPECT_THROW(table_from_centers(2.0, 0.5), DomainError);
    EXPECT_THROW(table_from_centers(2.0, 3.5), DomainError);
}
