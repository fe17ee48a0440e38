#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lemon/errors.hpp"

namespace lemon {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Radius of the small disk. All lengths are in units of r.
inline constexpr double kSmallRadius = 1.0;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

enum class ArcLabel { SmallArc, BigArc };

inline const char* to_string(ArcLabel arc) {
    return arc == ArcLabel::SmallArc ? "SmallArc" : "BigArc";
}

/*!
 * Asymmetric lemon table: intersection of the disk of radius r centred at
 * O_r = (b, 0) with the disk of radius R centred at O_R = (0, 0).
 *
 * Position angles on both circles are measured counterclockwise from the
 * direction O_R -> O_r. The small arc is [phi*, 2pi - phi*], the big arc is
 * (-Phi*, Phi*); the corners A (upper) and B (lower) belong to the small arc.
 *
 * Immutable once built. Tables built with table_from_centers() may violate the
 * corner-fixing relation for b and are flagged non-canonical.
 */
class LemonTable {
  public:
    double r() const { return r_; }
    double R() const { return R_; }
    double b() const { return b_; }
    double phi_star() const { return phi_star_; }
    double Phi_star() const { return Phi_star_; }
    double delta_star() const { return delta_star_; }
    Vec2 corner_A() const { return center_r_ + local_corner_A(); }
    Vec2 corner_B() const { return center_r_ + local_corner_B(); }
    Vec2 center_r() const { return center_r_; }
    Vec2 center_R() const { return {0.0, 0.0}; }
    bool canonical() const { return canonical_; }

    double radius(ArcLabel arc) const { return arc == ArcLabel::SmallArc ? r_ : R_; }

    // Corners relative to O_r; exact in the coordinates the dynamics uses.
    Vec2 local_corner_A() const { return {r_ * cos_phi_star_, r_ * sin_phi_star_}; }
    Vec2 local_corner_B() const { return {r_ * cos_phi_star_, -r_ * sin_phi_star_}; }

    double sin_phi_star() const { return sin_phi_star_; }
    double cos_phi_star() const { return cos_phi_star_; }

    // Psi_R = arcsin(2r/R); chords of the big circle shorter than 4r have theta < Psi_R.
    double Psi_R() const { return 2.0 * r_ <= R_ ? std::asin(2.0 * r_ / R_) : kPi / 2.0; }

    friend LemonTable build_table(double phi_star, double R);
    friend LemonTable table_from_centers(double R, double b);

  private:
    LemonTable() = default;
    void finish();

    double r_ = kSmallRadius;
    double R_ = 0.0;
    double b_ = 0.0;
    double phi_star_ = 0.0;
    double Phi_star_ = 0.0;
    double delta_star_ = 0.0;
    double sin_phi_star_ = 0.0;
    double cos_phi_star_ = 0.0;
    Vec2 center_r_;
    bool canonical_ = true;
};

inline void LemonTable::finish() {
    sin_phi_star_ = std::sin(phi_star_);
    cos_phi_star_ = std::cos(phi_star_);
    delta_star_ = std::min(phi_star_, kPi / 2.0 - phi_star_);
    center_r_ = {b_, 0.0};
}

// Table Q(phi*, R) with corners fixed at angle phi* on the unit circle.
inline LemonTable build_table(double phi_star, double R) {
    if (!(phi_star > 0.0 && phi_star <= kPi / 2.0))
        throw DomainError("build_table: phi_star must lie in (0, pi/2], got " + std::to_string(phi_star));
    if (!(R >= kSmallRadius) || !std::isfinite(R))
        throw DomainError("build_table: R must be a finite length >= r, got " + std::to_string(R));
    LemonTable t;
    t.R_ = R;
    t.phi_star_ = phi_star;
    const double s = std::sin(phi_star);
    t.Phi_star_ = std::asin(t.r_ * s / R);
    t.b_ = std::sqrt(R * R - t.r_ * t.r_ * s * s) - t.r_ * std::cos(phi_star);
    if (!(t.b_ > R - t.r_ && t.b_ < R + t.r_))
        throw DomainError("build_table: degenerate lemon (need R - r < b < R + r), b = " + std::to_string(t.b_));
    t.finish();
    return t;
}

/*!
 * Test-harness table from the centre separation b directly. The corner angle
 * follows from the law of cosines; b need not satisfy r < b < R, so the axis
 * 2-orbit can be elliptic or parabolic.
 */
inline LemonTable table_from_centers(double R, double b) {
    const double r = kSmallRadius;
    if (!(R >= r) || !(b > R - r && b < R + r))
        throw DomainError("table_from_centers: need R >= r and R - r < b < R + r");
    LemonTable t;
    t.R_ = R;
    t.b_ = b;
    const double c = std::clamp((R * R - b * b - r * r) / (2.0 * b * r), -1.0, 1.0);
    t.phi_star_ = std::acos(c);
    t.Phi_star_ = std::atan2(r * std::sin(t.phi_star_), b + r * c);
    t.finish();
    const double b_canonical = std::sqrt(R * R - r * r * t.sin_phi_star_ * t.sin_phi_star_) - r * t.cos_phi_star_;
    t.canonical_ = t.phi_star_ < kPi / 2.0 && std::abs(b_canonical - b) <= 1e-12 * R;
    return t;
}

enum class ThresholdVariant { Theorem, Collected };

inline const char* to_string(ThresholdVariant v) {
    return v == ThresholdVariant::Theorem ? "theorem" : "collected";
}

/*!
 * Smallest R for which hyperbolicity of Q(phi*, R) is guaranteed:
 * max{c1 r / (delta* sin phi*), c2 r / sin^2 phi*, 1773.7 r} with
 * (c1, c2) = (14.6, 147) for the theorem statement and (16, 165) for the
 * bound collected at the end of the proof.
 */
inline double min_radius_threshold(double phi_star, ThresholdVariant variant = ThresholdVariant::Theorem) {
    if (!(phi_star > 0.0 && phi_star < kPi / 2.0))
        throw DomainError("min_radius_threshold: phi_star must lie in (0, pi/2)");
    const double r = kSmallRadius;
    const double c1 = variant == ThresholdVariant::Theorem ? 14.6 : 16.0;
    const double c2 = variant == ThresholdVariant::Theorem ? 147.0 : 165.0;
    const double delta = std::min(phi_star, kPi / 2.0 - phi_star);
    const double s = std::sin(phi_star);
    const double bound = std::max({c1 * r / (delta * s), c2 * r / (s * s), 1773.7 * r});
    return std::isfinite(bound) ? bound : std::numeric_limits<double>::infinity();
}

// Hypothesis of the near-tangency lemma: R >= max{34r/phi*, 14.6r/(delta* sin phi*)}.
inline double near_tangency_threshold(double phi_star) {
    const double r = kSmallRadius;
    const double delta = std::min(phi_star, kPi / 2.0 - phi_star);
    return std::max(34.0 * r / phi_star, 14.6 * r / (delta * std::sin(phi_star)));
}

// Same bound with (pi/2 - phi*) in place of delta*, as written in the extension proof.
inline double near_tangency_threshold_weak(double phi_star) {
    const double r = kSmallRadius;
    return std::max(34.0 * r / phi_star, 14.6 * r / ((kPi / 2.0 - phi_star) * std::sin(phi_star)));
}

inline bool in_arc_range(const LemonTable& t, ArcLabel arc, double phi) {
    if (arc == ArcLabel::SmallArc)
        return phi >= t.phi_star() && phi <= kTwoPi - t.phi_star();
    return phi > -t.Phi_star() && phi < t.Phi_star();
}

// Boundary point relative to O_r. On the big arc the x offset is formed as
// r cos phi* + R (cos phi - cos Phi*) with the difference of cosines written
// as a product, so it stays accurate for R >> r.
inline Vec2 local_arc_point(const LemonTable& t, ArcLabel arc, double phi) {
    if (arc == ArcLabel::SmallArc)
        return {t.r() * std::cos(phi), t.r() * std::sin(phi)};
    const double dcos = -2.0 * std::sin(0.5 * (phi + t.Phi_star())) * std::sin(0.5 * (phi - t.Phi_star()));
    return {t.r() * t.cos_phi_star() + t.R() * dcos, t.R() * std::sin(phi)};
}

// Plane point of the boundary in the frame O_R = (0,0), O_r = (b,0).
// Corners are accepted as endpoints of either arc.
inline Vec2 arc_point(const LemonTable& t, ArcLabel arc, double phi) {
    const bool on_arc = arc == ArcLabel::SmallArc ? in_arc_range(t, arc, phi) : std::abs(phi) <= t.Phi_star();
    if (!on_arc)
        throw RangeError(std::string("arc_point: phi outside ") + to_string(arc));
    if (arc == ArcLabel::BigArc)
        return {t.R() * std::cos(phi), t.R() * std::sin(phi)};
    return t.center_r() + local_arc_point(t, arc, phi);
}

} // namespace lemon
