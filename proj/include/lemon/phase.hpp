#pragma once

#include <cmath>
#include <string>

#include "lemon/geometry.hpp"

namespace lemon {

/*!
 * Element of the phase space M = M_r ⊔ M_R: a footpoint (arc, phi) and the
 * angle theta in (0, pi) from the positive (counterclockwise) tangent to the
 * outgoing velocity.
 */
struct PhasePoint {
    ArcLabel arc = ArcLabel::SmallArc;
    double phi = 0.0;
    double theta = 0.0;

    friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

inline bool is_valid(const LemonTable& t, const PhasePoint& x) {
    return x.theta > 0.0 && x.theta < kPi && in_arc_range(t, x.arc, x.phi);
}

// Half-length of the chord of x's trajectory in the osculating circle.
inline double chord_half_length(const LemonTable& t, const PhasePoint& x) {
    return t.radius(x.arc) * std::sin(x.theta);
}

// Time-reversal involution (phi, theta) -> (phi, pi - theta).
inline PhasePoint involution(const PhasePoint& x) { return {x.arc, x.phi, kPi - x.theta}; }

// Euclidean distance in (phi, theta); infinite across arcs.
inline double phase_distance(const PhasePoint& a, const PhasePoint& b) {
    if (a.arc != b.arc)
        return HUGE_VAL;
    return std::hypot(a.phi - b.phi, a.theta - b.theta);
}

/*!
 * The four small-arc points whose trajectories run along the chord AB:
 * x* and y* leave along the chord (in M_r^out), Ix* and Iy* arrive along it
 * (in M_r^in).
 */
struct ReferencePoints {
    PhasePoint x_star;
    PhasePoint y_star;
    PhasePoint Ix_star;
    PhasePoint Iy_star;
};

inline ReferencePoints reference_points(const LemonTable& t) {
    const double p = t.phi_star();
    const auto S = ArcLabel::SmallArc;
    return {
        {S, kTwoPi - p, p},
        {S, p, kPi - p},
        {S, kTwoPi - p, kPi - p},
        {S, p, p},
    };
}

/*!
 * Partition label of a phase point. For the small arc, In(n)/Out(n) carry the
 * number n >= 1 of remaining (resp. completed) reflections on the small arc;
 * MrBoth is M_{r,0}^in = M_{r,0}^out. MRBoth marks a single big-arc bounce
 * (both neighbours on the small arc).
 */
struct RegionTag {
    enum class Kind { MrIn, MrOut, MrBoth, MrInterior, MRIn, MROut, MRBoth, MRInterior };
    Kind kind = Kind::MrInterior;
    long long n = 0;

    friend bool operator==(const RegionTag&, const RegionTag&) = default;
};

inline std::string to_string(const RegionTag& tag) {
    using K = RegionTag::Kind;
    switch (tag.kind) {
    case K::MrIn: return "MrIn(" + std::to_string(tag.n) + ")";
    case K::MrOut: return "MrOut(" + std::to_string(tag.n) + ")";
    case K::MrBoth: return "MrBoth";
    case K::MrInterior: return "MrInterior";
    case K::MRIn: return "MRIn";
    case K::MROut: return "MROut";
    case K::MRBoth: return "MRBoth";
    case K::MRInterior: return "MRInterior";
    }
    return "?";
}

} // namespace lemon
