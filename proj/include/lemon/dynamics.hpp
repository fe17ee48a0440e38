#pragma once

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

#include "lemon/geometry.hpp"
#include "lemon/phase.hpp"

namespace lemon {

// Arc-length distance to a corner below which an arrival is declared singular.
inline constexpr double kCornerTol = 1e-9 * kSmallRadius;
// Reflection angles closer than this to 0 or pi are tangential.
inline constexpr double kTangentTol = 1e-12;
// Smallest accepted free path.
inline constexpr double kMinFreePath = 1e-12 * kSmallRadius;
// Step cap for remaining_reflections before reporting NeverLeaves.
inline constexpr long long kNeverLeavesCap = 1'000'000;

struct CollisionEvent {
    PhasePoint point;
    std::optional<double> tau_prev;
    double d = 0.0;
};

enum class Corner { A, B };

inline const char* to_string(Corner c) { return c == Corner::A ? "A" : "B"; }

struct CornerHit {
    Corner corner = Corner::A;
    double distance = 0.0;
};

struct TangentialEscape {};

using StepOutcome = std::variant<CollisionEvent, CornerHit, TangentialEscape>;

inline const CollisionEvent* next_event(const StepOutcome& s) { return std::get_if<CollisionEvent>(&s); }

namespace detail {

inline double wrap_two_pi(double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

// Reduce into (-pi, pi].
inline double wrap_pi(double a) {
    a = wrap_two_pi(a);
    return a > kPi ? a - kTwoPi : a;
}

// Positive root t of t^2 + 2 h t + c = 0 with c <= 0, without cancellation.
inline double exit_root(double h, double c) {
    const double disc = std::sqrt(std::max(h * h - c, 0.0));
    return h >= 0.0 ? -c / (h + disc) : disc - h;
}

inline std::optional<CornerHit> near_corner(const LemonTable& t, ArcLabel arc, double psi) {
    double da, db;
    if (arc == ArcLabel::SmallArc) {
        da = t.r() * std::abs(psi - t.phi_star());
        db = t.r() * std::abs(psi - (kTwoPi - t.phi_star()));
    } else {
        da = t.R() * std::abs(psi - t.Phi_star());
        db = t.R() * std::abs(psi + t.Phi_star());
    }
    if (std::min(da, db) >= kCornerTol)
        return std::nullopt;
    return da <= db ? CornerHit{Corner::A, da} : CornerHit{Corner::B, db};
}

// Landing angle on the own circle, if the chord ends on the own arc.
inline std::optional<double> own_arc_landing(const LemonTable& t, const PhasePoint& x) {
    const double psi = x.phi + 2.0 * x.theta;
    if (x.arc == ArcLabel::SmallArc) {
        const double hi = kTwoPi - t.phi_star();
        if (psi <= hi)
            return psi;
        if (psi - kTwoPi >= t.phi_star())
            return psi - kTwoPi;
        return std::nullopt;
    }
    if (psi < t.Phi_star())
        return psi;
    if (psi - kTwoPi > -t.Phi_star())
        return psi - kTwoPi;
    return std::nullopt;
}

} // namespace detail

/*!
 * One application of the billiard map F.
 *
 * Chords that end on the arc they start from are handled in closed form
 * (phi -> phi + 2 theta, theta fixed). Otherwise the ray is intersected with
 * the other circle; all positions are taken relative to O_r and the constant
 * terms of the quadratics are written as products of sines, which keeps the
 * result accurate for R of several thousand r.
 */
inline StepOutcome billiard_step(const LemonTable& t, const PhasePoint& x) {
    if (!in_arc_range(t, x.arc, x.phi))
        throw RangeError(std::string("billiard_step: phi outside ") + to_string(x.arc));
    if (x.theta < kTangentTol || kPi - x.theta < kTangentTol)
        return TangentialEscape{};

    if (auto psi = detail::own_arc_landing(t, x)) {
        if (auto c = detail::near_corner(t, x.arc, *psi))
            return *c;
        const double rho = t.radius(x.arc);
        const double s = std::sin(x.theta);
        return CollisionEvent{{x.arc, *psi, x.theta}, 2.0 * rho * s, rho * s};
    }

    const double alpha = x.phi + kPi / 2.0 + x.theta;
    const Vec2 u{std::cos(alpha), std::sin(alpha)};
    const Vec2 p = local_arc_point(t, x.arc, x.phi);
    const double b = t.b();

    ArcLabel to;
    double tau, psi = 0.0;
    if (x.arc == ArcLabel::SmallArc) {
        // |p + (b,0) + tau u| = R; constant term 2br(cos phi - cos phi*).
        const Vec2 w{p.x + b, p.y};
        const double c = -4.0 * b * t.r() * std::sin(0.5 * (x.phi + t.phi_star())) *
                         std::sin(0.5 * (x.phi - t.phi_star()));
        tau = detail::exit_root(dot(w, u), std::min(c, 0.0));
        to = ArcLabel::BigArc;
        if (tau > kMinFreePath) {
            const Vec2 q = p + tau * u;
            psi = std::atan2(q.y, q.x + b);
        }
    } else {
        // |p + tau u| = r; constant term 2bR(cos Phi* - cos phi).
        const double c = -4.0 * b * t.R() * std::sin(0.5 * (t.Phi_star() + x.phi)) *
                         std::sin(0.5 * (t.Phi_star() - x.phi));
        tau = detail::exit_root(dot(p, u), std::min(c, 0.0));
        to = ArcLabel::SmallArc;
        if (tau > kMinFreePath) {
            const Vec2 q = p + tau * u;
            psi = detail::wrap_two_pi(std::atan2(q.y, q.x));
        }
    }
    if (!(tau > kMinFreePath)) {
        const double da = x.arc == ArcLabel::SmallArc ? std::abs(x.phi - t.phi_star()) : std::abs(x.phi - t.Phi_star());
        const double db = x.arc == ArcLabel::SmallArc ? std::abs(x.phi - (kTwoPi - t.phi_star()))
                                                      : std::abs(x.phi + t.Phi_star());
        const double rho = t.radius(x.arc);
        return da <= db ? CornerHit{Corner::A, rho * da} : CornerHit{Corner::B, rho * db};
    }
    if (auto c = detail::near_corner(t, to, psi))
        return *c;
    if (!in_arc_range(t, to, psi))
        throw SingularityError("billiard_step: landing point off the boundary");

    const double theta = detail::wrap_two_pi(psi - x.phi - x.theta);
    if (!(theta > 0.0 && theta < kPi))
        return TangentialEscape{};
    return CollisionEvent{{to, psi, theta}, tau, t.radius(to) * std::sin(theta)};
}

// F^{-1} = I o F o I.
inline StepOutcome billiard_inverse(const LemonTable& t, const PhasePoint& x) {
    StepOutcome s = billiard_step(t, involution(x));
    if (auto* e = std::get_if<CollisionEvent>(&s))
        e->point = involution(e->point);
    return s;
}

inline const char* describe(const StepOutcome& s) {
    if (std::holds_alternative<CornerHit>(s))
        return std::get<CornerHit>(s).corner == Corner::A ? "corner hit at A" : "corner hit at B";
    if (std::holds_alternative<TangentialEscape>(s))
        return "tangential escape";
    return "regular";
}

// Step that must be regular.
inline CollisionEvent step_or_throw(const LemonTable& t, const PhasePoint& x) {
    StepOutcome s = billiard_step(t, x);
    if (auto* e = next_event(s))
        return *e;
    throw SingularityError(std::string("billiard_step: ") + describe(s));
}

inline CollisionEvent inverse_or_throw(const LemonTable& t, const PhasePoint& x) {
    StepOutcome s = billiard_inverse(t, x);
    if (auto* e = next_event(s))
        return *e;
    throw SingularityError(std::string("billiard_inverse: ") + describe(s));
}

enum class Truncation { None, CornerHit, TangentialEscape };

inline const char* to_string(Truncation tr) {
    switch (tr) {
    case Truncation::None: return "none";
    case Truncation::CornerHit: return "corner_hit";
    case Truncation::TangentialEscape: return "tangential_escape";
    }
    return "?";
}

struct Orbit {
    std::vector<CollisionEvent> events;
    Truncation truncation = Truncation::None;
    std::optional<CornerHit> corner;
};

inline Orbit orbit(const LemonTable& t, const PhasePoint& x, long long n_steps) {
    if (n_steps < 0)
        throw DomainError("orbit: n_steps must be >= 0");
    Orbit o;
    o.events.reserve(static_cast<std::size_t>(std::min<long long>(n_steps, 1 << 20)) + 1);
    o.events.push_back({x, std::nullopt, chord_half_length(t, x)});
    for (long long k = 0; k < n_steps; ++k) {
        StepOutcome s = billiard_step(t, o.events.back().point);
        if (auto* e = next_event(s)) {
            o.events.push_back(*e);
            continue;
        }
        if (auto* c = std::get_if<CornerHit>(&s)) {
            o.truncation = Truncation::CornerHit;
            o.corner = *c;
        } else {
            o.truncation = Truncation::TangentialEscape;
        }
        break;
    }
    return o;
}

/*!
 * n(x): the number of reflections the orbit of x still makes on the small arc,
 * i.e. the smallest n >= 0 with F^n x in M_r^out. Empty when the orbit stays on
 * the small arc for more than kNeverLeavesCap steps.
 */
inline std::optional<long long> remaining_reflections(const LemonTable& t, const PhasePoint& x) {
    if (x.arc != ArcLabel::SmallArc)
        throw DomainError("remaining_reflections: x must lie on the small arc");
    PhasePoint cur = x;
    for (long long n = 0; n <= kNeverLeavesCap; ++n) {
        const CollisionEvent e = step_or_throw(t, cur);
        if (e.point.arc == ArcLabel::BigArc)
            return n;
        cur = e.point;
    }
    return std::nullopt;
}

// A point whose next collision is on the other arc.
inline bool leaves_arc(const LemonTable& t, const PhasePoint& x) {
    return step_or_throw(t, x).point.arc != x.arc;
}

// A point whose previous collision is on the other arc.
inline bool entered_arc(const LemonTable& t, const PhasePoint& x) {
    return inverse_or_throw(t, x).point.arc != x.arc;
}

/*!
 * Partition label of x. The reflection index of MrIn/MrOut is -1 if the
 * count exceeds kNeverLeavesCap.
 */
inline RegionTag region_of(const LemonTable& t, const PhasePoint& x) {
    using K = RegionTag::Kind;
    const bool in = entered_arc(t, x);
    const bool out = leaves_arc(t, x);
    if (x.arc == ArcLabel::BigArc) {
        if (in && out)
            return {K::MRBoth, 0};
        if (in)
            return {K::MRIn, 0};
        if (out)
            return {K::MROut, 0};
        return {K::MRInterior, 0};
    }
    if (in && out)
        return {K::MrBoth, 0};
    if (in)
        return {K::MrIn, remaining_reflections(t, x).value_or(-1)};
    if (out)
        return {K::MrOut, remaining_reflections(t, involution(x)).value_or(-1)};
    return {K::MrInterior, 0};
}

} // namespace lemon
