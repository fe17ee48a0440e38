#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lemon/dynamics.hpp"

namespace lemon {

struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
    double max_abs() const { return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)}); }
    double min_abs() const { return std::min({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)}); }

    friend Mat2 operator*(const Mat2& m, const Mat2& n) {
        return {m.a11 * n.a11 + m.a12 * n.a21, m.a11 * n.a12 + m.a12 * n.a22, m.a21 * n.a11 + m.a22 * n.a21,
                m.a21 * n.a12 + m.a22 * n.a22};
    }
    friend Mat2 operator*(double s, const Mat2& m) { return {s * m.a11, s * m.a12, s * m.a21, s * m.a22}; }
    friend Vec2 operator*(const Mat2& m, Vec2 v) { return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y}; }
    friend bool operator==(const Mat2&, const Mat2&) = default;
};

// The same-arc step [[1,2],[0,1]].
inline constexpr Mat2 kShear{1.0, 2.0, 0.0, 1.0};

inline double max_abs_diff(const Mat2& m, const Mat2& n) {
    return std::max({std::abs(m.a11 - n.a11), std::abs(m.a12 - n.a12), std::abs(m.a21 - n.a21),
                     std::abs(m.a22 - n.a22)});
}

// Tangent map (1/d1) [[tau - d0, tau], [tau - d0 - d1, tau - d1]] in (phi, theta).
inline Mat2 step_jacobian(double tau, double d0, double d1) {
    return {(tau - d0) / d1, tau / d1, (tau - d0 - d1) / d1, (tau - d1) / d1};
}

inline Mat2 step_jacobian(const LemonTable& t, const PhasePoint& x) {
    const CollisionEvent e = step_or_throw(t, x);
    return step_jacobian(*e.tau_prev, chord_half_length(t, x), e.d);
}

// Ordered product over consecutive events, last step leftmost.
inline Mat2 segment_jacobian(const std::vector<CollisionEvent>& events) {
    if (events.size() < 2)
        throw DomainError("segment_jacobian: need at least two events");
    Mat2 m = Mat2::identity();
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (!events[i].tau_prev)
            throw DomainError("segment_jacobian: missing free path");
        m = step_jacobian(*events[i].tau_prev, events[i - 1].d, events[i].d) * m;
    }
    return m;
}

struct DefocusClass {
    enum class Kind { PositivelyDefocusing, NegativelyDefocusing, Neither, Marginal };
    Kind kind = Kind::Neither;
    double min_abs = 0.0; // smallest entry magnitude; set for Marginal

    bool defocusing() const { return kind == Kind::PositivelyDefocusing || kind == Kind::NegativelyDefocusing; }
};

inline std::string to_string(const DefocusClass& c) {
    using K = DefocusClass::Kind;
    switch (c.kind) {
    case K::PositivelyDefocusing: return "PositivelyDefocusing";
    case K::NegativelyDefocusing: return "NegativelyDefocusing";
    case K::Neither: return "Neither";
    case K::Marginal: return "Marginal";
    }
    return "?";
}

inline double default_sign_tol(const Mat2& m) { return 1e-9 * m.max_abs(); }

/*!
 * Sign pattern of the four entries. Exact zeros and entries of strictly mixed
 * sign give Neither. If the signs agree but some entry is within sign_tol of
 * zero the result is Marginal.
 */
inline DefocusClass classify_defocusing(const Mat2& m, double sign_tol) {
    using K = DefocusClass::Kind;
    const double e[4] = {m.a11, m.a12, m.a21, m.a22};
    int pos = 0, neg = 0;
    for (double v : e) {
        if (!std::isfinite(v) || v == 0.0)
            return {K::Neither, 0.0};
        (v > 0.0 ? pos : neg)++;
    }
    if (pos != 4 && neg != 4)
        return {K::Neither, 0.0};
    const double mn = m.min_abs();
    if (mn <= sign_tol)
        return {K::Marginal, mn};
    return {pos == 4 ? K::PositivelyDefocusing : K::NegativelyDefocusing, mn};
}

inline DefocusClass classify_defocusing(const Mat2& m) { return classify_defocusing(m, default_sign_tol(m)); }

// Whether m maps the cone {uv >= 0} into itself.
inline bool cone_maps_into(const Mat2& m) {
    const double e[4] = {m.a11, m.a12, m.a21, m.a22};
    if (std::all_of(e, e + 4, [](double v) { return v > 0.0; }) ||
        std::all_of(e, e + 4, [](double v) { return v < 0.0; }))
        return true;
    const bool nonneg = std::all_of(e, e + 4, [](double v) { return v >= 0.0; });
    const bool nonpos = std::all_of(e, e + 4, [](double v) { return v <= 0.0; });
    return (nonneg || nonpos) && m.det() > 0.0;
}

/*!
 * Central differences of F in (phi, theta) with step h. Every stencil point
 * must be regular and land on the same arc as x's image.
 */
inline Mat2 finite_diff_jacobian(const LemonTable& t, const PhasePoint& x, double h) {
    const StepOutcome base = billiard_step(t, x);
    const CollisionEvent* e0 = next_event(base);
    if (!e0)
        throw ItineraryChange(std::string("finite_diff_jacobian: base point is singular (") + describe(base) + ")");
    auto image = [&](double dphi, double dtheta) {
        const PhasePoint y{x.arc, x.phi + dphi, x.theta + dtheta};
        if (!in_arc_range(t, y.arc, y.phi) || !(y.theta > 0.0 && y.theta < kPi))
            throw ItineraryChange("finite_diff_jacobian: stencil point leaves the arc");
        const StepOutcome s = billiard_step(t, y);
        const CollisionEvent* e = next_event(s);
        if (!e || e->point.arc != e0->point.arc)
            throw ItineraryChange("finite_diff_jacobian: stencil point changes itinerary");
        return e->point;
    };
    const PhasePoint pp = image(h, 0.0), pm = image(-h, 0.0), tp = image(0.0, h), tm = image(0.0, -h);
    const double s = 0.5 / h;
    return {s * detail::wrap_pi(pp.phi - pm.phi), s * detail::wrap_pi(tp.phi - tm.phi), s * (pp.theta - pm.theta),
            s * (tp.theta - tm.theta)};
}

} // namespace lemon
