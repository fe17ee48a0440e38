#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lemon/dynamics.hpp"
#include "lemon/neighborhoods.hpp"
#include "lemon/tangent.hpp"

namespace lemon {

// Step cap for first_return and the run walks behind it.
inline constexpr long long kReturnCap = 10'000'000;

/*!
 * Orbit piece around one passage through the big arc:
 *
 *   pre0 = F^{-1} x0, x0 in M_r^out, x1 = F x0 in M_R^in, ..., F^{n1} x1,
 *   x2 = F^{n1+1} x1 in M_r^in, post2 = F x2.
 *
 * events holds that whole window, so events[1] is x0, events[2] is x1,
 * events[n1 + 3] is x2. n0 is the number of steps from the M-hat point the
 * segment was extracted from to x0.
 */
struct ReturnSegment {
    long long n0 = 0;
    long long n1 = 0;
    PhasePoint start;
    PhasePoint pre0, x0, x1, x2, post2;
    double tau0 = 0.0, tau1 = 0.0;
    double d0 = 0.0, d1 = 0.0, d2 = 0.0;
    double p = 0.0;
    std::vector<CollisionEvent> events;

    std::size_t x0_index() const { return 1; }
    std::size_t x2_index() const { return static_cast<std::size_t>(n1) + 3; }
};

enum class SegmentCase { SingleTransverse, SingleTangential, Multiple };

inline const char* to_string(SegmentCase c) {
    switch (c) {
    case SegmentCase::SingleTransverse: return "SingleTransverse";
    case SegmentCase::SingleTangential: return "SingleTangential";
    case SegmentCase::Multiple: return "Multiple";
    }
    return "?";
}

inline SegmentCase segment_case(const LemonTable& t, const ReturnSegment& s) {
    if (s.n1 >= 1)
        return SegmentCase::Multiple;
    return s.d1 >= 2.0 * t.r() ? SegmentCase::SingleTransverse : SegmentCase::SingleTangential;
}

/*!
 * M-hat picks one point from every run of consecutive small-arc collisions.
 * With e the first point of the run (e in M_r^in): e itself if n(e) = 0, or
 * n(e) = 1 and e is outside U(delta*); otherwise F e.
 */
inline bool entry_represents_run(const LemonTable& t, const PhasePoint& e) {
    const CollisionEvent f = step_or_throw(t, e);
    if (f.point.arc == ArcLabel::BigArc)
        return true;
    if (step_or_throw(t, f.point).point.arc == ArcLabel::SmallArc)
        return false;
    return !in_U_delta(t, e, t.delta_star());
}

inline bool in_hat_M(const LemonTable& t, const PhasePoint& x) {
    if (x.arc != ArcLabel::SmallArc)
        return false;
    if (entered_arc(t, x))
        return entry_represents_run(t, x);
    const CollisionEvent prev = inverse_or_throw(t, x);
    if (!entered_arc(t, prev.point))
        return false;
    return !entry_represents_run(t, prev.point);
}

// M-hat representative of the small-arc run that contains x.
inline PhasePoint hat_M_representative(const LemonTable& t, const PhasePoint& x) {
    if (x.arc != ArcLabel::SmallArc)
        throw DomainError("hat_M_representative: x must lie on the small arc");
    PhasePoint e = x;
    for (long long k = 0;; ++k) {
        if (k > kReturnCap)
            throw NoReturn("hat_M_representative: run start not found within the step cap");
        const CollisionEvent prev = inverse_or_throw(t, e);
        if (prev.point.arc == ArcLabel::BigArc)
            break;
        e = prev.point;
    }
    return entry_represents_run(t, e) ? e : step_or_throw(t, e).point;
}

struct FirstReturn {
    long long sigma = 0;
    PhasePoint y;
};

inline FirstReturn first_return(const LemonTable& t, const PhasePoint& x) {
    if (!in_hat_M(t, x))
        throw DomainError("first_return: x is not in M-hat");
    PhasePoint cur = x;
    long long n = 0;
    auto advance = [&] {
        if (++n > kReturnCap)
            throw NoReturn("first_return: no return within the step cap");
        cur = step_or_throw(t, cur).point;
    };
    while (cur.arc == ArcLabel::SmallArc)
        advance();
    while (cur.arc == ArcLabel::BigArc)
        advance();
    if (!entry_represents_run(t, cur))
        advance();
    return {n, cur};
}

/*!
 * Segment of the return window of x in M-hat. Throws SingularityError if any
 * collision from pre0 to post2 is singular.
 */
inline ReturnSegment extract_segment(const LemonTable& t, const PhasePoint& x) {
    if (x.arc != ArcLabel::SmallArc)
        throw DomainError("extract_segment: x must lie on the small arc");
    ReturnSegment s;
    s.start = x;
    CollisionEvent cur{x, std::nullopt, chord_half_length(t, x)};
    std::optional<CollisionEvent> before;
    for (;;) {
        CollisionEvent next = step_or_throw(t, cur.point);
        if (next.point.arc == ArcLabel::BigArc) {
            if (!before)
                before = inverse_or_throw(t, x);
            s.events.push_back({before->point, std::nullopt, before->d});
            s.events.push_back(cur);
            s.events.push_back(next);
            break;
        }
        if (++s.n0 > kReturnCap)
            throw NoReturn("extract_segment: x0 not reached within the step cap");
        before = cur;
        cur = next;
    }
    // tau into x0 is measured from pre0.
    if (!s.events[1].tau_prev)
        s.events[1].tau_prev = *step_or_throw(t, s.events[0].point).tau_prev;
    for (;;) {
        CollisionEvent next = step_or_throw(t, s.events.back().point);
        s.events.push_back(next);
        if (next.point.arc == ArcLabel::SmallArc)
            break;
        if (++s.n1 > kReturnCap)
            throw NoReturn("extract_segment: x2 not reached within the step cap");
    }
    s.events.push_back(step_or_throw(t, s.events.back().point));

    const std::size_t i2 = s.x2_index();
    s.pre0 = s.events[0].point;
    s.x0 = s.events[1].point;
    s.x1 = s.events[2].point;
    s.x2 = s.events[i2].point;
    s.post2 = s.events[i2 + 1].point;
    s.tau0 = *s.events[2].tau_prev;
    s.tau1 = *s.events[i2].tau_prev;
    s.d0 = s.events[1].d;
    s.d1 = s.events[2].d;
    s.d2 = s.events[i2].d;
    s.p = static_cast<double>(s.n1) / static_cast<double>(s.n1 + 1);
    return s;
}

/*!
 * Segment whose big-arc passage starts at x1. Empty when F^{-1} x1 is on the
 * big arc. Sampling x1 from mu on the big arc and keeping the entry points
 * samples mu on M-hat, since x -> F^{n0(x)+1} x is a measure-preserving
 * bijection from M-hat onto M_R^in.
 */
inline std::optional<ReturnSegment> segment_from_entry(const LemonTable& t, const PhasePoint& x1) {
    if (x1.arc != ArcLabel::BigArc)
        throw DomainError("segment_from_entry: x1 must lie on the big arc");
    const CollisionEvent x0 = inverse_or_throw(t, x1);
    if (x0.point.arc != ArcLabel::SmallArc)
        return std::nullopt;
    return extract_segment(t, hat_M_representative(t, x0.point));
}

/*!
 * (d1 d2) times the tangent map from x0 to x2, in closed form. For n1 >= 1
 * the n1 same-arc steps on the big arc enter through p = n1/(n1+1).
 */
inline Mat2 D_matrix(const ReturnSegment& s) {
    const double t0 = s.tau0, t1 = s.tau1, d0 = s.d0, d1 = s.d1, d2 = s.d2;
    if (s.n1 == 0) {
        return {2 * t1 * (t0 - d0) - d1 * (t0 - d0 + t1), 2 * t1 * t0 - d1 * (t0 + t1),
                2 * (t1 - d2) * (t0 - d0) - d1 * (t0 - d0 + t1 - d2), 2 * (t1 - d2) * t0 - d1 * (t0 + t1 - d2)};
    }
    const double k = static_cast<double>(s.n1 + 1);
    const double p = s.p;
    return {k * ((t1 - d1) * (t0 - d0 - p * d1) + (t1 - p * d1) * (t0 - d0 - d1)),
            k * ((t1 - d1) * (t0 - p * d1) + (t1 - p * d1) * (t0 - d1)),
            k * ((t1 - d1 - d2) * (t0 - d0 - p * d1) + (t1 - p * d1 - d2) * (t0 - d0 - d1)),
            k * ((t1 - d1 - d2) * (t0 - p * d1) + (t1 - p * d1 - d2) * (t0 - d1))};
}

// The extension by pre0 and post2 requires both to be small-arc collisions.
inline bool extension_valid(const ReturnSegment& s) {
    return s.pre0.arc == ArcLabel::SmallArc && s.post2.arc == ArcLabel::SmallArc;
}

// (d1 d2) times the tangent map from pre0 to post2: [[1,2],[0,1]] D [[1,2],[0,1]].
inline Mat2 G_matrix(const ReturnSegment& s) {
    if (!extension_valid(s))
        throw ExtensionInvalid("G_matrix: F^{-1}x0 or F x2 is not on the small arc");
    const Mat2 D = D_matrix(s);
    return {D.a11 + 2 * D.a21, 2 * D.a11 + 4 * D.a21 + D.a12 + 2 * D.a22, D.a21, 2 * D.a21 + D.a22};
}

// The same two matrices as products of step Jacobians along the window.
inline Mat2 D_matrix_product(const ReturnSegment& s) {
    std::vector<CollisionEvent> w(s.events.begin() + 1, s.events.begin() + static_cast<std::ptrdiff_t>(s.x2_index()) + 1);
    return (s.d1 * s.d2) * segment_jacobian(w);
}

inline Mat2 G_matrix_product(const ReturnSegment& s) {
    if (!extension_valid(s))
        throw ExtensionInvalid("G_matrix_product: F^{-1}x0 or F x2 is not on the small arc");
    return (s.d1 * s.d2) * segment_jacobian(s.events);
}

} // namespace lemon
