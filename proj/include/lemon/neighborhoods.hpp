#pragma once

#include <variant>

#include "lemon/dynamics.hpp"
#include "lemon/phase.hpp"

namespace lemon {

/*!
 * V(delta): points of M_r^out within delta of x* or y*. The reference points
 * themselves move along the chord AB into a corner; they are counted as members.
 * Other points whose next step is singular are not in M_r^out.
 */
inline bool in_V_delta(const LemonTable& t, const PhasePoint& x, double delta) {
    if (!(delta > 0.0))
        throw DomainError("in_V_delta: delta must be positive");
    if (x.arc != ArcLabel::SmallArc)
        return false;
    const ReferencePoints ref = reference_points(t);
    const double dist = std::min(phase_distance(x, ref.x_star), phase_distance(x, ref.y_star));
    if (!(dist < delta))
        return false;
    if (dist == 0.0)
        return true;
    const StepOutcome s = billiard_step(t, x);
    const CollisionEvent* e = next_event(s);
    return e != nullptr && e->point.arc == ArcLabel::BigArc;
}

// U(delta) = I(V(delta)): points of M_r^in within delta of Ix* or Iy*.
inline bool in_U_delta(const LemonTable& t, const PhasePoint& x, double delta) {
    return in_V_delta(t, involution(x), delta);
}

} // namespace lemon
