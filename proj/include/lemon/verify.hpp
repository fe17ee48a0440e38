#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lemon/dynamics.hpp"
#include "lemon/neighborhoods.hpp"
#include "lemon/parallel.hpp"
#include "lemon/returnmap.hpp"
#include "lemon/rng.hpp"
#include "lemon/tangent.hpp"

namespace lemon {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Slack, relative to the size of the compared quantities, inside which an
// inequality is reported as marginal.
inline constexpr double kMarginTol = 1e-9;

// Violation records kept per report.
inline constexpr std::size_t kMaxDetails = 64;

struct Violation {
    std::string what;
    PhasePoint point;
    double value = 0.0;
    double bound = 0.0;
};

/*!
 * Result of one numerical check. samples counts evaluated samples; a sample
 * with several failed assertions counts once in violations. worst_margin is
 * the smallest relative slack seen over passing samples.
 */
struct CheckReport {
    std::string name;
    long long samples = 0;
    long long violations = 0;
    long long marginal = 0;
    long long singular = 0;
    double worst_margin = kInf;
    std::vector<Violation> details;
    std::map<std::string, long long> counters;
    bool hypothesis_met = true;
    bool aborted = false;
    std::string diagnostic;

    bool hard_failure() const { return hypothesis_met && (violations > 0 || aborted); }
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct SampleOutcome {
    bool violated = false;
    bool marginal = false;
    double margin = kInf;
    std::vector<Violation> details;
    std::vector<std::pair<std::string, long long>> counters;
    long long singular = 0;
    bool exhausted = false;

    void count(std::string key, long long n = 1) { counters.emplace_back(std::move(key), n); }

    void fail(std::string what, const PhasePoint& x, double value, double bound) {
        violated = true;
        details.push_back({std::move(what), x, value, bound});
    }

    // value < bound, with a marginal band of kMarginTol * scale.
    void require_less(const char* what, const PhasePoint& x, double value, double bound, double scale = 0.0) {
        scale = std::max({scale, std::abs(value), std::abs(bound)});
        const double slack = bound - value;
        const double tol = kMarginTol * scale;
        if (slack > tol)
            margin = std::min(margin, scale > 0.0 ? slack / scale : slack);
        else if (slack >= -tol)
            marginal = true;
        else
            fail(what, x, value, bound);
    }

    void require(bool ok, const char* what, const PhasePoint& x, double value = 0.0, double bound = 0.0) {
        if (!ok)
            fail(what, x, value, bound);
    }
};

inline constexpr int kMaxAttempts = 10000;

/*!
 * Runs fn(g) for n sample slots. fn returns std::nullopt to reject a draw; a
 * SingularityError or NoReturn marks a singular draw. Both are redrawn from
 * the same per-slot stream, so the result depends only on (seed, n).
 */
template <class Fn>
CheckReport run_check(const std::string& name, long long n, std::uint64_t seed, Fn&& fn) {
    if (n <= 0)
        throw DomainError(name + ": sample budget must be positive");
    const std::uint64_t key = mix64(seed ^ fnv1a(name));
    auto outcomes = parallel_map<SampleOutcome>(static_cast<std::size_t>(n), [&](std::size_t i) {
        SplitMix64 g(key, i);
        long long singular = 0;
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            try {
                std::optional<SampleOutcome> o = fn(g);
                if (!o)
                    continue;
                o->singular = singular;
                return *o;
            } catch (const SingularityError&) {
                ++singular;
            } catch (const NoReturn&) {
                ++singular;
            }
        }
        SampleOutcome o;
        o.singular = singular;
        o.exhausted = true;
        return o;
    });

    CheckReport rep;
    rep.name = name;
    long long exhausted = 0;
    for (const SampleOutcome& o : outcomes) {
        rep.singular += o.singular;
        if (o.exhausted) {
            ++exhausted;
            continue;
        }
        ++rep.samples;
        if (o.violated)
            ++rep.violations;
        else if (o.marginal)
            ++rep.marginal;
        else
            rep.worst_margin = std::min(rep.worst_margin, o.margin);
        for (const Violation& v : o.details)
            if (rep.details.size() < kMaxDetails)
                rep.details.push_back(v);
        for (const auto& [k, c] : o.counters)
            rep.counters[k] += c;
    }
    if (exhausted > 0) {
        rep.aborted = true;
        rep.diagnostic = std::to_string(exhausted) + " sample slots found no admissible draw in " +
                         std::to_string(kMaxAttempts) + " attempts";
    } else if (static_cast<double>(rep.singular) > 0.01 * static_cast<double>(n)) {
        rep.aborted = true;
        rep.diagnostic = std::to_string(rep.singular) + " singular draws exceed 1% of the budget of " +
                         std::to_string(n);
    }
    return rep;
}

} // namespace detail

// Samplers for segments. Mu draws x1 from mu on the big arc, which samples mu
// on M-hat; the grazing strata restrict theta1 to the near-tangent range.
enum class Stratum { Mu, Grazing, MultiGrazing };

inline const char* to_string(Stratum s) {
    switch (s) {
    case Stratum::Mu: return "mu";
    case Stratum::Grazing: return "grazing";
    case Stratum::MultiGrazing: return "multi";
    }
    return "?";
}

// theta1 < Psi_R gives d1 < 2r; n1 >= 1 needs theta1 < Phi*.
inline std::optional<ReturnSegment> sample_segment(const LemonTable& t, SplitMix64& g, Stratum s) {
    PhasePoint x1;
    switch (s) {
    case Stratum::Mu: x1 = sample_mu_big(t, g); break;
    case Stratum::Grazing: x1 = sample_mu_big_grazing(t, g, t.Psi_R()); break;
    case Stratum::MultiGrazing: x1 = sample_mu_big_grazing(t, g, std::min(1.2 * t.Phi_star(), t.Psi_R())); break;
    }
    return segment_from_entry(t, x1);
}

/*!
 * Samples U(delta) uniformly in (phi, theta), picking one of the balls
 * around Iy* and Ix* at random. Asserts x not in V(delta), F x not in V(delta) and
 * n(x) >= 1.
 */
inline CheckReport check_uv_separation(const LemonTable& t, double delta, long long n_samples, std::uint64_t seed) {
    if (!(delta > 0.0) || delta > t.delta_star() * (1.0 + 1e-12))
        throw DomainError("check_uv_separation: need 0 < delta <= delta*");
    const ReferencePoints ref = reference_points(t);
    auto rep = detail::run_check("uv_separation", n_samples, seed, [&](SplitMix64& g) -> std::optional<detail::SampleOutcome> {
        const bool around_Iy = g.uniform() < 0.5;
        const PhasePoint c = around_Iy ? ref.Iy_star : ref.Ix_star;
        const double rad = delta * std::sqrt(g.uniform());
        const double ang = kTwoPi * g.uniform();
        const PhasePoint x{ArcLabel::SmallArc, c.phi + rad * std::cos(ang), c.theta + rad * std::sin(ang)};
        if (!is_valid(t, x) || !in_U_delta(t, x, delta))
            return std::nullopt;
        detail::SampleOutcome o;
        o.count(around_Iy ? "around_Iy_star" : "around_Ix_star");
        const double dx = std::min(phase_distance(x, ref.x_star), phase_distance(x, ref.y_star));
        o.require(!in_V_delta(t, x, delta), "x in V(delta)", x, dx, delta);
        const CollisionEvent fx = step_or_throw(t, x);
        double dfx = kInf;
        if (fx.point.arc == ArcLabel::SmallArc) {
            dfx = std::min(phase_distance(fx.point, ref.x_star), phase_distance(fx.point, ref.y_star));
            o.require(!in_V_delta(t, fx.point, delta), "F x in V(delta)", x, dfx, delta);
        }
        const std::optional<long long> nx = remaining_reflections(t, x);
        o.require(!nx || *nx >= 1, "n(x) = 0", x, 0.0, 1.0);
        if (nx && *nx == 1)
            o.count("n_equals_1");
        o.margin = (std::min(dx, dfx) - delta) / delta;
        return o;
    });
    return rep;
}

/*!
 * For segments with d1 < 2r: x0 in V(delta*), x2 in U(delta*), and the
 * distance of x0 (x2) to the nearest of x*, y* (Ix*, Iy*) is below
 * 14.6 r/(R sin phi*) when n1 = 0 and below 5.84 r sin phi* / R when n1 >= 1.
 */
inline CheckReport check_near_tangency(const LemonTable& t, long long n_samples, std::uint64_t seed) {
    const ReferencePoints ref = reference_points(t);
    const double s = t.sin_phi_star();
    auto rep = detail::run_check("near_tangency", n_samples, seed, [&](SplitMix64& g) -> std::optional<detail::SampleOutcome> {
        const std::optional<ReturnSegment> seg = sample_segment(t, g, g.uniform() < 0.5 ? Stratum::Grazing : Stratum::MultiGrazing);
        if (!seg || !(seg->d1 < 2.0 * t.r()))
            return std::nullopt;
        detail::SampleOutcome o;
        o.count(seg->n1 == 0 ? "n1_zero" : "n1_positive");
        o.require(in_V_delta(t, seg->x0, t.delta_star()), "x0 not in V(delta*)", seg->x0);
        o.require(in_U_delta(t, seg->x2, t.delta_star()), "x2 not in U(delta*)", seg->x2);
        const double bound = seg->n1 == 0 ? 14.6 * t.r() / (t.R() * s) : 5.84 * t.r() * s / t.R();
        const double e0 = std::min(phase_distance(seg->x0, ref.x_star), phase_distance(seg->x0, ref.y_star));
        const double e2 = std::min(phase_distance(seg->x2, ref.Ix_star), phase_distance(seg->x2, ref.Iy_star));
        const char* w0 = seg->n1 == 0 ? "|x0 - x*| >= 14.6r/(R sin phi*)" : "|x0 - x*| >= 5.84r sin phi* / R";
        const char* w2 = seg->n1 == 0 ? "|x2 - Ix*| >= 14.6r/(R sin phi*)" : "|x2 - Ix*| >= 5.84r sin phi* / R";
        o.require_less(w0, seg->x0, e0, bound);
        o.require_less(w2, seg->x2, e2, bound);
        return o;
    });
    rep.hypothesis_met = t.R() >= near_tangency_threshold(t.phi_star());
    rep.counters["hypothesis_weak_form_met"] = t.R() >= near_tangency_threshold_weak(t.phi_star()) ? 1 : 0;
    return rep;
}

/*!
 * For x in M-hat with d1 < 2r, F^{-1} x0 and F x2 sit at orbit indices
 * n0 - 1 and n0 + n1 + 3, which must lie in [0, sigma(x)].
 */
inline CheckReport check_subsegment(const LemonTable& t, long long n_samples, std::uint64_t seed) {
    auto rep = detail::run_check("subsegment", n_samples, seed, [&](SplitMix64& g) -> std::optional<detail::SampleOutcome> {
        const std::optional<ReturnSegment> seg = sample_segment(t, g, g.uniform() < 0.5 ? Stratum::Grazing : Stratum::MultiGrazing);
        if (!seg || !(seg->d1 < 2.0 * t.r()))
            return std::nullopt;
        const long long sigma = first_return(t, seg->start).sigma;
        detail::SampleOutcome o;
        const long long lo = seg->n0 - 1;
        const long long hi = seg->n0 + seg->n1 + 3;
        o.require(lo >= 0, "F^{-1}x0 precedes x", seg->start, static_cast<double>(lo), 0.0);
        o.require(hi <= sigma, "F x2 beyond the return", seg->start, static_cast<double>(hi), static_cast<double>(sigma));
        o.margin = static_cast<double>(std::min(lo, sigma - hi));
        return o;
    });
    rep.hypothesis_met = t.R() >= near_tangency_threshold(t.phi_star());
    return rep;
}

/*!
 * Defocusing trichotomy over sampled segments, stratified over mu on M-hat,
 * d1 < 2r, and theta1 near the n1 >= 1 range:
 * SingleTransverse -> D negative, SingleTangential -> G negative,
 * Multiple -> G positive.
 */
inline CheckReport check_defocusing(const LemonTable& t, long long n_samples, std::uint64_t seed,
                                    ThresholdVariant variant = ThresholdVariant::Theorem) {
    using K = DefocusClass::Kind;
    auto rep = detail::run_check("defocusing", n_samples, seed, [&](SplitMix64& g) -> std::optional<detail::SampleOutcome> {
        const double u = g.uniform();
        const Stratum st = u < 1.0 / 3.0 ? Stratum::Mu : u < 2.0 / 3.0 ? Stratum::Grazing : Stratum::MultiGrazing;
        const std::optional<ReturnSegment> seg = sample_segment(t, g, st);
        if (!seg)
            return std::nullopt;
        detail::SampleOutcome o;
        const SegmentCase c = segment_case(t, *seg);
        o.count(std::string("stratum_") + to_string(st));
        o.count(std::string("case_") + to_string(c));
        Mat2 m;
        K expected;
        if (c == SegmentCase::SingleTransverse) {
            m = D_matrix(*seg);
            expected = K::NegativelyDefocusing;
            o.require_less("tau0 >= 2r", seg->x0, seg->tau0, 2.0 * t.r());
            o.require_less("tau1 >= 2r", seg->x0, seg->tau1, 2.0 * t.r());
            o.require_less("2/d1 >= 1/tau0 + 1/tau1", seg->x0, 2.0 / seg->d1, 1.0 / seg->tau0 + 1.0 / seg->tau1);
        } else {
            if (!extension_valid(*seg)) {
                o.fail("extension invalid", seg->x0, 0.0, 0.0);
                return o;
            }
            m = G_matrix(*seg);
            expected = c == SegmentCase::SingleTangential ? K::NegativelyDefocusing : K::PositivelyDefocusing;
            if (seg->n1 >= 2) {
                o.require_less("tau0 >= 2/3 d0 + 2/3 d1", seg->x0, seg->tau0, 2.0 / 3.0 * (seg->d0 + seg->d1));
                o.require_less("tau1 >= 2/3 d1 + 2/3 d2", seg->x0, seg->tau1, 2.0 / 3.0 * (seg->d1 + seg->d2));
            }
        }
        const DefocusClass k = classify_defocusing(m);
        if (k.kind == K::Marginal)
            o.marginal = true;
        else if (k.kind != expected)
            o.fail(std::string(to_string(c)) + " segment is " + to_string(k), seg->x0, m.min_abs(), 0.0);
        else
            o.margin = std::min(o.margin, k.min_abs / m.max_abs());
        return o;
    });
    rep.hypothesis_met = t.R() >= min_radius_threshold(t.phi_star(), variant);
    return rep;
}

/*!
 * Bounds for n1 = 1 segments with tau0 >= 2/3 d0 + 1/2 d1 (and the
 * time-reversed case tau1 >= 1/2 d1 + 2/3 d2), and the n1 >= 2 bounds
 * tau0 < 2/3 (d0 + d1), tau1 < 2/3 (d1 + d2).
 */
inline CheckReport check_section5_bounds(const LemonTable& t, long long n_samples, std::uint64_t seed) {
    const double s = t.sin_phi_star();
    const double r = t.r();
    auto rep = detail::run_check("section5_bounds", n_samples, seed, [&](SplitMix64& g) -> std::optional<detail::SampleOutcome> {
        const std::optional<ReturnSegment> seg = sample_segment(t, g, Stratum::MultiGrazing);
        if (!seg || seg->n1 == 0)
            return std::nullopt;
        detail::SampleOutcome o;
        if (seg->n1 >= 2) {
            o.count("n1_at_least_2");
            o.require_less("tau0 >= 2/3 d0 + 2/3 d1", seg->x0, seg->tau0, 2.0 / 3.0 * (seg->d0 + seg->d1));
            o.require_less("tau1 >= 2/3 d1 + 2/3 d2", seg->x0, seg->tau1, 2.0 / 3.0 * (seg->d1 + seg->d2));
            return o;
        }
        const bool big0 = seg->tau0 >= 2.0 / 3.0 * seg->d0 + 0.5 * seg->d1;
        const bool big1 = seg->tau1 >= 0.5 * seg->d1 + 2.0 / 3.0 * seg->d2;
        if (!big0 && !big1)
            return std::nullopt;
        o.require(!(big0 && big1), "tau0 and tau1 large together", seg->x0);
        // The tau1-large case is the tau0-large case of the reversed segment.
        const double tau = big0 ? seg->tau0 : seg->tau1;
        const double d0 = big0 ? seg->d0 : seg->d2;
        const double d1 = seg->d1;
        o.count(big0 ? "tau0_large" : "tau1_large");
        o.require_less("d1 <= 13/30 r sin phi*", seg->x0, 13.0 / 30.0 * r * s, d1);
        o.require_less("d1 >= 0.7 r sin phi*", seg->x0, d1, 0.7 * r * s);
        o.require_less("tau0 >= d0 + 8.3 r^2 sin phi* / R", seg->x0, tau, d0 + 8.3 * r * r * s / t.R());
        const double box = 0.7 * r * s;
        o.require_less("|tau0 - d0 - d1| >= 0.7 r sin phi*", seg->x0, std::abs(tau - d0 - d1), box);
        o.require_less("|tau0 - d0 - d1/2| >= 0.7 r sin phi*", seg->x0, std::abs(tau - d0 - 0.5 * d1), box);
        o.require_less("|tau0 - 2d0/3 - d1| >= 0.7 r sin phi*", seg->x0, std::abs(tau - 2.0 / 3.0 * d0 - d1), box);
        o.require_less("|tau0 - 2d0/3 - d1/2| >= 0.7 r sin phi*", seg->x0, std::abs(tau - 2.0 / 3.0 * d0 - 0.5 * d1), box);
        return o;
    });
    rep.hypothesis_met = t.R() >= 414.0 * r;
    return rep;
}

/*!
 * Free-path bands of the segments:
 *   n1 = 0, d1 < 2r:  2r sin phi* < tau0 + tau1 < 2r sin phi* + 24.1 r^2/(R sin phi*)
 *   n1 >= 1:          2r sin phi* < tau0 + 2 n1 d1 + tau1 < 2r sin phi* + 8.1 r^2 sin phi* / R,
 *                     d1 > r sin phi* / (n1 + 2)
 *   n1 = 0:           tau0 + tau1 > 2 d0 and > 2 d2
 */
inline CheckReport check_segment_bands(const LemonTable& t, long long n_samples, std::uint64_t seed) {
    const double s = t.sin_phi_star();
    const double r = t.r();
    auto rep = detail::run_check("segment_bands", n_samples, seed, [&](SplitMix64& g) -> std::optional<detail::SampleOutcome> {
        const double u = g.uniform();
        const Stratum st = u < 1.0 / 3.0 ? Stratum::Mu : u < 2.0 / 3.0 ? Stratum::Grazing : Stratum::MultiGrazing;
        const std::optional<ReturnSegment> seg = sample_segment(t, g, st);
        if (!seg)
            return std::nullopt;
        detail::SampleOutcome o;
        const double lo = 2.0 * r * s;
        if (seg->n1 == 0) {
            const double sum = seg->tau0 + seg->tau1;
            o.require_less("tau0 + tau1 <= 2 d0", seg->x0, 2.0 * seg->d0, sum + 1e-12);
            o.require_less("tau0 + tau1 <= 2 d2", seg->x0, 2.0 * seg->d2, sum + 1e-12);
            if (seg->d1 < 2.0 * r) {
                o.count("n1_zero_grazing");
                o.require_less("tau0 + tau1 <= 2r sin phi*", seg->x0, lo, sum);
                o.require_less("tau0 + tau1 >= upper band", seg->x0, sum, lo + 24.1 * r * r / (t.R() * s));
            } else {
                o.count("n1_zero_transverse");
            }
        } else {
            o.count("n1_positive");
            const double sum = seg->tau0 + 2.0 * static_cast<double>(seg->n1) * seg->d1 + seg->tau1;
            o.require_less("tau0 + 2n1 d1 + tau1 <= 2r sin phi*", seg->x0, lo, sum);
            o.require_less("tau0 + 2n1 d1 + tau1 >= upper band", seg->x0, sum, lo + 8.1 * r * r * s / t.R());
            o.require_less("d1 <= r sin phi* / (n1 + 2)", seg->x0, r * s / static_cast<double>(seg->n1 + 2), seg->d1);
        }
        return o;
    });
    rep.hypothesis_met = t.R() >= std::max(near_tangency_threshold(t.phi_star()), 33.0 * r);
    return rep;
}

/*!
 * tau(x) <= d(x) + d(F x) over mu-samples of the whole phase space, plus the
 * chord bounds tau < 2r between small-arc points, tau <= 2R, tau > 1e-12 r.
 */
inline CheckReport check_reversed_wojtkowski(const LemonTable& t, long long n_samples, std::uint64_t seed) {
    return detail::run_check("reversed_wojtkowski", n_samples, seed, [&](SplitMix64& g) -> std::optional<detail::SampleOutcome> {
        const PhasePoint x = sample_mu(t, g);
        const CollisionEvent e = step_or_throw(t, x);
        const double tau = *e.tau_prev;
        const double d0 = chord_half_length(t, x);
        detail::SampleOutcome o;
        const double slack = d0 + e.d + 1e-12 - tau;
        if (slack < 0.0)
            o.fail("tau > d(x) + d(Fx)", x, tau, d0 + e.d);
        o.margin = slack / std::max(tau, 1e-300);
        if (x.arc == ArcLabel::SmallArc && e.point.arc == ArcLabel::SmallArc)
            o.require(tau < 2.0 * t.r(), "tau >= 2r between small-arc points", x, tau, 2.0 * t.r());
        o.require(tau <= 2.0 * t.R(), "tau > 2R", x, tau, 2.0 * t.R());
        o.require(tau > kMinFreePath, "tau below the free-path floor", x, tau, kMinFreePath);
        return o;
    });
}

/*!
 * Jacobian of the first-return map over the whole window from x in M-hat to
 * its return must map the cone {uv >= 0} into itself.
 */
inline CheckReport check_cone_field(const LemonTable& t, long long n_samples, std::uint64_t seed,
                                    ThresholdVariant variant = ThresholdVariant::Theorem) {
    auto rep = detail::run_check("cone_field", n_samples, seed, [&](SplitMix64& g) -> std::optional<detail::SampleOutcome> {
        const double u = g.uniform();
        const Stratum st = u < 1.0 / 3.0 ? Stratum::Mu : u < 2.0 / 3.0 ? Stratum::Grazing : Stratum::MultiGrazing;
        const std::optional<ReturnSegment> seg = sample_segment(t, g, st);
        if (!seg)
            return std::nullopt;
        const PhasePoint x = seg->start;
        const long long sigma = first_return(t, x).sigma;
        Mat2 w = Mat2::identity();
        PhasePoint cur = x;
        double dcur = chord_half_length(t, cur);
        for (long long k = 0; k < sigma; ++k) {
            const CollisionEvent e = step_or_throw(t, cur);
            w = step_jacobian(*e.tau_prev, dcur, e.d) * w;
            const double sc = w.max_abs();
            w = (1.0 / sc) * w;
            cur = e.point;
            dcur = e.d;
        }
        detail::SampleOutcome o;
        o.count(std::string("stratum_") + to_string(st));
        const Vec2 i1 = w * Vec2{1.0, 0.0};
        const Vec2 i2 = w * Vec2{0.0, 1.0};
        if (cone_maps_into(w)) {
            o.margin = w.min_abs() / w.max_abs();
            if (!(i1.x * i1.y >= 0.0 && i2.x * i2.y >= 0.0))
                o.fail("cone boundary image outside the cone", x, std::min(i1.x * i1.y, i2.x * i2.y), 0.0);
            return o;
        }
        const double tol = default_sign_tol(w);
        const double e[4] = {w.a11, w.a12, w.a21, w.a22};
        const bool near_pos = std::all_of(e, e + 4, [&](double v) { return v >= -tol; });
        const bool near_neg = std::all_of(e, e + 4, [&](double v) { return v <= tol; });
        if (near_pos || near_neg)
            o.marginal = true;
        else
            o.fail("return Jacobian does not preserve the cone", x, w.min_abs(), 0.0);
        return o;
    });
    rep.hypothesis_met = t.R() >= min_radius_threshold(t.phi_star(), variant);
    return rep;
}

struct QuadraticRoots {
    double lambda1 = 0.0; // smaller root
    double lambda2 = 0.0;
};

namespace detail {

inline QuadraticRoots quadratic_roots(double a, double b, double c) {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0)
        throw DomainError("quadratic_roots: complex roots");
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double x1 = q / a, x2 = c / q;
    if (x1 > x2)
        std::swap(x1, x2);
    return {x1, x2};
}

} // namespace detail

inline double E_alpha(double alpha, double lambda) {
    return (-8.0 + 20.0 * alpha - 12.0 * alpha * alpha) * lambda * lambda + (13.0 - 24.0 * alpha) * lambda + 24.0;
}

inline double F_alpha(double alpha, double lambda) {
    const double m = 1.0 - alpha;
    return (4.0 - 36.0 * m * m) * lambda * lambda + (30.0 - 72.0 * alpha) * lambda + 72.0;
}

inline QuadraticRoots e_alpha_roots(double alpha) {
    if (!(alpha > 2.0 / 3.0 && alpha < 1.0))
        throw DomainError("e_alpha_roots: alpha must lie in (2/3, 1)");
    return detail::quadratic_roots(-8.0 + 20.0 * alpha - 12.0 * alpha * alpha, 13.0 - 24.0 * alpha, 24.0);
}

inline QuadraticRoots f_alpha_roots(double alpha) {
    if (!(alpha > 2.0 / 3.0 && alpha < 4.0 / 3.0))
        throw DomainError("f_alpha_roots: alpha must lie in (2/3, 4/3)");
    const double m = 1.0 - alpha;
    return detail::quadratic_roots(4.0 - 36.0 * m * m, 30.0 - 72.0 * alpha, 72.0);
}

struct ProofPolynomialRoots {
    QuadraticRoots E;
    QuadraticRoots F;
};

inline ProofPolynomialRoots proof_polynomials(double alpha) { return {e_alpha_roots(alpha), f_alpha_roots(alpha)}; }

// Tangent dynamics used by lyapunov_exponent.
struct LemonForward {
    const LemonTable& table;

    PhasePoint sample(SplitMix64& g) const { return sample_mu(table, g); }

    std::optional<std::pair<PhasePoint, Mat2>> advance(const PhasePoint& x) const {
        const StepOutcome s = billiard_step(table, x);
        const CollisionEvent* e = next_event(s);
        if (!e)
            return std::nullopt;
        return std::pair{e->point, step_jacobian(*e->tau_prev, chord_half_length(table, x), e->d)};
    }
};

// F^{-1} = I F I, with tangent map S DF(Ix) S, S = diag(1, -1).
struct LemonReverse {
    const LemonTable& table;

    PhasePoint sample(SplitMix64& g) const { return sample_mu(table, g); }

    std::optional<std::pair<PhasePoint, Mat2>> advance(const PhasePoint& x) const {
        const PhasePoint ix = involution(x);
        const StepOutcome s = billiard_step(table, ix);
        const CollisionEvent* e = next_event(s);
        if (!e)
            return std::nullopt;
        const Mat2 j = step_jacobian(*e->tau_prev, chord_half_length(table, ix), e->d);
        return std::pair{involution(e->point), Mat2{j.a11, -j.a12, -j.a21, j.a22}};
    }
};

// Billiard in the full unit disk; integrable, so its exponent is zero.
struct CircleBilliard {
    PhasePoint sample(SplitMix64& g) const { return {ArcLabel::SmallArc, kTwoPi * g.uniform(), sample_theta(g)}; }

    std::optional<std::pair<PhasePoint, Mat2>> advance(const PhasePoint& x) const {
        const double d = kSmallRadius * std::sin(x.theta);
        const double phi = std::fmod(x.phi + 2.0 * x.theta, kTwoPi);
        return std::pair{PhasePoint{x.arc, phi, x.theta}, step_jacobian(2.0 * d, d, d)};
    }
};

/*!
 * chi is the mean over orbits of (1/n) log |D F^n v| for a random unit v.
 * std_err combines the Monte Carlo error of that mean with a finite-time bias
 * estimate |chi_n - chi_{n/2}|.
 */
struct LyapunovEstimate {
    double chi = 0.0;
    double std_err = 0.0; // stderr is a macro in <cstdio>
    double mc_stderr = 0.0;
    double truncation = 0.0;
    long long n_orbits = 0;
    long long n_steps = 0;
    long long discarded = 0;
};

template <class Map>
LyapunovEstimate lyapunov_exponent(const Map& map, long long n_orbits, long long n_steps, std::uint64_t seed) {
    if (n_orbits < 2)
        throw DomainError("lyapunov_exponent: need at least two orbits");
    if (n_steps < 1000)
        throw DomainError("lyapunov_exponent: n_steps must be >= 1000");
    struct OrbitResult {
        double chi = 0.0, chi_half = 0.0;
        long long restarts = 0;
    };
    const std::uint64_t key = mix64(seed ^ detail::fnv1a("lyapunov"));
    const long long half = n_steps / 2;
    auto results = parallel_map<OrbitResult>(static_cast<std::size_t>(n_orbits), [&](std::size_t i) {
        SplitMix64 g(key, i);
        OrbitResult res;
        for (;;) {
            PhasePoint x = map.sample(g);
            const double a = kTwoPi * g.uniform();
            Vec2 v{std::cos(a), std::sin(a)};
            double acc = 0.0, acc_half = 0.0;
            long long k = 0;
            for (; k < n_steps; ++k) {
                const auto next = map.advance(x);
                if (!next)
                    break;
                v = next->second * v;
                const double nv = norm(v);
                acc += std::log(nv);
                v = (1.0 / nv) * v;
                x = next->first;
                if (k + 1 == half)
                    acc_half = acc;
            }
            if (k == n_steps) {
                res.chi = acc / static_cast<double>(n_steps);
                res.chi_half = acc_half / static_cast<double>(half);
                return res;
            }
            if (++res.restarts > 1000)
                throw SingularityError("lyapunov_exponent: orbit restarted more than 1000 times");
        }
    });
    LyapunovEstimate est;
    est.n_orbits = n_orbits;
    est.n_steps = n_steps;
    double sum = 0.0, sum_half = 0.0;
    for (const auto& r : results) {
        sum += r.chi;
        sum_half += r.chi_half;
        est.discarded += r.restarts;
    }
    const double n = static_cast<double>(n_orbits);
    est.chi = sum / n;
    double ss = 0.0;
    for (const auto& r : results)
        ss += (r.chi - est.chi) * (r.chi - est.chi);
    est.mc_stderr = std::sqrt(ss / (n - 1.0) / n);
    est.truncation = std::abs(est.chi - sum_half / n);
    est.std_err = std::hypot(est.mc_stderr, est.truncation);
    return est;
}

inline LyapunovEstimate lyapunov_exponent(const LemonTable& t, long long n_orbits, long long n_steps, std::uint64_t seed) {
    return lyapunov_exponent(LemonForward{t}, n_orbits, n_steps, seed);
}

enum class Stability { Elliptic, Parabolic, Hyperbolic };

inline const char* to_string(Stability s) {
    switch (s) {
    case Stability::Elliptic: return "elliptic";
    case Stability::Parabolic: return "parabolic";
    case Stability::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

struct Period2Result {
    Stability stability = Stability::Parabolic;
    double trace = 0.0;
    Mat2 monodromy;
};

// Linear stability of the 2-orbit along the axis, (pi, pi/2) <-> (0, pi/2).
inline Period2Result period2_stability(const LemonTable& t) {
    const PhasePoint x{ArcLabel::SmallArc, kPi, kPi / 2.0};
    const CollisionEvent e1 = step_or_throw(t, x);
    const CollisionEvent e2 = step_or_throw(t, e1.point);
    Period2Result res;
    res.monodromy = segment_jacobian({{x, std::nullopt, chord_half_length(t, x)}, e1, e2});
    res.trace = res.monodromy.trace();
    const double a = std::abs(res.trace);
    res.stability = a > 2.0 + 1e-9 ? Stability::Hyperbolic : a < 2.0 - 1e-9 ? Stability::Elliptic : Stability::Parabolic;
    return res;
}

struct SweepCell {
    double phi_star = 0.0;
    double R = 0.0;
    double threshold = 0.0;
    bool threshold_met = false;
    long long defocusing_samples = 0;
    long long defocusing_violations = 0;
    long long defocusing_marginal = 0;
    long long cone_violations = 0;
    long long cone_marginal = 0;
    double chi = 0.0;
    double chi_stderr = 0.0;
};

// Seed of one sweep cell; a function of the cell's parameters only.
inline std::uint64_t cell_seed(std::uint64_t seed, double phi_star, double R) {
    std::uint64_t a, b;
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&a, &phi_star, sizeof a);
    std::memcpy(&b, &R, sizeof b);
    return mix64(mix64(seed ^ a) ^ (b * kGolden));
}

inline SweepCell sweep_cell(double phi_star, double R, long long budget, std::uint64_t seed,
                            ThresholdVariant variant = ThresholdVariant::Theorem) {
    if (budget < 1000)
        throw DomainError("sweep: per-cell budget must be >= 1000");
    const LemonTable t = build_table(phi_star, R);
    const std::uint64_t cs = cell_seed(seed, phi_star, R);
    SweepCell c;
    c.phi_star = phi_star;
    c.R = R;
    c.threshold = min_radius_threshold(phi_star, variant);
    c.threshold_met = R >= c.threshold;
    const CheckReport def = check_defocusing(t, budget, cs, variant);
    c.defocusing_samples = def.samples;
    c.defocusing_violations = def.violations;
    c.defocusing_marginal = def.marginal;
    const CheckReport cone = check_cone_field(t, budget, cs, variant);
    c.cone_violations = cone.violations;
    c.cone_marginal = cone.marginal;
    const LyapunovEstimate chi = lyapunov_exponent(t, 10, budget, cs);
    c.chi = chi.chi;
    c.chi_stderr = chi.std_err;
    return c;
}

// Cells in row-major order (phi outer, R inner).
inline std::vector<SweepCell> sweep(const std::vector<double>& phi_grid, const std::vector<double>& R_grid,
                                    long long per_cell_budget, std::uint64_t seed,
                                    ThresholdVariant variant = ThresholdVariant::Theorem) {
    if (phi_grid.empty() || R_grid.empty())
        throw DomainError("sweep: grids must be nonempty");
    std::vector<SweepCell> cells;
    cells.reserve(phi_grid.size() * R_grid.size());
    for (double phi : phi_grid)
        for (double R : R_grid)
            cells.push_back(sweep_cell(phi, R, per_cell_budget, seed, variant));
    return cells;
}

} // namespace lemon
