#pragma once

#include <cmath>
#include <cstdint>

#include "lemon/geometry.hpp"
#include "lemon/phase.hpp"

namespace lemon {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/*!
 * Counter-based SplitMix64 stream. Stream (seed, index) is independent of
 * every other index, so samples can be drawn in any order or in parallel.
 */
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed, std::uint64_t index = 0)
        : state_(mix64(seed + kGolden) ^ mix64(index * kGolden + 0x632be59bd9b4e019ULL)) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // Uniform in (0, 1).
    double open_uniform() { return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52; }

  private:
    std::uint64_t state_;
};

// Theta with density proportional to sin(theta) on (0, pi).
inline double sample_theta(SplitMix64& g) { return std::acos(1.0 - 2.0 * g.open_uniform()); }

// Theta with density proportional to sin(theta) on (0, theta_max).
inline double sample_theta_below(SplitMix64& g, double theta_max) {
    return 2.0 * std::asin(std::sqrt(g.open_uniform()) * std::sin(0.5 * theta_max));
}

inline PhasePoint sample_mu_small(const LemonTable& t, SplitMix64& g) {
    const double phi = t.phi_star() + g.uniform() * (kTwoPi - 2.0 * t.phi_star());
    return {ArcLabel::SmallArc, phi, sample_theta(g)};
}

inline PhasePoint sample_mu_big(const LemonTable& t, SplitMix64& g) {
    const double phi = (2.0 * g.open_uniform() - 1.0) * t.Phi_star();
    return {ArcLabel::BigArc, phi, sample_theta(g)};
}

// mu = rho sin(theta) dphi dtheta normalized on the whole phase space.
inline PhasePoint sample_mu(const LemonTable& t, SplitMix64& g) {
    const double small_len = t.r() * (kTwoPi - 2.0 * t.phi_star());
    const double big_len = t.R() * 2.0 * t.Phi_star();
    return g.uniform() * (small_len + big_len) < small_len ? sample_mu_small(t, g) : sample_mu_big(t, g);
}

// mu on the big arc conditioned on theta < theta_max or theta > pi - theta_max.
inline PhasePoint sample_mu_big_grazing(const LemonTable& t, SplitMix64& g, double theta_max) {
    const double phi = (2.0 * g.open_uniform() - 1.0) * t.Phi_star();
    double theta = sample_theta_below(g, theta_max);
    if (g.uniform() < 0.5)
        theta = kPi - theta;
    return {ArcLabel::BigArc, phi, theta};
}

} // namespace lemon
