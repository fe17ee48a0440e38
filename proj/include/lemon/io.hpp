#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lemon/dynamics.hpp"
#include "lemon/returnmap.hpp"
#include "lemon/verify.hpp"

namespace lemon {

// 17 significant digits; round-trips every double.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_orbit_csv(std::ostream& os, const std::vector<CollisionEvent>& events) {
    os << "step,arc,phi,theta,tau_prev,d\n";
    for (std::size_t i = 0; i < events.size(); ++i) {
        const CollisionEvent& e = events[i];
        os << i << ',' << to_string(e.point.arc) << ',' << fmt17(e.point.phi) << ',' << fmt17(e.point.theta) << ','
           << (e.tau_prev ? fmt17(*e.tau_prev) : std::string()) << ',' << fmt17(e.d) << '\n';
    }
}

inline void write_segment_csv_header(std::ostream& os) {
    os << "n0,n1,phi0,theta0,phi1,theta1,phi2,theta2,tau0,tau1,d0,d1,d2,case,G11,G12,G21,G22\n";
}

// G is left empty when the extension is invalid; for transverse segments it is still G, not D.
inline void write_segment_csv_row(std::ostream& os, const LemonTable& t, const ReturnSegment& s) {
    os << s.n0 << ',' << s.n1 << ',' << fmt17(s.x0.phi) << ',' << fmt17(s.x0.theta) << ',' << fmt17(s.x1.phi) << ','
       << fmt17(s.x1.theta) << ',' << fmt17(s.x2.phi) << ',' << fmt17(s.x2.theta) << ',' << fmt17(s.tau0) << ','
       << fmt17(s.tau1) << ',' << fmt17(s.d0) << ',' << fmt17(s.d1) << ',' << fmt17(s.d2) << ','
       << to_string(segment_case(t, s));
    if (extension_valid(s)) {
        const Mat2 g = G_matrix(s);
        os << ',' << fmt17(g.a11) << ',' << fmt17(g.a12) << ',' << fmt17(g.a21) << ',' << fmt17(g.a22) << '\n';
    } else {
        os << ",,,,\n";
    }
}

inline nlohmann::ordered_json to_json(const PhasePoint& x) {
    return {{"arc", to_string(x.arc)}, {"phi", x.phi}, {"theta", x.theta}};
}

inline nlohmann::ordered_json to_json(const CheckReport& rep, const LemonTable& t, std::uint64_t seed, double runtime_ms) {
    nlohmann::ordered_json j;
    j["check"] = rep.name;
    j["samples"] = rep.samples;
    j["violations"] = rep.violations;
    j["marginal"] = rep.marginal;
    j["worst_margin"] = std::isfinite(rep.worst_margin) ? nlohmann::ordered_json(rep.worst_margin) : nullptr;
    j["table"] = {{"phi_star", t.phi_star()}, {"R", t.R()}, {"b", t.b()}};
    j["seed"] = seed;
    j["runtime_ms"] = runtime_ms;
    j["hypothesis_met"] = rep.hypothesis_met;
    j["singular"] = rep.singular;
    j["aborted"] = rep.aborted;
    if (!rep.diagnostic.empty())
        j["diagnostic"] = rep.diagnostic;
    j["counters"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rep.counters)
        j["counters"][k] = v;
    j["details"] = nlohmann::ordered_json::array();
    for (const Violation& v : rep.details)
        j["details"].push_back({{"what", v.what}, {"point", to_json(v.point)}, {"value", v.value}, {"bound", v.bound}});
    return j;
}

inline void write_sweep_csv_header(std::ostream& os) {
    os << "phi_star,R,threshold,threshold_met,defocusing_samples,defocusing_violations,defocusing_marginal,"
          "cone_violations,cone_marginal,chi,chi_stderr\n";
}

inline void write_sweep_csv_row(std::ostream& os, const SweepCell& c) {
    os << fmt17(c.phi_star) << ',' << fmt17(c.R) << ',' << fmt17(c.threshold) << ',' << (c.threshold_met ? 1 : 0) << ','
       << c.defocusing_samples << ',' << c.defocusing_violations << ',' << c.defocusing_marginal << ','
       << c.cone_violations << ',' << c.cone_marginal << ',' << fmt17(c.chi) << ',' << fmt17(c.chi_stderr) << '\n';
}

} // namespace lemon
