// Command-line front end: table, orbit, verify, lyapunov, sweep, portrait.
//
// Exit status: 0 on success, 1 on configuration errors, 2 when a check whose
// hypothesis holds reports a non-marginal violation.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "lemon/lemon.hpp"

namespace lemon::cli {
namespace {

// stdout, or the configured output file.
class Output {
  public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-")
            return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_)
            throw ConfigError("cannot open output file '" + path + "'");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

LemonTable require_table(const RunConfig& cfg) {
    if (!cfg.phi_star || !cfg.R)
        throw ConfigError("phi_star and R are required for this command");
    try {
        return build_table(*cfg.phi_star, *cfg.R);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string threshold_text(double phi_star, ThresholdVariant v) {
    if (!(phi_star < kPi / 2.0))
        return "inf";
    return fmt17(min_radius_threshold(phi_star, v));
}

int run_table(const RunConfig& cfg) {
    const LemonTable t = require_table(cfg);
    Output out(cfg.output_path);
    std::ostream& os = out.stream();
    const double thr = t.phi_star() < kPi / 2.0 ? min_radius_threshold(t.phi_star(), cfg.threshold_variant) : kInf;
    os << "phi_star = " << fmt17(t.phi_star()) << '\n'
       << "R = " << fmt17(t.R()) << '\n'
       << "b = " << fmt17(t.b()) << '\n'
       << "Phi_star = " << fmt17(t.Phi_star()) << '\n'
       << "delta_star = " << fmt17(t.delta_star()) << '\n'
       << "Psi_R = " << fmt17(t.Psi_R()) << '\n'
       << "R_threshold_theorem = " << threshold_text(t.phi_star(), ThresholdVariant::Theorem) << '\n'
       << "R_threshold_collected = " << threshold_text(t.phi_star(), ThresholdVariant::Collected) << '\n'
       << "threshold_variant = " << to_string(cfg.threshold_variant) << '\n'
       << "hyperbolicity_guaranteed = " << (t.R() >= thr ? "PASS" : "FAIL") << '\n';
    return 0;
}

PhasePoint start_point(const RunConfig& cfg, const LemonTable& t) {
    if (cfg.phi.has_value() != cfg.theta.has_value())
        throw ConfigError("orbit start needs both phi and theta");
    if (cfg.phi) {
        const PhasePoint x{cfg.arc, *cfg.phi, *cfg.theta};
        if (!is_valid(t, x))
            throw ConfigError("orbit start is not a valid phase point");
        return x;
    }
    SplitMix64 g(cfg.seed, 0);
    return sample_mu(t, g);
}

int run_orbit(const RunConfig& cfg) {
    const LemonTable t = require_table(cfg);
    const Orbit o = orbit(t, start_point(cfg, t), cfg.steps.value_or(1000));
    Output out(cfg.output_path);
    write_orbit_csv(out.stream(), o.events);
    if (o.truncation != Truncation::None)
        std::cerr << "orbit truncated after " << o.events.size() - 1 << " steps: " << to_string(o.truncation) << '\n';
    return 0;
}

int run_verify(const RunConfig& cfg) {
    const LemonTable t = require_table(cfg);
    const long long n = cfg.samples;
    const std::uint64_t seed = cfg.seed;
    const ThresholdVariant v = cfg.threshold_variant;
    using CheckFn = std::function<CheckReport()>;
    const std::vector<CheckFn> checks{
        [&] { return check_uv_separation(t, t.delta_star(), n, seed); },
        [&] { return check_near_tangency(t, n, seed); },
        [&] { return check_subsegment(t, n, seed); },
        [&] { return check_defocusing(t, n, seed, v); },
        [&] { return check_section5_bounds(t, n, seed); },
        [&] { return check_segment_bands(t, n, seed); },
        [&] { return check_reversed_wojtkowski(t, n, seed); },
        [&] { return check_cone_field(t, n, seed, v); },
    };
    nlohmann::ordered_json reports = nlohmann::ordered_json::array();
    bool hard_failure = false;
    for (const CheckFn& check : checks) {
        const auto t0 = std::chrono::steady_clock::now();
        const CheckReport rep = check();
        reports.push_back(to_json(rep, t, seed, elapsed_ms(t0)));
        hard_failure = hard_failure || rep.hard_failure();
        std::cerr << rep.name << ": samples=" << rep.samples << " violations=" << rep.violations
                  << " marginal=" << rep.marginal << (rep.hypothesis_met ? "" : " (hypothesis not met)")
                  << (rep.aborted ? " ABORTED: " + rep.diagnostic : std::string()) << '\n';
    }
    Output out(cfg.output_path);
    out.stream() << reports.dump(2) << '\n';
    return hard_failure ? 2 : 0;
}

int run_lyapunov(const RunConfig& cfg) {
    const LemonTable t = require_table(cfg);
    const long long steps = cfg.steps.value_or(100000);
    if (steps < 1000)
        throw ConfigError("lyapunov needs steps >= 1000");
    if (cfg.orbits < 2)
        throw ConfigError("lyapunov needs orbits >= 2");
    const auto t0 = std::chrono::steady_clock::now();
    const LyapunovEstimate est = lyapunov_exponent(t, cfg.orbits, steps, cfg.seed);
    nlohmann::ordered_json j;
    j["chi"] = est.chi;
    j["stderr"] = est.std_err;
    j["mc_stderr"] = est.mc_stderr;
    j["truncation"] = est.truncation;
    j["n_orbits"] = est.n_orbits;
    j["n_steps"] = est.n_steps;
    j["discarded"] = est.discarded;
    j["table"] = {{"phi_star", t.phi_star()}, {"R", t.R()}, {"b", t.b()}};
    j["seed"] = cfg.seed;
    j["runtime_ms"] = elapsed_ms(t0);
    Output out(cfg.output_path);
    out.stream() << j.dump(2) << '\n';
    return 0;
}

int run_sweep(const RunConfig& cfg) {
    if (cfg.phi_grid.empty() || cfg.R_grid.empty())
        throw ConfigError("sweep needs phi_grid and R_grid");
    if (cfg.samples < 1000)
        throw ConfigError("sweep needs samples >= 1000 per cell");
    for (double phi : cfg.phi_grid)
        if (!(phi > 0.0 && phi < kPi / 2.0))
            throw ConfigError("sweep: every phi_star must lie in (0, pi/2)");
    for (double R : cfg.R_grid)
        if (!(R > kSmallRadius))
            throw ConfigError("sweep: every R must exceed r");
    Output out(cfg.output_path);
    std::ostream& os = out.stream();
    write_sweep_csv_header(os);
    bool hard_failure = false;
    for (double phi : cfg.phi_grid)
        for (double R : cfg.R_grid) {
            const SweepCell c = sweep_cell(phi, R, cfg.samples, cfg.seed, cfg.threshold_variant);
            write_sweep_csv_row(os, c);
            hard_failure = hard_failure || (c.threshold_met && (c.defocusing_violations > 0 || c.cone_violations > 0));
        }
    return hard_failure ? 2 : 0;
}

int run_portrait(const RunConfig& cfg) {
    const LemonTable t = require_table(cfg);
    const long long steps = cfg.steps.value_or(10000);
    const long long n_orbits = cfg.orbits;
    auto clouds = parallel_map<Orbit>(static_cast<std::size_t>(n_orbits), [&](std::size_t i) {
        SplitMix64 g(cfg.seed, i);
        return orbit(t, sample_mu(t, g), steps);
    });
    Output out(cfg.output_path);
    std::ostream& os = out.stream();
    os << "orbit,arc,phi,theta\n";
    for (std::size_t i = 0; i < clouds.size(); ++i)
        for (const CollisionEvent& e : clouds[i].events)
            os << i << ',' << to_string(e.point.arc) << ',' << fmt17(e.point.phi) << ',' << fmt17(e.point.theta) << '\n';
    return 0;
}

int run(const RunConfig& cfg) {
    if (!cfg.command)
        throw ConfigError("no command given (table, orbit, verify, lyapunov, sweep, portrait)");
    switch (*cfg.command) {
    case Command::Table: return run_table(cfg);
    case Command::Orbit: return run_orbit(cfg);
    case Command::Verify: return run_verify(cfg);
    case Command::Lyapunov: return run_lyapunov(cfg);
    case Command::Sweep: return run_sweep(cfg);
    case Command::Portrait: return run_portrait(cfg);
    }
    return 1;
}

} // namespace
} // namespace lemon::cli

int main(int argc, char** argv) {
    try {
        return lemon::cli::run(lemon::cli::parse_config(argc, argv));
    } catch (const lemon::cli::HelpRequested& h) {
        std::cout << h.what();
        return 0;
    } catch (const lemon::cli::ConfigError& e) {
        std::cerr << "lemon: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "lemon: " << e.what() << '\n';
        return 1;
    }
}
