#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lemon/geometry.hpp"

namespace lemon::cli {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class HelpRequested : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Command { Table, Orbit, Verify, Lyapunov, Sweep, Portrait };

struct RunConfig {
    std::optional<Command> command;
    std::optional<double> phi_star;
    std::optional<double> R;
    std::uint64_t seed = 0;
    long long samples = 10000;
    long long orbits = 100;
    std::optional<long long> steps;
    std::string output_path;
    ThresholdVariant threshold_variant = ThresholdVariant::Theorem;
    std::vector<double> phi_grid;
    std::vector<double> R_grid;
    // Start point for orbit; drawn from mu when phi/theta are absent.
    ArcLabel arc = ArcLabel::SmallArc;
    std::optional<double> phi;
    std::optional<double> theta;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw std::invalid_argument("not a number");
    return out;
}

inline long long parse_count(const std::string& v) {
    long long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw std::invalid_argument("not an integer");
    if (out <= 0)
        throw std::invalid_argument("must be positive");
    return out;
}

inline std::uint64_t parse_seed(const std::string& v) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw std::invalid_argument("not an unsigned 64-bit integer");
    return out;
}

inline std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(trim(item)));
    if (out.empty())
        throw std::invalid_argument("empty list");
    return out;
}

inline Command parse_command(const std::string& v) {
    static const std::map<std::string, Command> names{{"table", Command::Table},       {"orbit", Command::Orbit},
                                                      {"verify", Command::Verify},     {"lyapunov", Command::Lyapunov},
                                                      {"sweep", Command::Sweep},       {"portrait", Command::Portrait}};
    const auto it = names.find(v);
    if (it == names.end())
        throw std::invalid_argument("unknown command");
    return it->second;
}

inline ThresholdVariant parse_variant(const std::string& v) {
    if (v == "theorem")
        return ThresholdVariant::Theorem;
    if (v == "collected")
        return ThresholdVariant::Collected;
    throw std::invalid_argument("expected 'theorem' or 'collected'");
}

inline ArcLabel parse_arc(const std::string& v) {
    if (v == "small" || v == "SmallArc")
        return ArcLabel::SmallArc;
    if (v == "big" || v == "BigArc")
        return ArcLabel::BigArc;
    throw std::invalid_argument("expected 'small' or 'big'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

// Keys accepted in config files; command-line flags use the same names with '-' for '_'.
inline const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> s{
        {"command", [](RunConfig& c, const std::string& v) { c.command = parse_command(v); }},
        {"phi_star", [](RunConfig& c, const std::string& v) { c.phi_star = parse_double(v); }},
        {"R", [](RunConfig& c, const std::string& v) { c.R = parse_double(v); }},
        {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_seed(v); }},
        {"samples", [](RunConfig& c, const std::string& v) { c.samples = parse_count(v); }},
        {"orbits", [](RunConfig& c, const std::string& v) { c.orbits = parse_count(v); }},
        {"steps", [](RunConfig& c, const std::string& v) { c.steps = parse_count(v); }},
        {"output", [](RunConfig& c, const std::string& v) { c.output_path = v; }},
        {"threshold_variant", [](RunConfig& c, const std::string& v) { c.threshold_variant = parse_variant(v); }},
        {"phi_grid", [](RunConfig& c, const std::string& v) { c.phi_grid = parse_list(v); }},
        {"R_grid", [](RunConfig& c, const std::string& v) { c.R_grid = parse_list(v); }},
        {"arc", [](RunConfig& c, const std::string& v) { c.arc = parse_arc(v); }},
        {"phi", [](RunConfig& c, const std::string& v) { c.phi = parse_double(v); }},
        {"theta", [](RunConfig& c, const std::string& v) { c.theta = parse_double(v); }},
    };
    return s;
}

inline void apply(RunConfig& c, const std::string& key, const std::string& value, const std::string& where) {
    const auto& s = setters();
    const auto it = s.find(key);
    if (it == s.end())
        throw ConfigError(where + "unknown key '" + key + "'");
    try {
        it->second(c, value);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + "invalid value for " + key + ": '" + value + "' (" + e.what() + ")");
    }
}

} // namespace detail

/*!
 * Applies "key = value" lines to base. Blank lines and lines starting with
 * '#' are skipped. name labels error messages.
 */
inline RunConfig parse_config_text(const std::string& text, RunConfig base = {}, const std::string& name = "config") {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = name + ":" + std::to_string(lineno) + ": ";
        const std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#')
            continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + "expected 'key = value'");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (key.empty())
            throw ConfigError(where + "missing key");
        detail::apply(base, key, value, where);
    }
    return base;
}

inline RunConfig parse_config_file(const std::string& path, RunConfig base = {}) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), std::move(base), path);
}

/*!
 * Command-line parsing: [command] [--config FILE] [--key value ...]. Values
 * from the file are applied first, flags override them. Flag names are the
 * config keys with '-' in place of '_'.
 */
inline RunConfig parse_config(int argc, const char* const* argv) {
    CLI::App app{"Asymmetric lemon billiard simulator and verifier", "lemon"};
    std::string command, file;
    app.add_option("command", command, "table | orbit | verify | lyapunov | sweep | portrait");
    app.add_option("--config", file, "key = value configuration file");
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> opts;
    std::vector<std::string> flags;
    for (const auto& [key, setter] : detail::setters()) {
        if (key == "command")
            continue;
        std::string flag = key;
        for (char& ch : flag)
            if (ch == '_')
                ch = '-';
        opts.emplace_back(key, app.add_option("--" + flag, values[key]));
        flags.push_back("--" + flag);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    RunConfig cfg;
    if (!file.empty())
        cfg = parse_config_file(file, cfg);
    if (!command.empty())
        detail::apply(cfg, "command", command, "");
    for (std::size_t i = 0; i < opts.size(); ++i)
        if (opts[i].second->count() > 0)
            detail::apply(cfg, opts[i].first, values[opts[i].first], flags[i] + ": ");
    return cfg;
}

} // namespace lemon::cli
