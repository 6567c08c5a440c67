#pragma once

#include <charconv>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>

#include "spinlattice/error.hpp"
#include "spinlattice/lattice.hpp"
#include "spinlattice/mc.hpp"

namespace spinlattice {

enum class Command { Predict, MeanField, Simulate, Classify, Critical, Oracle, Compare };
enum class MfVariant { Coupled, Uncoupled };

inline std::string_view to_string(Command c) {
    switch (c) {
        case Command::Predict: return "predict";
        case Command::MeanField: return "meanfield";
        case Command::Simulate: return "simulate";
        case Command::Classify: return "classify";
        case Command::Critical: return "critical";
        case Command::Oracle: return "oracle";
        case Command::Compare: return "compare";
    }
    return "unknown";
}

inline Command parse_command(std::string_view name) {
    for (Command c : {Command::Predict, Command::MeanField, Command::Simulate, Command::Classify, Command::Critical,
                      Command::Oracle, Command::Compare}) {
        if (to_string(c) == name) return c;
    }
    throw Error(ErrorCode::ParseError, "unknown command '" + std::string(name) + "'");
}

struct RunConfig {
    Command command = Command::Predict;
    LatticeSpec lattice{LatticeKind::Square, 100, 100, Boundary::Periodic};
    CouplingSet couplings;
    double t_min = 10.0;
    double t_max = 500.0;
    std::size_t points = 50;
    ChainParams mc_params;
    bool gated = true;
    MfVariant mf_system = MfVariant::Coupled;
    std::string output_path;

    /// Throws ValidationError naming the first violated invariant.
    void validate() const {
        auto fail = [](const std::string& what) { throw Error(ErrorCode::ValidationError, what); };
        if (!(t_min > 0.0)) fail("t_min > 0");
        if (!(t_min < t_max)) fail("t_min < t_max");
        if (points < 2) fail("points >= 2");
        if (mc_params.sample_sweeps < 1) fail("samples >= 1");
        try {
            lattice.validate();
            couplings.validate_for(lattice.kind);
        } catch (const Error& e) {
            fail(e.what());
        }
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

inline double parse_double(std::string_view v, std::size_t line, std::string_view key) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        parse_fail(line, "'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
    }
    return out;
}

inline std::uint64_t parse_unsigned(std::string_view v, std::size_t line, std::string_view key) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        parse_fail(line, "'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

inline bool parse_bool(std::string_view v, std::size_t line, std::string_view key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    parse_fail(line, "'" + std::string(key) + "' expects true or false, got '" + std::string(v) + "'");
}

}  // namespace detail

/**
 * Parses a key=value document ('#' starts a comment).
 *
 * Omitted keys keep the RunConfig defaults; a chain without an explicit height
 * gets height 1. Unknown or repeated keys are parse errors.
 */
inline RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string, std::less<>> seen;
    bool height_given = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) detail::parse_fail(line_no, "expected key=value");
        const std::string_view key = detail::trim(line.substr(0, eq));
        const std::string_view val = detail::trim(line.substr(eq + 1));
        if (!seen.insert(std::string(key)).second) detail::parse_fail(line_no, "duplicate key '" + std::string(key) + "'");

        auto num = [&] { return detail::parse_double(val, line_no, key); };
        auto count = [&] { return static_cast<std::size_t>(detail::parse_unsigned(val, line_no, key)); };
        if (key == "lattice") {
            if (val == "chain") cfg.lattice.kind = LatticeKind::Chain;
            else if (val == "square") cfg.lattice.kind = LatticeKind::Square;
            else if (val == "triangular") cfg.lattice.kind = LatticeKind::Triangular;
            else if (val == "union_jack") cfg.lattice.kind = LatticeKind::UnionJack;
            else detail::parse_fail(line_no, "unknown lattice '" + std::string(val) + "'");
        } else if (key == "width") {
            cfg.lattice.width = count();
        } else if (key == "height") {
            cfg.lattice.height = count();
            height_given = true;
        } else if (key == "j1") {
            cfg.couplings.j1 = num();
        } else if (key == "j2") {
            cfg.couplings.j2 = num();
        } else if (key == "j3") {
            cfg.couplings.j3 = num();
        } else if (key == "j4") {
            cfg.couplings.j4 = num();
        } else if (key == "j_diag") {
            cfg.couplings.j_diag = num();
        } else if (key == "j_diag_prime") {
            cfg.couplings.j_diag_prime = num();
        } else if (key == "j_triplet") {
            cfg.couplings.j_triplet = num();
        } else if (key == "field_b") {
            cfg.couplings.field_b = num();
        } else if (key == "t_min") {
            cfg.t_min = num();
        } else if (key == "t_max") {
            cfg.t_max = num();
        } else if (key == "points") {
            cfg.points = count();
        } else if (key == "burn_in") {
            cfg.mc_params.burn_in_sweeps = count();
        } else if (key == "samples") {
            cfg.mc_params.sample_sweeps = count();
        } else if (key == "seed") {
            cfg.mc_params.seed = detail::parse_unsigned(val, line_no, key);
        } else if (key == "init") {
            if (val == "all_up") cfg.mc_params.init = InitState::AllUp;
            else if (val == "random") cfg.mc_params.init = InitState::Random;
            else detail::parse_fail(line_no, "init expects all_up or random");
        } else if (key == "gated") {
            cfg.gated = detail::parse_bool(val, line_no, key);
        } else if (key == "mf_system") {
            if (val == "coupled") cfg.mf_system = MfVariant::Coupled;
            else if (val == "uncoupled") cfg.mf_system = MfVariant::Uncoupled;
            else detail::parse_fail(line_no, "mf_system expects coupled or uncoupled");
        } else {
            detail::parse_fail(line_no, "unknown key '" + std::string(key) + "'");
        }
    }
    if (cfg.lattice.kind == LatticeKind::Chain && !height_given) cfg.lattice.height = 1;
    cfg.validate();
    return cfg;
}

}  // namespace spinlattice
