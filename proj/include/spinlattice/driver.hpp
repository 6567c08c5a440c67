#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinlattice/config.hpp"
#include "spinlattice/csv.hpp"
#include "spinlattice/error.hpp"
#include "spinlattice/exact.hpp"
#include "spinlattice/lattice.hpp"
#include "spinlattice/mc.hpp"
#include "spinlattice/meanfield.hpp"
#include "spinlattice/record.hpp"

namespace spinlattice {

inline constexpr std::string_view kVersion = "1.0.0";

struct ExecResult {
    int exit_code = 0;
    std::vector<SweepRecord> records;
    CriticalSet critical;
    std::string message;  // classification label or error text
};

namespace detail {

inline void require_kind(const RunConfig& cfg, LatticeKind kind, std::string_view command) {
    if (cfg.lattice.kind != kind) {
        throw Error(ErrorCode::ValidationError, std::string(command) + " needs lattice=" + std::string(to_string(kind)));
    }
}

inline std::vector<std::string> prediction_flags(const Prediction& p) {
    std::vector<std::string> f;
    if (p.ungated) f.emplace_back("Ungated");
    if (p.gate_failed) f.emplace_back("GateFailed");
    if (p.out_of_range) f.emplace_back("OutOfRange");
    if (p.branch_failure) f.emplace_back("BranchFailure");
    return f;
}

inline SweepRecord closed_form_record(const RunConfig& cfg, double t) {
    const CouplingSet& c = cfg.couplings;
    SweepRecord r;
    r.temp = t;
    r.engine = Engine::Exact;
    auto uniform = [&r](double m) { r.m_sigma = r.m_tau = r.m_mean = r.m_all = m; };
    switch (cfg.lattice.kind) {
        case LatticeKind::Chain:
            uniform(chain_magnetisation(c.j1, c.field_b, t));
            break;
        case LatticeKind::Square:
            require_zero_field(c);
            uniform(triangular_magnetisation(c.j1, c.j2, 0.0, t));
            break;
        case LatticeKind::Triangular:
            require_zero_field(c);
            if (c.j_triplet != 0.0) throw Error(ErrorCode::ValidationError, "closed forms need j_triplet = 0");
            uniform(triangular_magnetisation(c.j1, c.j2, c.j_diag, t));
            break;
        case LatticeKind::UnionJack: {
            const Gating g = cfg.gated ? Gating::Gated : Gating::Ungated;
            const Prediction s = uj_sigma_prediction(c, t, g);
            const Prediction tau = uj_tau_magnetisation(c, t, g);
            Prediction both = s;
            both.merge_flags(tau);
            r.m_sigma = s.value;
            r.m_tau = tau.value;
            r.m_mean = 0.5 * (s.value + tau.value);
            r.m_all = r.m_mean;
            r.flags = prediction_flags(both);
            break;
        }
    }
    return r;
}

inline SweepRecord enumeration_record(const Lattice& lattice, const CouplingSet& c, double t) {
    const ExactAverages a = exact_enumeration(lattice, c, t);
    SweepRecord r;
    r.temp = t;
    r.engine = Engine::Exact;
    r.m_sigma = a.m_sigma;
    r.m_tau = a.m_tau;
    r.m_mean = 0.5 * (a.m_sigma + a.m_tau);
    r.m_all = a.m_all;
    r.abs_m_all = a.abs_m_all;
    r.energy_per_site = a.energy_per_site;
    r.flags.emplace_back("Enumeration");
    return r;
}

inline std::vector<SweepRecord> mc_records(const RunConfig& cfg, const Lattice& lattice, const std::vector<double>& grid,
                                           std::size_t threads) {
    const auto scan = temperature_scan(lattice, cfg.couplings, grid, cfg.mc_params, threads);
    std::vector<SweepRecord> out;
    for (const auto& [t, res] : scan) {
        SweepRecord r;
        r.temp = t;
        r.engine = Engine::Mc;
        r.m_sigma = res.m_sigma.mean;
        r.m_tau = res.m_tau.mean;
        r.m_mean = 0.5 * (res.m_sigma.mean + res.m_tau.mean);
        r.m_all = res.m_all.mean;
        r.abs_m_all = res.abs_m_all.mean;
        r.energy_per_site = res.energy_per_site.mean;
        r.std_error = res.abs_m_all.error;
        out.push_back(std::move(r));
    }
    return out;
}

/// The mean-field system matching an isotropic configuration.
inline MfSystem mf_system_for(const RunConfig& cfg) {
    const CouplingSet& c = cfg.couplings;
    auto need = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::ValidationError, std::string("meanfield needs ") + what);
    };
    switch (cfg.lattice.kind) {
        case LatticeKind::Chain: return MfSystem::triangular(c.j1, 1, c.field_b);
        case LatticeKind::Square:
            need(c.j1 == c.j2, "j1 = j2");
            return MfSystem::triangular(c.j1, 2, c.field_b);
        case LatticeKind::Triangular:
            need(c.j1 == c.j2 && c.j2 == c.j_diag, "j1 = j2 = j_diag");
            need(c.j_triplet == 0.0, "j_triplet = 0");
            return MfSystem::triangular(c.j1, 3, c.field_b);
        case LatticeKind::UnionJack:
            need(c.j1 == c.j2 && c.j2 == c.j3 && c.j3 == c.j4, "j1 = j2 = j3 = j4");
            need(c.j_diag == c.j_diag_prime, "j_diag = j_diag_prime");
            return cfg.mf_system == MfVariant::Coupled ? MfSystem::uj_coupled(c.j1, c.j_diag, c.field_b)
                                                       : MfSystem::uj_uncoupled(c.j1, c.j_diag, c.field_b);
    }
    return {};
}

inline std::string format_critical(const CriticalSet& set) {
    std::string out = "temp_K,kind,gamma_index\n";
    for (const auto& p : set.points) {
        out += format_number(p.temp) + "," + std::string(to_string(p.kind)) + ",";
        if (p.gamma_index > 0) out += std::to_string(p.gamma_index);
        out += '\n';
    }
    return out;
}

inline nlohmann::json metadata(const RunConfig& cfg) {
    const CouplingSet& c = cfg.couplings;
    return {
        {"command", to_string(cfg.command)},
        {"version", kVersion},
        {"lattice", {{"kind", to_string(cfg.lattice.kind)}, {"width", cfg.lattice.width}, {"height", cfg.lattice.height}}},
        {"couplings",
         {{"j1", c.j1}, {"j2", c.j2}, {"j3", c.j3}, {"j4", c.j4}, {"j_diag", c.j_diag}, {"j_diag_prime", c.j_diag_prime},
          {"j_triplet", c.j_triplet}, {"field_b", c.field_b}}},
        {"t_min", cfg.t_min},
        {"t_max", cfg.t_max},
        {"points", cfg.points},
        {"gated", cfg.gated},
        {"mf_system", cfg.mf_system == MfVariant::Coupled ? "coupled" : "uncoupled"},
        {"mc",
         {{"burn_in", cfg.mc_params.burn_in_sweeps},
          {"samples", cfg.mc_params.sample_sweeps},
          {"init", cfg.mc_params.init == InitState::AllUp ? "all_up" : "random"},
          {"seed", cfg.mc_params.seed}}},
    };
}

inline ExecResult run_command(const RunConfig& cfg, std::size_t threads) {
    ExecResult res;
    const auto grid = temperature_grid(cfg.t_min, cfg.t_max, cfg.points);
    switch (cfg.command) {
        case Command::Predict:
            for (double t : grid) res.records.push_back(closed_form_record(cfg, t));
            break;
        case Command::MeanField:
            res.records = mf_sweep(mf_system_for(cfg), cfg.t_min, cfg.t_max, cfg.points);
            break;
        case Command::Simulate: {
            const Lattice lattice(cfg.lattice);
            res.records = mc_records(cfg, lattice, grid, threads);
            break;
        }
        case Command::Oracle: {
            const Lattice lattice(cfg.lattice);
            for (double t : grid) res.records.push_back(enumeration_record(lattice, cfg.couplings, t));
            break;
        }
        case Command::Compare: {
            const Lattice lattice(cfg.lattice);
            const bool enumerate = lattice.site_count() <= kMaxEnumerationSites;
            std::vector<SweepRecord> reference;
            for (double t : grid) {
                SweepRecord r = enumerate ? enumeration_record(lattice, cfg.couplings, t) : closed_form_record(cfg, t);
                if (!enumerate) r.flags.emplace_back("ClosedForm");
                reference.push_back(std::move(r));
            }
            auto mc = mc_records(cfg, lattice, grid, threads);
            for (std::size_t i = 0; i < mc.size(); ++i) {
                // enumeration gives <|m|> directly; the closed forms give the spontaneous |M|
                const double ref = enumerate ? *reference[i].abs_m_all : std::fabs(*reference[i].m_all);
                mc[i].deviation = *mc[i].abs_m_all - ref;
            }
            res.records = std::move(reference);
            res.records.insert(res.records.end(), mc.begin(), mc.end());
            break;
        }
        case Command::Classify:
            require_kind(cfg, LatticeKind::UnionJack, "classify");
            res.message = std::string(to_string(classify_phase(cfg.couplings)));
            break;
        case Command::Critical: {
            require_kind(cfg, LatticeKind::UnionJack, "critical");
            const CouplingSet& c = cfg.couplings;
            res.critical = uj_critical_temperatures(c, cfg.t_min, cfg.t_max);
            const bool symmetric = c.j1 == c.j2 && c.j2 == c.j3 && c.j3 == c.j4 && c.j_diag == c.j_diag_prime;
            if (symmetric) {
                const auto vaks = vaks_critical_temperatures(c.j1, c.j_diag, cfg.t_min, cfg.t_max);
                res.critical.points.insert(res.critical.points.end(), vaks.points.begin(), vaks.points.end());
                res.critical.sort();
            }
            break;
        }
    }
    return res;
}

}  // namespace detail

/**
 * Runs one configured command.
 *
 * With an output path the CSV and `<out>.meta.json` are written atomically;
 * without one the CSV goes to `out`. Errors become a nonzero exit code and,
 * when a path is known, an error record in the sidecar.
 */
inline ExecResult execute(const RunConfig& cfg, std::ostream& out, std::size_t threads = 0) {
    const auto started = std::chrono::steady_clock::now();
    ExecResult res;
    nlohmann::json meta = detail::metadata(cfg);
    try {
        cfg.validate();
        res = detail::run_command(cfg, threads);
        std::string body;
        if (cfg.command == Command::Classify) {
            out << res.message << '\n';
        } else if (cfg.command == Command::Critical) {
            body = detail::format_critical(res.critical);
        } else {
            body = format_csv(res.records);
        }
        if (!body.empty()) {
            if (cfg.output_path.empty()) {
                out << body;
            } else {
                write_file_atomic(cfg.output_path, body);
            }
        }
        meta["status"] = "ok";
        meta["error"] = nullptr;
        if (cfg.command == Command::Classify) meta["label"] = res.message;
    } catch (const Error& e) {
        res.exit_code = 1;
        res.message = e.what();
        meta["status"] = "error";
        meta["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    }
    meta["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!cfg.output_path.empty()) {
        try {
            write_file_atomic(cfg.output_path + ".meta.json", meta.dump(2) + "\n");
        } catch (const Error& e) {
            res.exit_code = 1;
            res.message = e.what();
        }
    }
    return res;
}

}  // namespace spinlattice
