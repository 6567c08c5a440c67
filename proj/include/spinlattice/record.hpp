#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinlattice/error.hpp"

namespace spinlattice {

enum class Engine { Exact, MeanField, Mc };

inline std::string_view to_string(Engine engine) {
    switch (engine) {
        case Engine::Exact: return "exact";
        case Engine::MeanField: return "meanfield";
        case Engine::Mc: return "mc";
    }
    return "unknown";
}

/// One predicted or measured point of a temperature sweep. Absent fields stay empty.
struct SweepRecord {
    double temp = 0.0;
    Engine engine = Engine::Exact;
    std::optional<double> m_sigma;
    std::optional<double> m_tau;
    std::optional<double> m_mean;
    std::optional<double> m_all;
    std::optional<double> abs_m_all;
    std::optional<double> energy_per_site;
    std::optional<double> std_error;
    std::optional<double> deviation;  // only written by the compare command
    std::vector<std::string> flags;

    bool operator==(const SweepRecord&) const = default;
};

/// Uniform grid with both endpoints hit exactly.
inline std::vector<double> temperature_grid(double t_min, double t_max, std::size_t points) {
    if (points < 2) throw Error(ErrorCode::ValidationError, "points >= 2");
    if (!(t_min < t_max)) throw Error(ErrorCode::ValidationError, "t_min < t_max");
    std::vector<double> grid(points);
    const double step = (t_max - t_min) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = t_min + step * static_cast<double>(i);
    grid.back() = t_max;
    return grid;
}

}  // namespace spinlattice
