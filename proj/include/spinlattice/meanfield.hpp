#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "spinlattice/error.hpp"
#include "spinlattice/exact.hpp"
#include "spinlattice/record.hpp"

namespace spinlattice {

enum class MfKind { Triangular, UjUncoupled, UjCoupled };

/**
 * A mean-field equation system.
 *
 * j is the square-lattice bond, k the diagonal bond (Union Jack only), b the field
 * and q half the coordination number (Triangular only). All energies in kelvin.
 */
struct MfSystem {
    MfKind kind = MfKind::Triangular;
    double j = 0.0;
    double k = 0.0;
    double b = 0.0;
    int q = 3;

    static MfSystem triangular(double j, int q = 3, double b = 0.0) { return {MfKind::Triangular, j, 0.0, b, q}; }
    static MfSystem uj_uncoupled(double j, double k, double b = 0.0) { return {MfKind::UjUncoupled, j, k, b, 0}; }
    static MfSystem uj_coupled(double j, double k, double b = 0.0) { return {MfKind::UjCoupled, j, k, b, 0}; }

    void validate() const {
        if (!std::isfinite(j) || !std::isfinite(k) || !std::isfinite(b)) {
            throw Error(ErrorCode::InvalidSpec, "mean-field couplings must be finite");
        }
        if (kind == MfKind::Triangular) {
            if (q < 1) throw Error(ErrorCode::InvalidSpec, "q >= 1");
            if (k != 0.0) throw Error(ErrorCode::InvalidSpec, "k is unused by the triangular system and must be 0");
        }
    }
};

struct MfSolution {
    double m_sigma = 0.0;
    double m_tau = 0.0;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

inline constexpr double kMfDamping = 0.5;
inline constexpr double kMfTolerance = 1e-10;
inline constexpr std::size_t kMfMaxIter = 10000;

namespace detail {

// Scalar self-consistency map on the sigma (or only) order parameter.
inline double mf_map(const MfSystem& s, double temp, double m) {
    switch (s.kind) {
        case MfKind::Triangular: return std::tanh((s.q * s.j * m + s.b) / temp);
        case MfKind::UjUncoupled: return std::tanh((4.0 * s.k * m + s.b) / temp);
        case MfKind::UjCoupled: {
            const double tau = std::tanh((2.0 * s.j * m + s.b) / temp);
            return std::tanh((2.0 * s.k * m + 2.0 * s.j * tau + s.b) / temp);
        }
    }
    return 0.0;
}

inline double mf_tau(const MfSystem& s, double temp, double sigma) {
    switch (s.kind) {
        case MfKind::Triangular: return sigma;
        case MfKind::UjUncoupled: return std::tanh((4.0 * s.j * sigma + s.b) / temp);
        case MfKind::UjCoupled: return std::tanh((2.0 * s.j * sigma + s.b) / temp);
    }
    return 0.0;
}

}  // namespace detail

/// Damped fixed-point iteration; stops once |F(m) - m| < tol for the state it returns.
inline MfSolution mf_solve(const MfSystem& sys, double temp, double m0, double tol = kMfTolerance,
                           std::size_t max_iter = kMfMaxIter) {
    detail::require_positive_temperature(temp);
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidTolerance, "tolerance must be > 0");
    if (!(std::fabs(m0) <= 1.0)) throw Error(ErrorCode::InvalidSpec, "initial guess must satisfy |m0| <= 1");
    sys.validate();

    MfSolution sol;
    double m = m0;
    for (;;) {
        const double f = detail::mf_map(sys, temp, m);
        sol.residual = std::fabs(f - m);
        if (sol.residual < tol) {
            sol.converged = true;
            break;
        }
        if (sol.iterations == max_iter) break;
        m = (1.0 - kMfDamping) * m + kMfDamping * f;
        ++sol.iterations;
    }
    sol.m_sigma = m;
    sol.m_tau = detail::mf_tau(sys, temp, m);
    return sol;
}

/// Closed-form onset of order at zero field; empty when no positive T_c exists.
inline std::optional<double> mf_critical_temperature(const MfSystem& sys) {
    sys.validate();
    if (sys.b != 0.0) throw Error(ErrorCode::FieldNotSupported, "critical temperature needs b = 0");
    switch (sys.kind) {
        case MfKind::Triangular:
            if (sys.j <= 0.0) return std::nullopt;
            return sys.q * sys.j;
        case MfKind::UjUncoupled:
            if (sys.k <= 0.0) return std::nullopt;
            return 4.0 * sys.k;
        case MfKind::UjCoupled:
            if (sys.k <= -std::fabs(sys.j)) return std::nullopt;
            // 4J^2 / (-K + sqrt(K^2 + 4J^2)) without the cancellation at J -> 0
            return sys.k + std::sqrt(sys.k * sys.k + 4.0 * sys.j * sys.j);
    }
    return std::nullopt;
}

inline PhaseLabel mf_classify(double j, double k) {
    const double margin = k + std::fabs(j);
    if (margin > 0.0) return PhaseLabel::Ferromagnetic;
    if (margin < 0.0) return PhaseLabel::Antiferromagnetic;
    return PhaseLabel::Degenerate;
}

/// Ascending sweep; each point warm-starts from the previous solution, the first from m0 = 1.
inline std::vector<SweepRecord> mf_sweep(const MfSystem& sys, double t_min, double t_max, std::size_t points,
                                         double tol = kMfTolerance, std::size_t max_iter = kMfMaxIter) {
    const auto grid = temperature_grid(t_min, t_max, points);
    std::vector<SweepRecord> out;
    out.reserve(grid.size());
    double m = 1.0;
    for (double t : grid) {
        const MfSolution sol = mf_solve(sys, t, m, tol, max_iter);
        m = sol.m_sigma;
        SweepRecord r;
        r.temp = t;
        r.engine = Engine::MeanField;
        r.m_sigma = sol.m_sigma;
        r.m_tau = sol.m_tau;
        r.m_mean = 0.5 * (sol.m_sigma + sol.m_tau);
        r.m_all = r.m_mean;
        if (!sol.converged) r.flags.emplace_back("NotConverged");
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace spinlattice
