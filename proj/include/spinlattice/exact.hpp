#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spinlattice/error.hpp"
#include "spinlattice/lattice.hpp"
#include "spinlattice/roots.hpp"

namespace spinlattice {

// ---------------------------------------------------------------------------
// One-dimensional ring
// ---------------------------------------------------------------------------

/// log Z of the periodic N-site chain from the transfer-matrix eigenvalues.
inline double chain_log_partition(double j, double h, double temp, std::size_t n) {
    detail::require_positive_temperature(temp);
    if (n < 2) throw Error(ErrorCode::InvalidSpec, "chain needs at least 2 sites");
    const double a = j / temp;
    const double x = h / temp;
    // lambda_pm = e^a cosh x +- sqrt(e^2a sinh^2 x + e^-2a), kept in log space.
    const double log_p = a + detail::log_cosh(x);
    const double log_q = (x == 0.0) ? -a : 0.5 * detail::log_add_exp(2.0 * a + 2.0 * detail::log_abs_sinh(x), -2.0 * a);
    const double log_l1 = detail::log_add_exp(log_p, log_q);
    if (a == 0.0) return static_cast<double>(n) * log_l1;
    // lambda_2 / lambda_1 = 2 sinh(2a) / lambda_1^2
    const double log_ratio = std::log(2.0) + detail::log_abs_sinh(2.0 * a) - 2.0 * log_l1;
    const double sign = (a < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
    return static_cast<double>(n) * log_l1 + std::log1p(sign * std::exp(static_cast<double>(n) * log_ratio));
}

/// Magnetisation per site of the infinite chain in a field.
inline double chain_magnetisation(double j, double h, double temp) {
    detail::require_positive_temperature(temp);
    if (h == 0.0) return 0.0;
    const double x = h / temp;
    // sinh x / sqrt(sinh^2 x + e^-4bJ), divided through by |sinh x| to avoid overflow
    const double r = std::exp(-4.0 * j / temp - 2.0 * detail::log_abs_sinh(x));
    return std::copysign(1.0 / std::sqrt(1.0 + r), x);
}

// ---------------------------------------------------------------------------
// Square and triangular lattices
// ---------------------------------------------------------------------------

/// Solves sinh(2J/T) = 1.
inline double square_critical_temperature(double j) {
    if (!(j > 0.0)) throw Error(ErrorCode::NonPositiveCoupling, "square critical temperature needs J > 0");
    return 2.0 * j / std::asinh(1.0);
}

inline double square_magnetisation(double j, double temp) {
    detail::require_positive_temperature(temp);
    if (!(j > 0.0)) throw Error(ErrorCode::NonPositiveCoupling, "square magnetisation needs J > 0");
    if (temp >= square_critical_temperature(j)) return 0.0;
    const double k = j / temp;
    const double t = std::tanh(k);
    const double sech2 = 1.0 / (std::cosh(k) * std::cosh(k));
    const double bracket = 1.0 - std::pow(sech2, 4) / (16.0 * std::pow(t, 4));
    return bracket > 0.0 ? std::pow(bracket, 0.125) : 0.0;
}

namespace detail {

struct TriangularTerms {
    double v1, v2, v3;
    double k1_sq;
    bool ordered;
};

inline TriangularTerms triangular_terms(double j1, double j2, double j3, double temp) {
    require_positive_temperature(temp);
    TriangularTerms t{};
    t.v1 = std::tanh(j1 / temp);
    t.v2 = std::tanh(j2 / temp);
    t.v3 = std::tanh(j3 / temp);
    const auto sech2 = [temp](double j) {
        const double c = std::cosh(j / temp);
        return 1.0 / (c * c);
    };
    const double f0 = 1.0 + t.v1 * t.v2 * t.v3;
    const double f1 = t.v1 + t.v2 * t.v3;
    const double f2 = t.v2 + t.v3 * t.v1;
    const double f3 = t.v3 + t.v1 * t.v2;
    const int positive = (j1 > 0.0) + (j2 > 0.0) + (j3 > 0.0);
    const bool factors_ok = f0 > 0.0 && f1 > 0.0 && f2 > 0.0 && f3 > 0.0;
    if (!factors_ok || positive < 2) {
        t.k1_sq = INFINITY;
        t.ordered = false;
        return t;
    }
    const double num = sech2(j1) * sech2(j2) * sech2(j3);
    t.k1_sq = num * num / (16.0 * f0 * f1 * f2 * f3);
    t.ordered = t.k1_sq < 1.0;
    return t;
}

}  // namespace detail

/// Spontaneous magnetisation of the anisotropic triangular lattice (diagonal coupling j3).
inline double triangular_magnetisation(double j1, double j2, double j3, double temp) {
    const auto t = detail::triangular_terms(j1, j2, j3, temp);
    return t.ordered ? std::pow(1.0 - t.k1_sq, 0.125) : 0.0;
}

/// Three-site face correlator M3 = M R on the triangular lattice.
inline double triangular_three_site(double j1, double j2, double j3, double temp) {
    const auto t = detail::triangular_terms(j1, j2, j3, temp);
    if (!t.ordered) return 0.0;
    const double m = std::pow(1.0 - t.k1_sq, 0.125);
    const double v1 = t.v1, v2 = t.v2, v3 = t.v3;
    // R = (Y - sqrt X) / (2 v1 v2 v3), rationalised so that v3 -> 0 stays finite.
    const double y = v1 * v2 * v3 * (v1 + v2 + v3) + v1 * v2 + v2 * v3 + v1 * v3;
    const double x = (1.0 + v1 * v2 * v3) * (v1 + v2 * v3) * (v2 + v3 * v1) * (v3 + v1 * v2);
    const double a = v1 * v1, b = v2 * v2, c = v3 * v3;
    const double numer = -a * b * c + 2.0 * a * b * v3 - a * b + 2.0 * a * v2 * c + 2.0 * a * v2 - a * c +
                         2.0 * a * v3 - a + 2.0 * v1 * b * c + 2.0 * v1 * b + 4.0 * v1 * v2 * v3 +
                         2.0 * v1 * c + 2.0 * v1 - b * c + 2.0 * b * v3 - b + 2.0 * v2 * c + 2.0 * v2 - c +
                         2.0 * v3 - 1.0;
    return m * numer / (2.0 * (y + std::sqrt(x)));
}

/// Three-spin magnetisation around a corner of the square lattice.
inline double square_corner_three_site(double j1, double j2, double temp) {
    detail::require_positive_temperature(temp);
    if (j1 == 0.0 || j2 == 0.0) throw Error(ErrorCode::SingularCoupling, "corner correlator needs J1, J2 != 0");
    const double m = triangular_magnetisation(j1, j2, 0.0, temp);
    if (m == 0.0) return 0.0;
    const double e1 = std::exp(-4.0 * j1 / temp);
    const double e2 = std::exp(-4.0 * j2 / temp);
    return m * (1.0 - 4.0 * e1 * e2 / ((1.0 - e1) * (1.0 - e2)));
}

// ---------------------------------------------------------------------------
// Union Jack
// ---------------------------------------------------------------------------

struct FaceWeights {
    std::array<double, 8> w{};  // w[0] is omega_1
    std::array<double, 4> g{};  // g[0] is gamma_1
};

enum class PhaseLabel { Ferromagnetic, Antiferromagnetic, Metamagnetic, Degenerate };

inline std::string_view to_string(PhaseLabel label) {
    switch (label) {
        case PhaseLabel::Ferromagnetic: return "Ferromagnetic";
        case PhaseLabel::Antiferromagnetic: return "Antiferromagnetic";
        case PhaseLabel::Metamagnetic: return "Metamagnetic";
        case PhaseLabel::Degenerate: return "Degenerate";
    }
    return "Unknown";
}

enum class Gating { Gated, Ungated };

/// A sublattice prediction plus the diagnostics raised while computing it.
struct Prediction {
    double value = 0.0;
    bool ungated = false;
    bool gate_failed = false;
    bool out_of_range = false;
    bool branch_failure = false;

    void merge_flags(const Prediction& other) {
        ungated = ungated || other.ungated;
        gate_failed = gate_failed || other.gate_failed;
        out_of_range = out_of_range || other.out_of_range;
        branch_failure = branch_failure || other.branch_failure;
    }
};

namespace detail {

inline void require_union_jack(const CouplingSet& c) { c.validate_for(LatticeKind::UnionJack); }

inline void require_zero_field(const CouplingSet& c) {
    if (c.field_b != 0.0) throw Error(ErrorCode::FieldNotSupported, "closed forms need field_b = 0");
}

/**
 * log of omega_1..omega_8.
 *
 * The cosh arguments are grouped as pair sums so that the quarter-turn rotation
 * of the couplings permutes the results bit for bit.
 */
inline std::array<double, 8> log_face_weights(const CouplingSet& c, double temp) {
    const double s13 = c.j1 + c.j3;
    const double s24 = c.j2 + c.j4;
    const double s = s13 + s24;
    const double l2 = std::log(2.0);
    const auto lc = [temp](double x) { return log_cosh(x / temp); };
    return {l2 + (c.j_diag + c.j_diag_prime) / temp + lc(s),
            l2 - (c.j_diag + c.j_diag_prime) / temp + lc(s13 - s24),
            l2 + (c.j_diag_prime - c.j_diag) / temp + lc((c.j1 + c.j4) - (c.j2 + c.j3)),
            l2 + (c.j_diag - c.j_diag_prime) / temp + lc((c.j1 + c.j2) - (c.j3 + c.j4)),
            l2 + lc(s - 2.0 * c.j2),
            l2 + lc(s - 2.0 * c.j4),
            l2 + lc(s - 2.0 * c.j3),
            l2 + lc(s - 2.0 * c.j1)};
}

inline std::array<double, 4> gammas(const std::array<double, 8>& w) {
    return {(w[1] - w[0]) + (w[2] + w[3]), (w[0] - w[1]) + (w[2] + w[3]), (w[0] + w[1]) + (w[3] - w[2]),
            (w[0] + w[1]) + (w[2] - w[3])};
}

/// Face weights divided by their maximum; every ratio used downstream is scale free.
inline std::array<double, 8> scaled_face_weights(const CouplingSet& c, double temp) {
    auto lw = log_face_weights(c, temp);
    const double top = *std::max_element(lw.begin(), lw.end());
    std::array<double, 8> w{};
    for (std::size_t i = 0; i < 8; ++i) w[i] = std::exp(lw[i] - top);
    return w;
}

inline double sorted_product(std::array<double, 4> v) {
    std::sort(v.begin(), v.end());
    return ((v[0] * v[1]) * v[2]) * v[3];
}

struct SigmaTerms {
    std::array<double, 8> w;
    std::array<double, 4> g;
    double omega_sq;
};

inline SigmaTerms sigma_terms(const CouplingSet& c, double temp) {
    SigmaTerms t{};
    t.w = scaled_face_weights(c, temp);
    t.g = gammas(t.w);
    const double p = sorted_product({t.w[4], t.w[5], t.w[6], t.w[7]});
    t.omega_sq = 1.0 - ((t.g[0] * t.g[1]) * (t.g[2] * t.g[3])) / (16.0 * p);
    return t;
}

}  // namespace detail

/// omega_1..omega_8 and gamma_1..gamma_4 in absolute scale (may overflow for T << |J|).
inline FaceWeights uj_face_weights(const CouplingSet& c, double temp) {
    detail::require_positive_temperature(temp);
    detail::require_union_jack(c);
    FaceWeights fw;
    const auto lw = detail::log_face_weights(c, temp);
    for (std::size_t i = 0; i < 8; ++i) fw.w[i] = std::exp(lw[i]);
    fw.g = detail::gammas(fw.w);
    return fw;
}

/// Sigma-sublattice magnetisation with its diagnostics.
inline Prediction uj_sigma_prediction(const CouplingSet& c, double temp, Gating gating = Gating::Gated) {
    detail::require_positive_temperature(temp);
    detail::require_union_jack(c);
    detail::require_zero_field(c);
    Prediction p;
    p.ungated = gating == Gating::Ungated;
    const auto t = detail::sigma_terms(c, temp);
    if (!(t.omega_sq > 1.0)) return p;
    const double prod = (t.g[0] * t.g[1]) * (t.g[2] * t.g[3]);
    if (gating == Gating::Gated && !(t.g[0] < 0.0 || prod > 0.0)) {
        p.gate_failed = true;
        return p;
    }
    p.value = std::pow(1.0 - 1.0 / t.omega_sq, 0.125);
    return p;
}

inline double uj_sigma_magnetisation(const CouplingSet& c, double temp, Gating gating = Gating::Gated) {
    return uj_sigma_prediction(c, temp, gating).value;
}

/**
 * Tau-sublattice magnetisation.
 *
 * Gated mode also requires J1 = J2 = J3 = J4. The value is returned unclamped;
 * |tau| > 1 is flagged OutOfRange rather than hidden.
 */
inline Prediction uj_tau_magnetisation(const CouplingSet& c, double temp, Gating gating = Gating::Gated) {
    detail::require_positive_temperature(temp);
    detail::require_union_jack(c);
    detail::require_zero_field(c);
    if (c.j1 == 0.0 || c.j2 == 0.0 || c.j3 == 0.0 || c.j4 == 0.0) {
        throw Error(ErrorCode::SingularCoupling, "tau magnetisation needs every J_r != 0");
    }
    Prediction sigma = uj_sigma_prediction(c, temp, gating);
    Prediction p;
    p.merge_flags(sigma);
    if (gating == Gating::Gated && !(c.j1 == c.j2 && c.j2 == c.j3 && c.j3 == c.j4)) {
        p.gate_failed = true;
        return p;
    }
    if (sigma.value == 0.0) return p;

    // Products of four small weights leave the double range once |J|/T exceeds ~40.
    using ld = long double;
    const auto lw = detail::log_face_weights(c, temp);
    const double top = *std::max_element(lw.begin(), lw.end());
    std::array<ld, 8> w{};
    for (std::size_t i = 0; i < 8; ++i) w[i] = std::exp(static_cast<ld>(lw[i] - top));
    const ld w1 = w[0], w2 = w[1], w3 = w[2], w4 = w[3];
    const ld w5 = w[4], w6 = w[5], w7 = w[6], w8 = w[7];
    const ld pw = (w5 * w6) * (w7 * w8);
    const ld q = w1 * w1 + w2 * w2 + w3 * w3 + w4 * w4;
    const ld a = 2 * pw * q - (w1 * w2 + w3 * w4) * (w1 * w3 + w2 * w4) * (w1 * w4 + w2 * w3);
    const ld b = pw * (pw - w1 * w2 * w3 * w4);
    const ld cc = q * q - 4 * (w5 * w6 - w7 * w8) * (w5 * w6 - w7 * w8);
    const ld d = (w1 * w1 + w2 * w2) * (2 * pw - w1 * w2 * w3 * w4) - pw * (w3 * w3 + w4 * w4);
    const ld e = w1 * w1 - w2 * w2;
    if (b < 0 || cc < 0) {
        p.branch_failure = true;
        return p;
    }
    const ld num = a + 2 * std::sqrt(b * cc);
    const ld den = d + 2 * e * std::sqrt(b);
    if (den == 0 || num / den < 0) {
        p.branch_failure = true;
        return p;
    }
    const ld f_plus_l = std::sqrt(num / den);
    const double f_plus = static_cast<double>(f_plus_l);
    const double f_minus = static_cast<double>((w5 * w6 - w7 * w8) / (w1 * w2 * f_plus_l));

    // A_1234 and A_2341 in log space: the sinh factors overflow long before their ratio does.
    const double b2 = 2.0 / temp;
    const double log_g = detail::log_add_exp(detail::log_cosh(b2 * (c.j1 + c.j3)), detail::log_cosh(b2 * (c.j2 - c.j4)));
    const auto prefactor = [&](double ja, double jb, bool& ok) {
        const double sa = std::sinh(b2 * ja), sb = std::sinh(b2 * jb);
        if ((sa > 0.0) != (sb > 0.0)) {
            ok = false;
            return 0.0;
        }
        if (ja + jb == 0.0) return 0.0;
        const double log_mag = detail::log_abs_sinh(b2 * (ja + jb)) -
                               0.5 * (std::log(2.0) + log_g + detail::log_abs_sinh(b2 * ja) + detail::log_abs_sinh(b2 * jb));
        return std::copysign(std::exp(log_mag), ja + jb);
    };
    bool ok = true;
    const double a1234 = prefactor(c.j1, c.j3, ok);
    const double a2341 = prefactor(c.j2, c.j4, ok);
    if (!ok) {
        p.branch_failure = true;
        return p;
    }
    p.value = 0.5 * sigma.value * (a1234 * (f_plus + f_minus) + a2341 * (f_plus - f_minus));
    if (!std::isfinite(p.value)) {
        p.value = 0.0;
        p.branch_failure = true;
    } else if (std::fabs(p.value) > 1.0) {
        p.out_of_range = true;
    }
    return p;
}

/// (sigma + tau) / 2 with the union of both diagnostic sets.
inline Prediction uj_mean_magnetisation(const CouplingSet& c, double temp, Gating gating = Gating::Gated) {
    const Prediction s = uj_sigma_prediction(c, temp, gating);
    const Prediction t = uj_tau_magnetisation(c, temp, gating);
    Prediction m;
    m.value = 0.5 * (s.value + t.value);
    m.merge_flags(s);
    m.merge_flags(t);
    return m;
}

enum class RootKind { OmegaRoot, VaksTc, VaksTcStar, VaksTd, MeanFieldTc };

inline std::string_view to_string(RootKind kind) {
    switch (kind) {
        case RootKind::OmegaRoot: return "OmegaRoot";
        case RootKind::VaksTc: return "VaksTc";
        case RootKind::VaksTcStar: return "VaksTcStar";
        case RootKind::VaksTd: return "VaksTd";
        case RootKind::MeanFieldTc: return "MeanFieldTc";
    }
    return "Unknown";
}

struct CriticalPoint {
    double temp;
    RootKind kind;
    int gamma_index;  // 1..4 for OmegaRoot (which gamma vanishes), else 0
};

/// Critical temperatures in ascending order.
struct CriticalSet {
    std::vector<CriticalPoint> points;

    std::vector<double> roots() const {
        std::vector<double> r;
        for (const auto& p : points) r.push_back(p.temp);
        return r;
    }
    std::size_t count(RootKind kind) const {
        return static_cast<std::size_t>(
            std::count_if(points.begin(), points.end(), [kind](const CriticalPoint& p) { return p.kind == kind; }));
    }
    void sort() {
        std::sort(points.begin(), points.end(), [](const CriticalPoint& a, const CriticalPoint& b) { return a.temp < b.temp; });
    }
};

/// Smallest gamma of the scaled weights; zero exactly where sum(w1..w4) = 2 max(w1..w4).
inline double uj_criticality(const CouplingSet& c, double temp) {
    const auto g = detail::gammas(detail::scaled_face_weights(c, temp));
    return *std::min_element(g.begin(), g.end());
}

inline CriticalSet uj_critical_temperatures(const CouplingSet& c, double t_min, double t_max) {
    detail::require_union_jack(c);
    if (!(t_min > 0.0) || !(t_max > t_min)) {
        throw Error(ErrorCode::ValidationError, "need 0 < t_min < t_max");
    }
    CriticalSet set;
    for (double r : detail::scan_roots([&](double t) { return uj_criticality(c, t); }, t_min, t_max)) {
        const auto g = detail::gammas(detail::scaled_face_weights(c, r));
        const auto idx = std::min_element(g.begin(), g.end()) - g.begin();
        set.points.push_back({r, RootKind::OmegaRoot, static_cast<int>(idx) + 1});
    }
    set.sort();
    return set;
}

struct VaksParameters {
    double alpha1;
    double alpha2;
};

/// Symmetric model: every J_r = j1, J = J' = j.
inline VaksParameters vaks_parameters(double j1, double j, double temp) {
    detail::require_positive_temperature(temp);
    const double k = j / temp;
    const double k1 = j1 / temp;
    const double em = std::exp(-2.0 * k);
    const double c4 = std::cosh(4.0 * k1);
    return {std::exp(2.0 * k) * (c4 - em) / (1.0 + em), em * (1.0 - em) / (c4 + em)};
}

inline CriticalSet vaks_critical_temperatures(double j1, double j, double t_min, double t_max) {
    if (!(t_min > 0.0) || !(t_max > t_min)) {
        throw Error(ErrorCode::ValidationError, "need 0 < t_min < t_max");
    }
    CriticalSet set;
    auto add = [&](RootKind kind, auto&& f) {
        for (double r : detail::scan_roots(f, t_min, t_max)) set.points.push_back({r, kind, 0});
    };
    if (j > -std::fabs(j1)) {
        add(RootKind::VaksTc, [&](double t) { return vaks_parameters(j1, j, t).alpha1 - 1.0; });
    }
    if (j < -0.907 * std::fabs(j1)) {
        add(RootKind::VaksTcStar, [&](double t) { return vaks_parameters(j1, j, t).alpha2 + 1.0; });
    }
    add(RootKind::VaksTd, [&](double t) {
        const auto a = vaks_parameters(j1, j, t);
        return a.alpha1 + a.alpha2;
    });
    set.sort();
    return set;
}

/// Ground-state classification from the four face energies.
inline PhaseLabel classify_phase(const CouplingSet& c) {
    const double jr_all = std::fabs(c.j1 + c.j2 + c.j3 + c.j4);
    const std::array<double, 4> minus_e{c.j_diag + c.j_diag_prime + jr_all,
                                        -c.j_diag - c.j_diag_prime + std::fabs(c.j1 - c.j2 + c.j3 - c.j4),
                                        -c.j_diag + c.j_diag_prime + std::fabs(c.j1 - c.j2 - c.j3 + c.j4),
                                        c.j_diag - c.j_diag_prime + std::fabs(c.j1 + c.j2 - c.j3 - c.j4)};
    const auto top = std::max_element(minus_e.begin(), minus_e.end());
    if (std::count(minus_e.begin(), minus_e.end(), *top) > 1) return PhaseLabel::Degenerate;
    switch (top - minus_e.begin()) {
        case 0: return PhaseLabel::Ferromagnetic;
        case 1: return PhaseLabel::Antiferromagnetic;
        default: return PhaseLabel::Metamagnetic;
    }
}

}  // namespace spinlattice
