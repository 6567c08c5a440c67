#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <numeric>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "spinlattice/error.hpp"
#include "spinlattice/lattice.hpp"

namespace spinlattice {

/**
 * Seeded 64-bit generator with portable draw mappings.
 *
 * std::mt19937_64 fixes the raw stream; the site and uniform mappings below are
 * written out so results do not depend on a standard library's distributions.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform index in [0, n), Lemire multiply-shift with rejection.
    std::size_t site(std::size_t n) {
        const auto range = static_cast<std::uint64_t>(n);
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * range;
        auto low = static_cast<std::uint64_t>(m);
        if (low < range) {
            const std::uint64_t threshold = (0 - range) % range;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * range;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::size_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

enum class InitState { AllUp, Random };

struct ChainParams {
    double temp = 1.0;
    std::size_t burn_in_sweeps = 10000;
    std::size_t sample_sweeps = 10000;
    std::uint64_t seed = 20100601;
    InitState init = InitState::AllUp;

    void validate() const {
        detail::require_positive_temperature(temp);
        if (sample_sweeps < 1) throw Error(ErrorCode::ValidationError, "sample_sweeps >= 1");
    }
};

struct Estimate {
    double mean = 0.0;
    double error = 0.0;  // batch-means standard error
};

struct McResult {
    Estimate m_sigma;
    Estimate m_tau;
    Estimate m_all;
    Estimate abs_m_all;
    Estimate energy_per_site;
    Estimate three_site;  // triangular lattices only
    std::size_t samples = 0;
    double acceptance_rate = 0.0;
};

struct SweepStats {
    std::size_t attempts = 0;
    std::size_t accepted = 0;
    double energy_change = 0.0;
};

/// N single-site Metropolis attempts: one site draw, then an acceptance draw only when dE >= 0.
inline SweepStats metropolis_sweep(const Hamiltonian& h, SpinConfig& config, double temp, Rng& rng) {
    const std::size_t n = config.size();
    SweepStats stats;
    stats.attempts = n;
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t site = rng.site(n);
        const double de = h.delta_energy(config, site);
        if (de < 0.0 || rng.uniform() < std::exp(-de / temp)) {
            config.flip(site);
            ++stats.accepted;
            stats.energy_change += de;
        }
    }
    return stats;
}

inline SweepStats metropolis_sweep(const Lattice& lattice, const CouplingSet& couplings, SpinConfig& config,
                                   double temp, Rng& rng) {
    detail::require_positive_temperature(temp);
    detail::require_matching(lattice, config);
    return metropolis_sweep(Hamiltonian(lattice, couplings), config, temp, rng);
}

namespace detail {

inline Estimate batch_means(const std::vector<double>& xs, std::size_t batches = 20) {
    Estimate e;
    if (xs.empty()) return e;
    e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const std::size_t b = std::min(batches, xs.size());
    const std::size_t len = xs.size() / b;
    if (b < 2) return e;
    std::vector<double> means(b);
    for (std::size_t i = 0; i < b; ++i) {
        means[i] = std::accumulate(xs.begin() + static_cast<long>(i * len), xs.begin() + static_cast<long>((i + 1) * len), 0.0) /
                   static_cast<double>(len);
    }
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(b);
    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    e.error = std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
    return e;
}

inline SpinConfig initial_config(std::size_t n, InitState init, Rng& rng) {
    SpinConfig c = SpinConfig::uniform(n, 1);
    if (init == InitState::Random) {
        for (std::size_t i = 0; i < n; ++i) c.set(i, (rng.next() >> 63) ? 1 : -1);
    }
    return c;
}

}  // namespace detail

/// Burn-in, then one measurement per sweep; errors by 20-batch means.
inline McResult run_chain(const Lattice& lattice, const CouplingSet& couplings, const ChainParams& params) {
    params.validate();
    const Hamiltonian h(lattice, couplings);
    Rng rng(params.seed);
    SpinConfig config = detail::initial_config(lattice.site_count(), params.init, rng);
    const double n = static_cast<double>(lattice.site_count());
    const bool triangular = lattice.kind() == LatticeKind::Triangular;

    for (std::size_t s = 0; s < params.burn_in_sweeps; ++s) metropolis_sweep(h, config, params.temp, rng);

    double energy = total_energy(lattice, config, couplings);
    const std::size_t samples = params.sample_sweeps;
    std::vector<double> ms(samples), mt(samples), ma(samples), mabs(samples), en(samples), tri;
    if (triangular) tri.resize(samples);
    std::size_t accepted = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const SweepStats st = metropolis_sweep(h, config, params.temp, rng);
        accepted += st.accepted;
        energy += st.energy_change;
        const Measurement m = measure(lattice, config);
        ms[s] = m.m_sigma;
        mt[s] = m.m_tau;
        ma[s] = m.m_all;
        mabs[s] = std::fabs(m.m_all);
        en[s] = energy / n;
        if (triangular) tri[s] = three_site_correlator(lattice, config);
    }

    McResult r;
    r.m_sigma = detail::batch_means(ms);
    r.m_tau = detail::batch_means(mt);
    r.m_all = detail::batch_means(ma);
    r.abs_m_all = detail::batch_means(mabs);
    r.energy_per_site = detail::batch_means(en);
    if (triangular) r.three_site = detail::batch_means(tri);
    r.samples = samples;
    r.acceptance_rate = static_cast<double>(accepted) / (static_cast<double>(samples) * n);
    return r;
}

/// Exact canonical averages, McResult-shaped, plus log Z.
struct ExactAverages {
    double m_sigma = 0.0;
    double m_tau = 0.0;
    double m_all = 0.0;
    double abs_m_all = 0.0;
    double energy_per_site = 0.0;
    double three_site = 0.0;
    double log_partition = 0.0;
};

inline constexpr std::size_t kMaxEnumerationSites = 20;

/**
 * Sums Boltzmann weights over all 2^N states.
 *
 * Site 0 is pinned up and every state is paired with its global flip, so at zero
 * field the odd moments cancel pair by pair and come out exactly zero. The other
 * N-1 spins follow a Gray code, one flip per step.
 */
inline ExactAverages exact_enumeration(const Lattice& lattice, const CouplingSet& couplings, double temp) {
    detail::require_positive_temperature(temp);
    const std::size_t n = lattice.site_count();
    if (n > kMaxEnumerationSites) {
        throw Error(ErrorCode::TooLarge, "enumeration limited to " + std::to_string(kMaxEnumerationSites) + " sites");
    }
    const Hamiltonian h(lattice, couplings);
    const double jt = couplings.j_triplet;
    const double b = couplings.field_b;
    const bool uj = lattice.kind() == LatticeKind::UnionJack;
    const bool triangular = lattice.kind() == LatticeKind::Triangular;

    struct State {
        double bond_energy;
        long faces, m, m_sigma, m_tau;
    };
    auto walk = [&](auto&& visit) {
        SpinConfig c = SpinConfig::uniform(n, 1);
        State s{0.0, 0, static_cast<long>(n), 0, 0};
        for (const auto& bd : lattice.bonds()) s.bond_energy -= couplings.value(bd.sel);
        s.faces = static_cast<long>(lattice.faces().size());
        if (uj) {
            s.m_sigma = static_cast<long>(lattice.count(Sublattice::Sigma));
            s.m_tau = static_cast<long>(lattice.count(Sublattice::Tau));
        }
        visit(s);
        const std::uint64_t states = std::uint64_t{1} << (n - 1);
        for (std::uint64_t k = 1; k < states; ++k) {
            const std::size_t site = 1 + static_cast<std::size_t>(std::countr_zero(k));
            const int spin = c[site];
            s.bond_energy += 2.0 * spin * h.bond_field(c, site);
            s.faces -= 2L * spin * h.face_field(c, site);
            s.m -= 2L * spin;
            if (uj) (lattice.sublattice_of(site) == Sublattice::Sigma ? s.m_sigma : s.m_tau) -= 2L * spin;
            c.flip(site);
            visit(s);
        }
    };
    auto energy_of = [&](const State& s, int sign) {
        return s.bond_energy - sign * (jt * static_cast<double>(s.faces) + b * static_cast<double>(s.m));
    };

    double e_min = INFINITY;
    walk([&](const State& s) { e_min = std::min({e_min, energy_of(s, 1), energy_of(s, -1)}); });

    double z = 0.0, sm = 0.0, sms = 0.0, smt = 0.0, sabs = 0.0, se = 0.0, sf = 0.0;
    walk([&](const State& s) {
        const double e_up = energy_of(s, 1), e_dn = energy_of(s, -1);
        const double w_up = std::exp(-(e_up - e_min) / temp);
        const double w_dn = std::exp(-(e_dn - e_min) / temp);
        z += w_up + w_dn;
        sm += w_up * s.m - w_dn * s.m;
        sms += w_up * s.m_sigma - w_dn * s.m_sigma;
        smt += w_up * s.m_tau - w_dn * s.m_tau;
        sf += w_up * s.faces - w_dn * s.faces;
        sabs += (w_up + w_dn) * std::labs(s.m);
        se += w_up * e_up + w_dn * e_dn;
    });

    const double nd = static_cast<double>(n);
    ExactAverages r;
    r.m_all = sm / z / nd;
    r.abs_m_all = sabs / z / nd;
    r.energy_per_site = se / z / nd;
    if (uj) {
        r.m_sigma = sms / z / static_cast<double>(lattice.count(Sublattice::Sigma));
        r.m_tau = smt / z / static_cast<double>(lattice.count(Sublattice::Tau));
    } else {
        r.m_sigma = r.m_all;
        r.m_tau = r.m_all;
    }
    if (triangular) r.three_site = sf / z / static_cast<double>(lattice.faces().size());
    r.log_partition = -e_min / temp + std::log(z);
    return r;
}

/// Seed for the chain at position `index` of a scan.
inline std::uint64_t derive_seed(std::uint64_t seed, std::size_t index) { return seed ^ static_cast<std::uint64_t>(index); }

/**
 * One independent chain per temperature, run on a thread pool.
 *
 * A point's seed is derived from its rank in ascending temperature order (ties
 * by position), so permuting the list permutes the results and nothing else.
 */
inline std::vector<std::pair<double, McResult>> temperature_scan(const Lattice& lattice, const CouplingSet& couplings,
                                                                 const std::vector<double>& temps,
                                                                 const ChainParams& params_template,
                                                                 std::size_t threads = 0) {
    if (temps.empty()) throw Error(ErrorCode::ValidationError, "temperature list must be non-empty");
    for (double t : temps) detail::require_positive_temperature(t);
    std::vector<std::size_t> order(temps.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return temps[a] < temps[b]; });
    std::vector<std::size_t> rank(temps.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

    std::vector<std::pair<double, McResult>> out(temps.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, temps.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t i = next++; i < temps.size(); i = next++) {
            try {
                ChainParams p = params_template;
                p.temp = temps[i];
                p.seed = derive_seed(params_template.seed, rank[i]);
                out[i] = {temps[i], run_chain(lattice, couplings, p)};
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace spinlattice
