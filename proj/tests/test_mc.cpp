#include <gtest/gtest.h>

#include <cmath>

#include "spinlattice/exact.hpp"
#include "spinlattice/mc.hpp"

using namespace spinlattice;

namespace {

ChainParams params(double temp, std::size_t burn, std::size_t samples, std::uint64_t seed = 20100601) {
    ChainParams p;
    p.temp = temp;
    p.burn_in_sweeps = burn;
    p.sample_sweeps = samples;
    p.seed = seed;
    return p;
}

}  // namespace

TEST(Rng, SiteDrawsStayInRangeAndCoverIt) {
    Rng rng(1);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto s = rng.site(7);
        ASSERT_LT(s, 7u);
        ++hits[s];
    }
    for (int h : hits) EXPECT_NEAR(h, 10000, 500);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Metropolis, FreezesNearZeroTemperature) {
    const Lattice l(LatticeSpec::grid(LatticeKind::UnionJack, 8, 8));
    const CouplingSet c = CouplingSet::union_jack_symmetric(100, 100);
    SpinConfig cfg = SpinConfig::uniform(64);
    Rng rng(9);
    for (int s = 0; s < 100; ++s) metropolis_sweep(l, c, cfg, 1e-6, rng);
    EXPECT_EQ(cfg, SpinConfig::uniform(64));
}

TEST(Metropolis, AcceptsAlmostEverythingWhenHot) {
    const Lattice l(LatticeSpec::grid(LatticeKind::Triangular, 8, 8));
    const CouplingSet c = CouplingSet::triangular(100, 100, 100);
    SpinConfig cfg = SpinConfig::uniform(64);
    Rng rng(9);
    std::size_t acc = 0, att = 0;
    for (int s = 0; s < 100; ++s) {
        const auto st = metropolis_sweep(l, c, cfg, 1e9, rng);
        acc += st.accepted;
        att += st.attempts;
    }
    EXPECT_GT(static_cast<double>(acc) / static_cast<double>(att), 0.99);
}

TEST(Metropolis, TrajectoryIsReproducible) {
    const Lattice l(LatticeSpec::grid(LatticeKind::Square, 8, 8));
    const CouplingSet c = CouplingSet::square(100, 100);
    SpinConfig a = SpinConfig::uniform(64), b = SpinConfig::uniform(64);
    Rng ra(42), rb(42);
    for (int s = 0; s < 50; ++s) {
        metropolis_sweep(l, c, a, 250.0, ra);
        metropolis_sweep(l, c, b, 250.0, rb);
        ASSERT_EQ(a, b);
    }
}

TEST(Metropolis, RunningEnergyMatchesRecomputation) {
    const Lattice l(LatticeSpec::grid(LatticeKind::Triangular, 10, 10));
    const CouplingSet c = CouplingSet::triangular(100, -40, 70, 25, 10);
    const Hamiltonian h(l, c);
    SpinConfig cfg = SpinConfig::uniform(100);
    Rng rng(5);
    double e = total_energy(l, cfg, c);
    for (int s = 0; s < 200; ++s) {
        e += metropolis_sweep(h, cfg, 150.0, rng).energy_change;
        const double fresh = total_energy(l, cfg, c);
        ASSERT_NEAR(e, fresh, 1e-6 * std::max(1.0, std::fabs(fresh)));
    }
}

TEST(Metropolis, FreeSpinsSampleTheBoltzmannDistribution) {
    // with J = 0 each site is a two-state system; a correct acceptance rule gives tanh(B/T)
    const Lattice l(LatticeSpec::chain(64));
    for (double b : {30.0, -30.0}) {
        const McResult r = run_chain(l, CouplingSet::chain(0.0, b), params(100.0, 100, 20000));
        EXPECT_NEAR(r.m_all.mean, std::tanh(b / 100.0), 4.0 * r.m_all.error) << b;
    }
}

TEST(RunChain, OrderedUnionJack) {
    const Lattice l(LatticeSpec::grid(LatticeKind::UnionJack, 16, 16));
    const McResult r = run_chain(l, CouplingSet::union_jack_symmetric(100, 100), params(50.0, 500, 2000));
    EXPECT_GT(r.abs_m_all.mean, 0.99);
    EXPECT_EQ(r.samples, 2000u);
}

TEST(RunChain, AntiferroUnionJackHasNoNetMoment) {
    const Lattice l(LatticeSpec::grid(LatticeKind::UnionJack, 16, 16));
    const McResult r = run_chain(l, CouplingSet::union_jack_symmetric(100, -100), params(100.0, 2000, 20000));
    EXPECT_LT(std::fabs(r.m_all.mean), 3.0 * r.m_all.error);
}

TEST(RunChain, SquareEnergyMatchesEnumeration) {
    const Lattice l(LatticeSpec::grid(LatticeKind::Square, 4, 4));
    const CouplingSet c = CouplingSet::square(100, 100);
    const McResult r = run_chain(l, c, params(300.0, 1000, 20000));
    const ExactAverages ex = exact_enumeration(l, c, 300.0);
    EXPECT_NEAR(r.energy_per_site.mean, ex.energy_per_site, 3.0 * r.energy_per_site.error);
    EXPECT_NEAR(ex.energy_per_site, -101.706963, 1e-6);
    EXPECT_NEAR(ex.abs_m_all, 0.601291, 1e-6);
}

TEST(RunChain, RejectsBadParams) {
    const Lattice l(LatticeSpec::chain(4));
    EXPECT_THROW(run_chain(l, CouplingSet::chain(1), params(0.0, 0, 10)), Error);
    EXPECT_THROW(run_chain(l, CouplingSet::chain(1), params(1.0, 0, 0)), Error);
}

TEST(Enumeration, TwoFreeSpinsInField) {
    const Lattice l(LatticeSpec::chain(2));
    const ExactAverages a = exact_enumeration(l, CouplingSet::chain(0.0, 35.0), 80.0);
    EXPECT_NEAR(a.m_all, std::tanh(35.0 / 80.0), 1e-14);
}

TEST(Enumeration, RingMatchesTransferMatrix) {
    const Lattice l(LatticeSpec::chain(4));
    EXPECT_NEAR(exact_enumeration(l, CouplingSet::chain(100.0), 120.0).log_partition,
                chain_log_partition(100.0, 0.0, 120.0, 4), 1e-10);
    const Lattice l9(LatticeSpec::chain(9));
    EXPECT_NEAR(exact_enumeration(l9, CouplingSet::chain(-70.0, 20.0), 45.0).log_partition,
                chain_log_partition(-70.0, 20.0, 45.0, 9), 1e-10);
}

TEST(Enumeration, ZeroFieldMomentIsExactlyZero) {
    const Lattice sq(LatticeSpec::grid(LatticeKind::Square, 4, 4));
    const Lattice tri(LatticeSpec::grid(LatticeKind::Triangular, 4, 4));
    const Lattice uj(LatticeSpec::grid(LatticeKind::UnionJack, 4, 4));
    EXPECT_EQ(exact_enumeration(sq, CouplingSet::square(100, -60), 150.0).m_all, 0.0);
    const ExactAverages t = exact_enumeration(tri, CouplingSet::triangular(100, 100, 100), 150.0);
    EXPECT_EQ(t.m_all, 0.0);
    EXPECT_EQ(t.three_site, 0.0);
    const ExactAverages u = exact_enumeration(uj, CouplingSet::union_jack(30, 60, 90, 120, -50, 80), 150.0);
    EXPECT_EQ(u.m_all, 0.0);
    EXPECT_EQ(u.m_sigma, 0.0);
    EXPECT_EQ(u.m_tau, 0.0);
}

TEST(Enumeration, TooLarge) {
    try {
        exact_enumeration(Lattice(LatticeSpec::grid(LatticeKind::Square, 5, 5)), CouplingSet::square(1, 1), 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooLarge);
    }
}

TEST(Enumeration, TripletEnergyMatchesDirectSum) {
    // 2x3 triangular with a field and a triplet term, summed configuration by configuration
    const Lattice l(LatticeSpec::grid(LatticeKind::Triangular, 3, 2));
    const CouplingSet c = CouplingSet::triangular(40, -25, 60, 30, 15);
    const double t = 70.0;
    double z = 0.0, e_sum = 0.0, m_sum = 0.0, f_sum = 0.0;
    for (std::uint32_t bits = 0; bits < 64; ++bits) {
        std::vector<std::int8_t> s(6);
        for (int i = 0; i < 6; ++i) s[i] = (bits >> i) & 1 ? 1 : -1;
        const SpinConfig cfg(s);
        const double e = total_energy(l, cfg, c);
        const double w = std::exp(-e / t);
        z += w;
        e_sum += w * e;
        m_sum += w * measure(l, cfg).m_all;
        f_sum += w * three_site_correlator(l, cfg);
    }
    const ExactAverages a = exact_enumeration(l, c, t);
    EXPECT_NEAR(a.log_partition, std::log(z), 1e-10);
    EXPECT_NEAR(a.energy_per_site, e_sum / z / 6.0, 1e-9);
    EXPECT_NEAR(a.m_all, m_sum / z, 1e-12);
    EXPECT_NEAR(a.three_site, f_sum / z, 1e-12);
}

TEST(Scan, PermutationAndDuplicates) {
    const Lattice l(LatticeSpec::grid(LatticeKind::Square, 6, 6));
    const CouplingSet c = CouplingSet::square(100, 100);
    const ChainParams p = params(1.0, 50, 200, 77);
    const auto a = temperature_scan(l, c, {150.0, 250.0, 400.0}, p, 1);
    const auto b = temperature_scan(l, c, {400.0, 150.0, 250.0}, p, 2);
    EXPECT_EQ(a[0].second.abs_m_all.mean, b[1].second.abs_m_all.mean);
    EXPECT_EQ(a[1].second.energy_per_site.mean, b[2].second.energy_per_site.mean);
    EXPECT_EQ(a[2].second.m_all.mean, b[0].second.m_all.mean);

    // equal temperature and equal seed give the same chain
    ChainParams q = p;
    q.temp = 250.0;
    q.seed = derive_seed(77, 1);
    EXPECT_EQ(run_chain(l, c, q).m_all.mean, a[1].second.m_all.mean);
    EXPECT_THROW(temperature_scan(l, c, {}, p), Error);
}

TEST(Scan, ProtocolOfTwoHundredPoints) {
    const Lattice l(LatticeSpec::grid(LatticeKind::Square, 4, 4));
    std::vector<double> temps;
    for (int i = 0; i < 200; ++i) temps.push_back(10.0 + 2.5 * i);
    const auto out = temperature_scan(l, CouplingSet::square(100, 100), temps, params(1.0, 10, 20));
    ASSERT_EQ(out.size(), 200u);
    for (std::size_t i = 0; i < 200; ++i) {
        EXPECT_EQ(out[i].first, temps[i]);
        EXPECT_EQ(out[i].second.samples, 20u);
    }
}

TEST(Scan, PropagatesErrors) {
    const Lattice l(LatticeSpec::grid(LatticeKind::Square, 4, 4));
    EXPECT_THROW(temperature_scan(l, CouplingSet::square(1, 1), {10.0, -1.0}, params(1.0, 1, 1)), Error);
}
