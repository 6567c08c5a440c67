#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spinlattice/error.hpp"

namespace spinlattice {

enum class LatticeKind { Chain, Square, Triangular, UnionJack };
enum class Boundary { Periodic };
enum class Sublattice : std::uint8_t { None, Sigma, Tau };

/// Which member of CouplingSet a bond draws its strength from.
enum class CouplingSelector : std::uint8_t { J1, J2, J3, J4, Diag, DiagPrime };

inline std::string_view to_string(LatticeKind kind) {
    switch (kind) {
        case LatticeKind::Chain: return "chain";
        case LatticeKind::Square: return "square";
        case LatticeKind::Triangular: return "triangular";
        case LatticeKind::UnionJack: return "union_jack";
    }
    return "unknown";
}

/**
 * Bond strengths and field, all stored as energy / k_B in kelvin.
 *
 * The named factories only take the couplings a lattice kind uses, so the
 * others are zero by construction. validate_for() re-checks that contract for
 * sets assembled field by field (e.g. by the config parser).
 */
struct CouplingSet {
    double j1 = 0.0;
    double j2 = 0.0;
    double j3 = 0.0;
    double j4 = 0.0;
    double j_diag = 0.0;
    double j_diag_prime = 0.0;
    double j_triplet = 0.0;
    double field_b = 0.0;

    static CouplingSet chain(double j1, double field_b = 0.0) {
        CouplingSet c;
        c.j1 = j1;
        c.field_b = field_b;
        c.validate_for(LatticeKind::Chain);
        return c;
    }

    static CouplingSet square(double j1, double j2, double field_b = 0.0) {
        CouplingSet c;
        c.j1 = j1;
        c.j2 = j2;
        c.field_b = field_b;
        c.validate_for(LatticeKind::Square);
        return c;
    }

    static CouplingSet triangular(double j1, double j2, double j_diag, double j_triplet = 0.0,
                                  double field_b = 0.0) {
        CouplingSet c;
        c.j1 = j1;
        c.j2 = j2;
        c.j_diag = j_diag;
        c.j_triplet = j_triplet;
        c.field_b = field_b;
        c.validate_for(LatticeKind::Triangular);
        return c;
    }

    static CouplingSet union_jack(double j1, double j2, double j3, double j4, double j_diag,
                                  double j_diag_prime, double field_b = 0.0) {
        CouplingSet c;
        c.j1 = j1;
        c.j2 = j2;
        c.j3 = j3;
        c.j4 = j4;
        c.j_diag = j_diag;
        c.j_diag_prime = j_diag_prime;
        c.field_b = field_b;
        c.validate_for(LatticeKind::UnionJack);
        return c;
    }

    /// Symmetric Union Jack set: all square bonds j_n, both diagonals j.
    static CouplingSet union_jack_symmetric(double j_n, double j, double field_b = 0.0) {
        return union_jack(j_n, j_n, j_n, j_n, j, j, field_b);
    }

    double value(CouplingSelector sel) const {
        switch (sel) {
            case CouplingSelector::J1: return j1;
            case CouplingSelector::J2: return j2;
            case CouplingSelector::J3: return j3;
            case CouplingSelector::J4: return j4;
            case CouplingSelector::Diag: return j_diag;
            case CouplingSelector::DiagPrime: return j_diag_prime;
        }
        return 0.0;
    }

    /// The same Union Jack rotated by a quarter turn: J1..J4 shift cyclically and J, J' swap.
    CouplingSet rotated_quarter_turn() const {
        CouplingSet c = *this;
        c.j1 = j2;
        c.j2 = j3;
        c.j3 = j4;
        c.j4 = j1;
        c.j_diag = j_diag_prime;
        c.j_diag_prime = j_diag;
        return c;
    }

    void validate_for(LatticeKind kind) const {
        const std::array<std::pair<const char*, double>, 8> all{{{"j1", j1},
                                                                 {"j2", j2},
                                                                 {"j3", j3},
                                                                 {"j4", j4},
                                                                 {"j_diag", j_diag},
                                                                 {"j_diag_prime", j_diag_prime},
                                                                 {"j_triplet", j_triplet},
                                                                 {"field_b", field_b}}};
        for (const auto& [name, v] : all) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::InvalidSpec, std::string(name) + " must be finite");
            }
        }
        auto must_be_zero = [&](const char* name, double v) {
            if (v != 0.0) {
                throw Error(ErrorCode::InvalidSpec, std::string(name) + " is not used by the " +
                                                        std::string(to_string(kind)) + " lattice and must be 0");
            }
        };
        switch (kind) {
            case LatticeKind::Chain:
                must_be_zero("j2", j2);
                [[fallthrough]];
            case LatticeKind::Square:
                must_be_zero("j_diag", j_diag);
                must_be_zero("j_triplet", j_triplet);
                [[fallthrough]];
            case LatticeKind::Triangular:
                must_be_zero("j3", j3);
                must_be_zero("j4", j4);
                must_be_zero("j_diag_prime", j_diag_prime);
                break;
            case LatticeKind::UnionJack:
                must_be_zero("j_triplet", j_triplet);
                break;
        }
    }

    bool operator==(const CouplingSet&) const = default;
};

struct LatticeSpec {
    LatticeKind kind = LatticeKind::Square;
    std::size_t width = 2;
    std::size_t height = 2;
    Boundary boundary = Boundary::Periodic;

    std::size_t site_count() const { return width * height; }

    void validate() const {
        if (width < 2) throw Error(ErrorCode::InvalidSpec, "width must be >= 2");
        if (kind == LatticeKind::Chain) {
            if (height != 1) throw Error(ErrorCode::InvalidSpec, "chain height must be 1");
        } else if (height < 2) {
            throw Error(ErrorCode::InvalidSpec, "height must be >= 2 for 2D lattices");
        }
        if (kind == LatticeKind::UnionJack && (width % 2 != 0 || height % 2 != 0)) {
            throw Error(ErrorCode::InvalidSpec, "union_jack width and height must be even");
        }
    }

    static LatticeSpec chain(std::size_t n) { return {LatticeKind::Chain, n, 1, Boundary::Periodic}; }
    static LatticeSpec grid(LatticeKind kind, std::size_t width, std::size_t height) {
        return {kind, width, height, Boundary::Periodic};
    }

    bool operator==(const LatticeSpec&) const = default;
};

struct Bond {
    std::size_t a;
    std::size_t b;
    CouplingSelector sel;
};

using Face = std::array<std::size_t, 3>;

/// One spin (+1 or -1) per site, row-major.
class SpinConfig {
public:
    SpinConfig() = default;

    explicit SpinConfig(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
        for (auto s : spins_) {
            if (s != 1 && s != -1) throw Error(ErrorCode::InvalidSpec, "spins must be +1 or -1");
        }
    }

    static SpinConfig uniform(std::size_t n, int spin = 1) {
        SpinConfig c;
        c.spins_.assign(n, spin >= 0 ? std::int8_t{1} : std::int8_t{-1});
        return c;
    }

    std::size_t size() const { return spins_.size(); }
    int operator[](std::size_t i) const { return spins_[i]; }
    int at(std::size_t i) const {
        if (i >= spins_.size()) throw Error(ErrorCode::IndexOutOfRange, "site " + std::to_string(i));
        return spins_[i];
    }
    void flip(std::size_t i) { spins_[i] = static_cast<std::int8_t>(-spins_[i]); }
    void set(std::size_t i, int spin) { spins_[i] = spin >= 0 ? std::int8_t{1} : std::int8_t{-1}; }
    std::span<const std::int8_t> spins() const { return spins_; }

    bool operator==(const SpinConfig&) const = default;

private:
    std::vector<std::int8_t> spins_;
};

/// Immutable geometry: bond table, triangular faces, sublattice labels and per-site incidence.
class Lattice {
public:
    explicit Lattice(const LatticeSpec& spec) : spec_(spec) {
        spec_.validate();
        const std::size_t n = spec_.site_count();
        sublattice_.assign(n, Sublattice::None);
        switch (spec_.kind) {
            case LatticeKind::Chain:
                for (std::size_t i = 0; i < n; ++i) bonds_.push_back({i, (i + 1) % n, CouplingSelector::J1});
                break;
            case LatticeKind::Square:
            case LatticeKind::Triangular:
                for (std::size_t r = 0; r < spec_.height; ++r) {
                    for (std::size_t c = 0; c < spec_.width; ++c) {
                        const std::size_t s = index(r, c);
                        bonds_.push_back({s, wrap(r, c, 0, 1), CouplingSelector::J1});
                        bonds_.push_back({s, wrap(r, c, 1, 0), CouplingSelector::J2});
                        if (spec_.kind == LatticeKind::Triangular) {
                            bonds_.push_back({s, wrap(r, c, 1, 1), CouplingSelector::Diag});
                            faces_.push_back({s, wrap(r, c, 0, 1), wrap(r, c, 1, 1)});
                            faces_.push_back({s, wrap(r, c, 1, 0), wrap(r, c, 1, 1)});
                        }
                    }
                }
                break;
            case LatticeKind::UnionJack:
                build_union_jack();
                break;
        }
        build_incidence();
    }

    const LatticeSpec& spec() const { return spec_; }
    LatticeKind kind() const { return spec_.kind; }
    std::size_t site_count() const { return sublattice_.size(); }
    std::size_t width() const { return spec_.width; }
    std::size_t height() const { return spec_.height; }

    std::span<const Bond> bonds() const { return bonds_; }
    std::span<const Face> faces() const { return faces_; }
    Sublattice sublattice_of(std::size_t site) const { return sublattice_.at(site); }
    std::size_t count(Sublattice which) const {
        std::size_t k = 0;
        for (auto s : sublattice_) k += (s == which) ? 1 : 0;
        return k;
    }

    std::size_t index(std::size_t row, std::size_t col) const { return row * spec_.width + col; }
    std::size_t row_of(std::size_t site) const { return site / spec_.width; }
    std::size_t col_of(std::size_t site) const { return site % spec_.width; }

    /// Site reached from (row, col) by the offset (dr, dc), wrapping periodically.
    std::size_t wrap(std::size_t row, std::size_t col, long dr, long dc) const {
        const long h = static_cast<long>(spec_.height);
        const long w = static_cast<long>(spec_.width);
        const long r = ((static_cast<long>(row) + dr) % h + h) % h;
        const long c = ((static_cast<long>(col) + dc) % w + w) % w;
        return index(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }

    /// Indices into bonds() touching the site.
    std::span<const std::size_t> incident_bonds(std::size_t site) const {
        return {bond_ids_.data() + bond_offsets_[site], bond_offsets_[site + 1] - bond_offsets_[site]};
    }

    /// Indices into faces() containing the site.
    std::span<const std::size_t> incident_faces(std::size_t site) const {
        return {face_ids_.data() + face_offsets_[site], face_offsets_[site + 1] - face_offsets_[site]};
    }

private:
    // Tau sites (odd row+col) bond to their four square neighbours with J1 (right), J2 (up),
    // J3 (left), J4 (down). Each Sigma site sends J along (+1,+1) and J' along (+1,-1), so
    // every Tau-centred face has one J pair and one J' pair on its rim.
    void build_union_jack() {
        for (std::size_t r = 0; r < spec_.height; ++r) {
            for (std::size_t c = 0; c < spec_.width; ++c) {
                const std::size_t s = index(r, c);
                if ((r + c) % 2 == 0) {
                    sublattice_[s] = Sublattice::Sigma;
                    bonds_.push_back({s, wrap(r, c, 1, 1), CouplingSelector::Diag});
                    bonds_.push_back({s, wrap(r, c, 1, -1), CouplingSelector::DiagPrime});
                } else {
                    sublattice_[s] = Sublattice::Tau;
                    bonds_.push_back({s, wrap(r, c, 0, 1), CouplingSelector::J1});
                    bonds_.push_back({s, wrap(r, c, -1, 0), CouplingSelector::J2});
                    bonds_.push_back({s, wrap(r, c, 0, -1), CouplingSelector::J3});
                    bonds_.push_back({s, wrap(r, c, 1, 0), CouplingSelector::J4});
                }
            }
        }
    }

    void build_incidence() {
        const std::size_t n = site_count();
        bond_offsets_.assign(n + 1, 0);
        for (const auto& b : bonds_) {
            ++bond_offsets_[b.a + 1];
            ++bond_offsets_[b.b + 1];
        }
        for (std::size_t i = 0; i < n; ++i) bond_offsets_[i + 1] += bond_offsets_[i];
        bond_ids_.assign(bond_offsets_[n], 0);
        std::vector<std::size_t> fill(bond_offsets_.begin(), bond_offsets_.end() - 1);
        for (std::size_t k = 0; k < bonds_.size(); ++k) {
            bond_ids_[fill[bonds_[k].a]++] = k;
            bond_ids_[fill[bonds_[k].b]++] = k;
        }

        face_offsets_.assign(n + 1, 0);
        for (const auto& f : faces_) {
            for (auto s : f) ++face_offsets_[s + 1];
        }
        for (std::size_t i = 0; i < n; ++i) face_offsets_[i + 1] += face_offsets_[i];
        face_ids_.assign(face_offsets_[n], 0);
        fill.assign(face_offsets_.begin(), face_offsets_.end() - 1);
        for (std::size_t k = 0; k < faces_.size(); ++k) {
            for (auto s : faces_[k]) face_ids_[fill[s]++] = k;
        }
    }

    LatticeSpec spec_;
    std::vector<Bond> bonds_;
    std::vector<Face> faces_;
    std::vector<Sublattice> sublattice_;
    std::vector<std::size_t> bond_offsets_, bond_ids_;
    std::vector<std::size_t> face_offsets_, face_ids_;
};

inline Lattice build_lattice(const LatticeSpec& spec) { return Lattice(spec); }

namespace detail {

inline void require_matching(const Lattice& lattice, const SpinConfig& config) {
    if (config.size() != lattice.site_count()) {
        throw Error(ErrorCode::DimensionMismatch, "config has " + std::to_string(config.size()) +
                                                      " spins, lattice has " +
                                                      std::to_string(lattice.site_count()) + " sites");
    }
}

}  // namespace detail

/// H = -sum J s_a s_b - J_t sum_faces s s s - B sum s, in kelvin.
inline double total_energy(const Lattice& lattice, const SpinConfig& config, const CouplingSet& couplings) {
    detail::require_matching(lattice, config);
    couplings.validate_for(lattice.kind());
    double bond_sum = 0.0;
    for (const auto& b : lattice.bonds()) {
        bond_sum += couplings.value(b.sel) * config[b.a] * config[b.b];
    }
    double face_sum = 0.0;
    for (const auto& f : lattice.faces()) face_sum += config[f[0]] * config[f[1]] * config[f[2]];
    double spin_sum = 0.0;
    for (auto s : config.spins()) spin_sum += s;
    return -bond_sum - couplings.j_triplet * face_sum - couplings.field_b * spin_sum;
}

/// Energy change from flipping one site, using only the site's bonds and faces.
inline double local_delta_energy(const Lattice& lattice, const SpinConfig& config, const CouplingSet& couplings,
                                 std::size_t site) {
    detail::require_matching(lattice, config);
    if (site >= lattice.site_count()) {
        throw Error(ErrorCode::IndexOutOfRange, "site " + std::to_string(site) + " out of range");
    }
    const auto bonds = lattice.bonds();
    double local = couplings.field_b;
    for (auto k : lattice.incident_bonds(site)) {
        const Bond& b = bonds[k];
        const std::size_t other = (b.a == site) ? b.b : b.a;
        local += couplings.value(b.sel) * config[other];
    }
    if (couplings.j_triplet != 0.0) {
        const auto faces = lattice.faces();
        for (auto k : lattice.incident_faces(site)) {
            int prod = 1;
            for (auto s : faces[k]) {
                if (s != site) prod *= config[s];
            }
            local += couplings.j_triplet * prod;
        }
    }
    return 2.0 * config[site] * local;
}

struct Measurement {
    double m_sigma = 0.0;
    double m_tau = 0.0;
    double m_mean = 0.0;
    double m_all = 0.0;
};

/// Sublattice averages on the Union Jack; on other kinds every entry is the plain site average.
inline Measurement measure(const Lattice& lattice, const SpinConfig& config) {
    detail::require_matching(lattice, config);
    long sigma = 0, tau = 0, all = 0;
    std::size_t n_sigma = 0, n_tau = 0;
    for (std::size_t i = 0; i < config.size(); ++i) {
        const int s = config[i];
        all += s;
        switch (lattice.sublattice_of(i)) {
            case Sublattice::Sigma:
                sigma += s;
                ++n_sigma;
                break;
            case Sublattice::Tau:
                tau += s;
                ++n_tau;
                break;
            case Sublattice::None:
                break;
        }
    }
    Measurement m;
    m.m_all = static_cast<double>(all) / static_cast<double>(config.size());
    if (lattice.kind() == LatticeKind::UnionJack) {
        m.m_sigma = static_cast<double>(sigma) / static_cast<double>(n_sigma);
        m.m_tau = static_cast<double>(tau) / static_cast<double>(n_tau);
    } else {
        m.m_sigma = m.m_all;
        m.m_tau = m.m_all;
    }
    m.m_mean = 0.5 * (m.m_sigma + m.m_tau);
    return m;
}

/// Mean of s_x s_y s_z over the 2N triangular faces.
inline double three_site_correlator(const Lattice& lattice, const SpinConfig& config) {
    if (lattice.kind() != LatticeKind::Triangular) {
        throw Error(ErrorCode::WrongLatticeKind, "three-site correlator needs a triangular lattice");
    }
    detail::require_matching(lattice, config);
    long sum = 0;
    for (const auto& f : lattice.faces()) sum += config[f[0]] * config[f[1]] * config[f[2]];
    return static_cast<double>(sum) / static_cast<double>(lattice.faces().size());
}

/**
 * Couplings resolved onto a lattice for fast repeated energy differences.
 *
 * Neighbours and face partners are flattened per site, so delta_energy touches
 * only contiguous memory. Used by the Monte Carlo engine.
 */
class Hamiltonian {
public:
    Hamiltonian(const Lattice& lattice, const CouplingSet& couplings)
        : field_(couplings.field_b), triplet_(couplings.j_triplet) {
        couplings.validate_for(lattice.kind());
        const std::size_t n = lattice.site_count();
        offsets_.assign(n + 1, 0);
        face_offsets_.assign(n + 1, 0);
        const auto bonds = lattice.bonds();
        const auto faces = lattice.faces();
        for (std::size_t i = 0; i < n; ++i) {
            for (auto k : lattice.incident_bonds(i)) {
                const Bond& b = bonds[k];
                neighbours_.push_back({b.a == i ? b.b : b.a, couplings.value(b.sel)});
            }
            offsets_[i + 1] = neighbours_.size();
            for (auto k : lattice.incident_faces(i)) {
                std::array<std::size_t, 2> pair{};
                std::size_t p = 0;
                for (auto s : faces[k]) {
                    if (s != i) pair[p++] = s;
                }
                partners_.push_back(pair);
            }
            face_offsets_[i + 1] = partners_.size();
        }
    }

    double delta_energy(const SpinConfig& config, std::size_t site) const {
        double local = field_ + bond_field(config, site);
        if (triplet_ != 0.0) local += triplet_ * face_field(config, site);
        return 2.0 * config[site] * local;
    }

    /// sum of J * s over the site's bond partners
    double bond_field(const SpinConfig& config, std::size_t site) const {
        double local = 0.0;
        for (std::size_t k = offsets_[site]; k < offsets_[site + 1]; ++k) {
            local += neighbours_[k].coupling * config[neighbours_[k].site];
        }
        return local;
    }

    /// sum of s_x s_y over the triangular faces containing the site
    int face_field(const SpinConfig& config, std::size_t site) const {
        int local = 0;
        for (std::size_t k = face_offsets_[site]; k < face_offsets_[site + 1]; ++k) {
            local += config[partners_[k][0]] * config[partners_[k][1]];
        }
        return local;
    }

    std::size_t site_count() const { return offsets_.size() - 1; }
    double field() const { return field_; }
    double triplet() const { return triplet_; }

private:
    struct Neighbour {
        std::size_t site;
        double coupling;
    };
    double field_;
    double triplet_;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbour> neighbours_;
    std::vector<std::size_t> face_offsets_;
    std::vector<std::array<std::size_t, 2>> partners_;
};

}  // namespace spinlattice
