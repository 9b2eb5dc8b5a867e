// domain.hpp -- geometry, discretisation and the surface charge data type.
//
// The configuration space is a box Q_L = (0,L)^{d-1} x (0,L) whose bottom face
// carries a piecewise-constant charge u in {-1,+1} on N^{d-1} cells of width
// h = L/N.  Four lateral boundary classes are supported: periodic, free,
// zero_flux, and flux(g).  All integrals over the bottom face are cell sums
// times h^{d-1}; the intrinsic pattern scale is unity, so the grid must
// resolve it (h <= 1/4).
#ifndef CPL_DOMAIN_HPP
#define CPL_DOMAIN_HPP

#include <array>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include "cpl/common.hpp"

namespace cpl {

enum class BC { periodic, free_lateral, zero_flux, flux };

inline const char* bc_name(BC bc) {
    switch (bc) {
        case BC::periodic: return "periodic";
        case BC::free_lateral: return "free";
        case BC::zero_flux: return "zero_flux";
        case BC::flux: return "flux";
    }
    return "?";
}

inline BC bc_from_name(const std::string& s) {
    if (s == "periodic") return BC::periodic;
    if (s == "free") return BC::free_lateral;
    if (s == "zero_flux") return BC::zero_flux;
    if (s == "flux") return BC::flux;
    throw InvalidInput("unknown boundary class '" + s + "'");
}

struct DomainSpec {
    int d = 2;       // spatial dimension, 2 or 3
    double L = 8.0;  // side length (intrinsic pattern scale = 1)
    int N = 64;      // bottom-face cells per side
    int M = 64;      // vertical grid layers
    double h = 0.125;
    BC bc = BC::periodic;

    DomainSpec(int d_, double L_, int N_, int M_, BC bc_) : d(d_), L(L_), N(N_), M(M_), h(L_ / N_), bc(bc_) {
        validate();
    }

    /// Cubic default: M = N, so hz == h.
    DomainSpec(int d_, double L_, int N_, BC bc_) : DomainSpec(d_, L_, N_, N_, bc_) {}

    /// Escape hatch for tiny analytic instances in tests; skips validation.
    static DomainSpec unchecked(int d_, double L_, int N_, int M_, BC bc_) {
        DomainSpec s(Tag{});
        s.d = d_; s.L = L_; s.N = N_; s.M = M_; s.h = L_ / N_; s.bc = bc_;
        return s;
    }

    void validate() const {
        if (d != 2 && d != 3) throw InvalidInput("DomainSpec: d must be 2 or 3");
        if (!(L > 0.0)) throw InvalidInput("DomainSpec: L must be positive");
        if (N < 4) throw InvalidInput("DomainSpec: N >= 4 required");
        if (M < 4) throw InvalidInput("DomainSpec: M >= 4 required");
        if (h > 0.25) throw InvalidInput("DomainSpec: h <= 1/4 required (unit pattern scale unresolved)");
        // zero-flux needs a balanced charge, impossible on an odd cell count;
        // rejected at construction, not silently repaired
        if (bc == BC::zero_flux && bottom_cells() % 2 != 0)
            throw Infeasible("DomainSpec: zero_flux requires an even number of bottom cells");
    }

    int dh() const { return d - 1; }  // horizontal dimensions
    std::int64_t bottom_cells() const {
        std::int64_t n = 1;
        for (int a = 0; a < dh(); ++a) n *= N;
        return n;
    }
    double bottom_area() const { return std::pow(L, d - 1); }
    double cell_area() const { return std::pow(h, d - 1); }

    bool operator==(const DomainSpec& o) const {
        return d == o.d && L == o.L && N == o.N && M == o.M && bc == o.bc;
    }

  private:
    struct Tag {};
    explicit DomainSpec(Tag) {}
};

// ---------------------------------------------------------------------------

/// The +-1 surface charge on the bottom-face cells.  Row-major over the
/// horizontal axes; in d=3 index = iy*N + ix.
struct ChargeDensity {
    DomainSpec domain;
    std::vector<std::int8_t> values;

    ChargeDensity(DomainSpec dom, std::vector<std::int8_t> vals)
        : domain(dom), values(std::move(vals)) {
        if (std::int64_t(values.size()) != domain.bottom_cells())
            throw InvalidInput("ChargeDensity: value count != bottom cell count");
        for (std::int8_t v : values)
            if (v != 1 && v != -1) throw InvalidInput("ChargeDensity: entries must be +-1");
        if (domain.bc == BC::zero_flux && sum() != 0)
            throw Infeasible("ChargeDensity: zero_flux requires sum(u) = 0");
    }

    static ChargeDensity constant(DomainSpec dom, std::int8_t v) {
        return ChargeDensity(dom, std::vector<std::int8_t>(dom.bottom_cells(), v));
    }

    std::int64_t sum() const {
        std::int64_t s = 0;
        for (std::int8_t v : values) s += v;
        return s;
    }
    double mean() const { return double(sum()) / double(values.size()); }

    ChargeDensity flipped_sign() const {
        std::vector<std::int8_t> v(values);
        for (auto& x : v) x = -x;
        return ChargeDensity(domain, std::move(v));
    }
};

// ---------------------------------------------------------------------------
// Energies

struct EnergyBreakdown {
    double interfacial = 0.0;
    double field = 0.0;
    double total = 0.0;       // stored as the exact sum interfacial + field
    double per_area = 0.0;    // total / L^{d-1}
    double per_volume = 0.0;  // total / L^d

    EnergyBreakdown() = default;
    EnergyBreakdown(double interf, double fld, const DomainSpec& dom) {
        if (interf < 0.0) throw InvalidInput("EnergyBreakdown: negative interfacial energy");
        if (fld < 0.0) throw InvalidInput("EnergyBreakdown: negative field energy");
        interfacial = interf;
        field = fld;
        total = interfacial + field;
        per_area = total / dom.bottom_area();
        per_volume = total / std::pow(dom.L, dom.d);
    }
};

/// Discrete (l1-anisotropic) total variation: sum over adjacent cell pairs of
/// opposite sign, wrapping iff periodic, each weighing 2*h^{d-2}.  Exact for
/// axis-aligned stripes; known anisotropy bias for d=3 non-stripe patterns.
inline double perimeter(const ChargeDensity& u) {
    const DomainSpec& dom = u.domain;
    const int N = dom.N;
    const bool wrap = (dom.bc == BC::periodic);
    const double w = 2.0 * std::pow(dom.h, dom.d - 2);
    std::int64_t jumps = 0;
    if (dom.dh() == 1) {
        for (int i = 0; i < N; ++i) {
            const int j = i + 1;
            if (j == N && !wrap) break;
            if (u.values[i] != u.values[j % N]) ++jumps;
        }
    } else {
        for (int iy = 0; iy < N; ++iy)
            for (int ix = 0; ix < N; ++ix) {
                const std::int8_t v = u.values[std::size_t(iy) * N + ix];
                if (ix + 1 < N || wrap)
                    if (v != u.values[std::size_t(iy) * N + (ix + 1) % N]) ++jumps;
                if (iy + 1 < N || wrap)
                    if (v != u.values[std::size_t((iy + 1) % N) * N + ix]) ++jumps;
            }
    }
    return double(jumps) * w;
}

/// Assemble the energy ledger from the interfacial part of u and a field
/// energy computed by one of the field modules for the same domain.
inline EnergyBreakdown total_energy(const ChargeDensity& u, double field_energy) {
    if (field_energy < 0.0) throw InvalidInput("total_energy: negative field energy");
    return EnergyBreakdown(perimeter(u), field_energy, u.domain);
}

// ---------------------------------------------------------------------------
// Admissibility

struct Violation {
    std::string what;
};

/// Class-membership check.  zero_flux needs sum(u)=0; flux(g) needs the total
/// lateral flux not to exceed what +-1 bottom charges can absorb; periodic and
/// free are always admissible.  Returns descriptors, never throws.
inline std::vector<Violation> admissibility_check(const ChargeDensity& u, double total_gamma_flux = 0.0) {
    std::vector<Violation> out;
    switch (u.domain.bc) {
        case BC::periodic:
        case BC::free_lateral:
            break;
        case BC::zero_flux:
            if (u.sum() != 0) out.push_back({"zero_flux: sum(u) != 0"});
            break;
        case BC::flux:
            if (std::abs(total_gamma_flux) > u.domain.bottom_area() * (1.0 + 1e-12))
                out.push_back({"flux exceeds bottom capacity |int g| > L^{d-1}"});
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Optimal-energy-density estimates

enum class SigmaMethod { anneal, stripe, relax_round };

inline const char* sigma_method_name(SigmaMethod m) {
    switch (m) {
        case SigmaMethod::anneal: return "anneal";
        case SigmaMethod::stripe: return "stripe";
        case SigmaMethod::relax_round: return "relax_round";
    }
    return "?";
}

struct SigmaEstimate {
    BC bc = BC::periodic;
    double L = 0.0;
    double value = 0.0;  // estimated optimal energy per unit bottom area
    SigmaMethod method = SigmaMethod::stripe;
    bool certified_upper = false;  // true iff value is the exact energy of a stored admissible pair

    SigmaEstimate() = default;
    SigmaEstimate(BC bc_, double L_, double v, SigmaMethod m, bool certified)
        : bc(bc_), L(L_), value(v), method(m), certified_upper(certified) {
        if (!(value > 0.0)) throw InvalidInput("SigmaEstimate: value must be positive");
    }
};

// ---------------------------------------------------------------------------
// Serialization: header "d N L bc", then one line of +-1 tokens per row.
// L is printed with %.17g so the round trip is bit-exact.

inline void save_charge(std::ostream& os, const ChargeDensity& u) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", u.domain.L);
    os << u.domain.d << ' ' << u.domain.N << ' ' << buf << ' ' << bc_name(u.domain.bc) << '\n';
    const int rows = (u.domain.dh() == 1) ? 1 : u.domain.N;
    const int cols = u.domain.N;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c) os << ' ';
            os << int(u.values[std::size_t(r) * cols + c]);
        }
        os << '\n';
    }
}

inline ChargeDensity load_charge(std::istream& is) {
    int d = 0, N = 0;
    double L = 0.0;
    std::string bcs;
    if (!(is >> d >> N >> L >> bcs)) throw InvalidInput("load_charge: bad header");
    DomainSpec dom = DomainSpec::unchecked(d, L, N, N, bc_from_name(bcs));
    dom.validate();
    std::vector<std::int8_t> vals;
    vals.reserve(std::size_t(dom.bottom_cells()));
    for (std::int64_t i = 0; i < dom.bottom_cells(); ++i) {
        int v = 0;
        if (!(is >> v)) throw InvalidInput("load_charge: truncated data");
        if (v != 1 && v != -1) throw InvalidInput("load_charge: token must be +-1");
        vals.push_back(std::int8_t(v));
    }
    return ChargeDensity(dom, std::move(vals));
}

inline std::string charge_to_string(const ChargeDensity& u) {
    std::ostringstream ss;
    save_charge(ss, u);
    return ss.str();
}

inline ChargeDensity charge_from_string(const std::string& s) {
    std::istringstream ss(s);
    return load_charge(ss);
}

} // namespace cpl

#endif // CPL_DOMAIN_HPP
