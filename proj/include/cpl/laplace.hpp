// laplace.hpp -- mixed-boundary Laplace solves on the box: the over-relaxed
// problem, the free / zero-flux / prescribed-flux field energies of a charge,
// the all-Neumann harmonic building block, and the orthogonality checker.
#ifndef CPL_LAPLACE_HPP
#define CPL_LAPLACE_HPP

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "cpl/boxgrid.hpp"
#include "cpl/domain.hpp"
#include "cpl/krylov.hpp"

namespace cpl {

inline BoxGrid make_box(const DomainSpec& dom) { return BoxGrid(dom.d, dom.L, dom.N, dom.L, dom.M); }

/// Flux data g on the facets of Gamma (all faces except the bottom), in the
/// enumeration order of BoxGrid::gamma_facets().
struct FluxData {
    BoxGrid grid;
    std::vector<double> g;
    double total_flux = 0.0;  // int_Gamma g

    FluxData(const BoxGrid& grid_, std::vector<double> values) : grid(grid_), g(std::move(values)) {
        const auto facets = grid.gamma_facets();
        if (g.size() != facets.size()) throw InvalidInput("FluxData: facet count mismatch");
        for (std::size_t f = 0; f < g.size(); ++f) total_flux += g[f] * facets[f].area;
    }

    static FluxData zero(const BoxGrid& grid_) {
        return FluxData(grid_, std::vector<double>(grid_.gamma_facets().size(), 0.0));
    }
};

struct ScalarPotential {
    BoxGrid grid;
    std::vector<double> v;        // nodal values
    double solve_residual = 0.0;  // relative residual of the linear solve
};

namespace detail {

inline std::vector<char> mask_of(const BoxGrid& grid, const std::vector<std::int32_t>& nodes) {
    std::vector<char> m(std::size_t(grid.node_count()), 0);
    for (auto n : nodes) m[std::size_t(n)] = 1;
    return m;
}

/// Minimise (1/2) a(v,v) - rhs.v, with optional homogeneous Dirichlet mask.
inline ScalarPotential solve_quadratic(const BoxGrid& grid, std::vector<double> rhs,
                                       const std::vector<char>* dirichlet, bool pin_mean,
                                       const char* what, std::ostream* log = nullptr,
                                       const std::vector<double>* warm = nullptr,
                                       std::vector<double>* residual_history = nullptr) {
    const std::size_t n = rhs.size();
    if (dirichlet)
        for (std::size_t i = 0; i < n; ++i)
            if ((*dirichlet)[i]) rhs[i] = 0.0;
    if (pin_mean) {
        // solvability of the pure-Neumann system: rhs orthogonal to constants
        double s = 0.0, a = 0.0;
        for (double x : rhs) { s += x; a += std::abs(x); }
        if (std::abs(s) > 1e-9 * (a + 1e-300))
            throw Infeasible(std::string(what) + ": incompatible Neumann data (nonzero total flux)");
        remove_mean(rhs);
    }

    std::vector<double> scratch(n);
    auto apply = [&](std::span<const double> in, std::span<double> out) {
        if (dirichlet) {
            std::copy(in.begin(), in.end(), scratch.begin());
            for (std::size_t i = 0; i < n; ++i)
                if ((*dirichlet)[i]) scratch[i] = 0.0;
            grid.apply_form(scratch, out);
            for (std::size_t i = 0; i < n; ++i)
                if ((*dirichlet)[i]) out[i] = 0.0;
        } else {
            grid.apply_form(in, out);
        }
    };

    ScalarPotential pot{grid, std::vector<double>(n, 0.0), 0.0};
    if (warm && warm->size() == n) pot.v = *warm;
    KrylovOptions opt;
    opt.pin_mean = pin_mean;
    opt.log = log;
    opt.residual_history = residual_history;
    auto res = conjugate_residual(apply, rhs, pot.v, opt);
    if (!res.converged)
        throw ConvergenceFailure(std::string(what) + ": linear solve did not converge", res.residual);
    pot.solve_residual = res.residual;
    if (dirichlet)
        for (std::size_t i = 0; i < n; ++i)
            if ((*dirichlet)[i]) pot.v[i] = 0.0;
    return pot;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Over-relaxed problem: Delta v0 = 0, v0 = 0 on the bottom, -dv0/dnu = g on
// Gamma.  Dropping the charge constraint entirely leaves the pure Laplace
// problem whose energy measures the non-screenable part of the boundary flux.

struct OverrelaxedSolution {
    ScalarPotential potential;
    double energy = 0.0;  // int (1/2)|grad v0|^2
};

inline OverrelaxedSolution overrelaxed_solve(const FluxData& g, std::ostream* log = nullptr,
                                             std::vector<double>* residual_history = nullptr) {
    const BoxGrid& grid = g.grid;
    std::vector<double> rhs(std::size_t(grid.node_count()), 0.0);
    BoxGrid::add_facet_load(grid.gamma_facets(), g.g, rhs);
    auto mask = detail::mask_of(grid, grid.bottom_nodes());
    auto pot = detail::solve_quadratic(grid, std::move(rhs), &mask, false, "overrelaxed_solve", log,
                                       nullptr, residual_history);
    OverrelaxedSolution out{std::move(pot), 0.0};
    out.energy = 0.5 * grid.grad_sq_integral(out.potential.v);
    return out;
}

// ---------------------------------------------------------------------------
// Field energy of a charge u under the box classes.  The minimising field is
// b = -grad v; the three modes differ in the space v ranges over:
//   free      : v = 0 on Gamma (natural condition of the unconstrained side),
//   zero_flux : pure Neumann with -dv/dnu = 0 on Gamma (needs sum u = 0),
//   flux(g)   : pure Neumann with -dv/dnu = g on Gamma (needs total balance).
// Nesting of the trial spaces gives free <= zero_flux <= flux exactly.

enum class BoxMode { free_lateral, zero_flux, flux };

struct BoxFieldSolution {
    ScalarPotential potential;
    double energy = 0.0;
};

inline BoxFieldSolution field_energy_box(const ChargeDensity& u, BoxMode mode,
                                         const FluxData* g = nullptr,
                                         const std::vector<double>* warm = nullptr,
                                         std::ostream* log = nullptr) {
    const BoxGrid grid = make_box(u.domain);
    std::vector<double> rhs(std::size_t(grid.node_count()), 0.0);
    std::vector<double> bottom(u.values.begin(), u.values.end());
    BoxGrid::add_facet_load(grid.bottom_facets(), bottom, rhs);

    if (mode == BoxMode::zero_flux && u.sum() != 0)
        throw Infeasible("field_energy_box: zero_flux posed with sum(u) != 0");
    if (mode == BoxMode::flux) {
        if (!g) throw InvalidInput("field_energy_box: flux mode needs FluxData");
        BoxGrid::add_facet_load(grid.gamma_facets(), g->g, rhs);
        const double balance = double(u.sum()) * u.domain.cell_area() + g->total_flux;
        if (std::abs(balance) > 1e-9 * grid.bottom_area())
            throw Infeasible("field_energy_box: bottom charge does not balance the Gamma flux");
    }

    BoxFieldSolution out;
    if (mode == BoxMode::free_lateral) {
        auto mask = detail::mask_of(grid, grid.gamma_nodes());
        out.potential = detail::solve_quadratic(grid, std::move(rhs), &mask, false, "field_energy_box", log, warm);
    } else {
        out.potential = detail::solve_quadratic(grid, std::move(rhs), nullptr, true, "field_energy_box", log, warm);
    }
    out.energy = 0.5 * grid.grad_sq_integral(out.potential.v);
    return out;
}

// ---------------------------------------------------------------------------
// Harmonic building block: all-Neumann solve on a (sub-)box with zero flux on
// Gamma and prescribed bottom data (one value per bottom cell, zero mean).
// Used to restore flux compatibility after modifying u.

inline BoxFieldSolution harmonic_building_block(const BoxGrid& grid, std::span<const double> bottom_data) {
    const auto facets = grid.bottom_facets();
    if (bottom_data.size() != facets.size())
        throw InvalidInput("harmonic_building_block: bottom data size mismatch");
    std::vector<double> rhs(std::size_t(grid.node_count()), 0.0);
    BoxGrid::add_facet_load(facets, bottom_data, rhs);
    BoxFieldSolution out;
    out.potential = detail::solve_quadratic(grid, std::move(rhs), nullptr, true, "harmonic_building_block");
    out.energy = 0.5 * grid.grad_sq_integral(out.potential.v);
    return out;
}

// ---------------------------------------------------------------------------
// Discrete fields: cell-centred vectors plus their boundary facet fluxes
// (inner-normal convention).  "Discretely divergence-free" means the weak
// identity sum_c b_c.(grad w)_c vol + sum_facets (b.nu) avg(w) area = 0 for
// every nodal test function w.

struct DiscreteField {
    BoxGrid grid;
    std::vector<double> cells;        // cell-major, d components per cell
    std::vector<double> bottom_flux;  // b.nu on bottom facets (nu = inner normal)
    std::vector<double> gamma_flux;   // b.nu on gamma facets

    DiscreteField(const BoxGrid& g, std::vector<double> c, std::vector<double> bf, std::vector<double> gf)
        : grid(g), cells(std::move(c)), bottom_flux(std::move(bf)), gamma_flux(std::move(gf)) {
        if (cells.size() != std::size_t(grid.cell_count()) * grid.d)
            throw InvalidInput("DiscreteField: cell array size mismatch");
        if (bottom_flux.size() != std::size_t(grid.cells_per_layer()))
            throw InvalidInput("DiscreteField: bottom flux size mismatch");
        if (gamma_flux.size() != grid.gamma_facets().size())
            throw InvalidInput("DiscreteField: gamma flux size mismatch");
    }

    double energy() const {
        double acc = 0.0;
        for (std::int64_t c = 0; c < grid.cell_count(); ++c) {
            double g2 = 0.0;
            for (int a = 0; a < grid.d; ++a) g2 += sq(cells[std::size_t(c) * grid.d + a]);
            acc += g2;
        }
        return 0.5 * acc * grid.cell_volume();
    }

    double l2_norm() const { return std::sqrt(2.0 * energy()); }
};

/// Weak divergence residual, normalised so that exactly divergence-free
/// fields give ~1e-15 and an O(1) divergence gives O(1).
inline double divergence_residual(const DiscreteField& b) {
    const BoxGrid& grid = b.grid;
    const std::size_t n = std::size_t(grid.node_count());
    std::vector<double> r(n, 0.0);
    const int nc = 1 << grid.d;
    const double vol = grid.cell_volume();
    double coef[3];
    for (int a = 0; a < grid.d; ++a) coef[a] = (1.0 / double(1 << (grid.d - 1))) / ((a == grid.d - 1) ? grid.hz : grid.hx);
    for (std::int64_t cell = 0; cell < grid.cell_count(); ++cell)
        for (int c = 0; c < nc; ++c) {
            double t = 0.0;
            for (int a = 0; a < grid.d; ++a)
                t += (((c >> a) & 1) ? coef[a] : -coef[a]) * b.cells[std::size_t(cell) * grid.d + a];
            r[std::size_t(grid.cell_corner(cell, c))] += t * vol;
        }
    BoxGrid::add_facet_load(grid.bottom_facets(), b.bottom_flux, r);
    BoxGrid::add_facet_load(grid.gamma_facets(), b.gamma_flux, r);
    double rn = 0.0;
    for (double x : r) rn += x * x;
    rn = std::sqrt(rn);
    const double scale = b.l2_norm() * std::sqrt(grid.cell_volume()) / std::min(grid.hx, grid.hz) + 1e-300;
    return rn / scale;
}

/// Orthogonality checker: for divergence-free b and the over-relaxed v0 posed
/// with g = b.nu on Gamma, the identity
///   int (1/2)|b + grad v0|^2 = int (1/2)|b|^2 - int (1/2)|grad v0|^2
/// holds; returns the normalised defect.
inline double orthogonality_residual(const DiscreteField& b, const ScalarPotential& v0,
                                     double div_tol = 1e-8) {
    const double div = divergence_residual(b);
    if (div > div_tol)
        throw InvalidInput("orthogonality_residual: field is not divergence-free (residual " +
                           std::to_string(div) + ")");
    const BoxGrid& grid = b.grid;
    if (v0.v.size() != std::size_t(grid.node_count()))
        throw InvalidInput("orthogonality_residual: potential grid mismatch");
    double e_sum = 0.0, e_b = 0.0, e_v = 0.0;
    double grad[3];
    for (std::int64_t cell = 0; cell < grid.cell_count(); ++cell) {
        grid.cell_gradient(v0.v, cell, grad);
        double s2 = 0.0, b2 = 0.0, g2 = 0.0;
        for (int a = 0; a < grid.d; ++a) {
            const double bc = b.cells[std::size_t(cell) * grid.d + a];
            s2 += sq(bc + grad[a]);
            b2 += sq(bc);
            g2 += sq(grad[a]);
        }
        e_sum += s2;
        e_b += b2;
        e_v += g2;
    }
    const double vol = 0.5 * grid.cell_volume();
    e_sum *= vol;
    e_b *= vol;
    e_v *= vol;
    return std::abs(e_sum - (e_b - e_v)) / (1.0 + e_b);
}

// ---------------------------------------------------------------------------
// Generator of exactly divergence-free fields (d=2): the rotated midpoint
// gradient of a nodal stream function, with facet fluxes given by tangential
// stream differences.  The weak identity holds cell-by-cell for this pair.

inline DiscreteField curl_field(const BoxGrid& grid, std::span<const double> psi) {
    if (grid.d != 2) throw InvalidInput("curl_field: d=2 only");
    if (psi.size() != std::size_t(grid.node_count())) throw InvalidInput("curl_field: psi size mismatch");
    std::vector<double> cells(std::size_t(grid.cell_count()) * 2, 0.0);
    double grad[3];
    for (std::int64_t cell = 0; cell < grid.cell_count(); ++cell) {
        grid.cell_gradient(psi, cell, grad);
        cells[std::size_t(cell) * 2 + 0] = grad[1];   // b_x =  d_z psi
        cells[std::size_t(cell) * 2 + 1] = -grad[0];  // b_z = -d_x psi
    }
    std::vector<double> bf(std::size_t(grid.cells_per_layer()));
    for (int i = 0; i < grid.Nh; ++i)
        bf[std::size_t(i)] = -(psi[std::size_t(grid.node(i + 1, 0))] - psi[std::size_t(grid.node(i, 0))]) / grid.hx;
    const auto gfs = grid.gamma_facets();
    std::vector<double> gf(gfs.size(), 0.0);
    for (std::size_t f = 0; f < gfs.size(); ++f) {
        const Facet& ft = gfs[f];
        // tangential difference along the facet, oriented by the inner normal
        const double dpsi = psi[std::size_t(ft.nodes[1])] - psi[std::size_t(ft.nodes[0])];
        if (ft.axis == 0) gf[f] = ft.inner_normal_sign() * dpsi / grid.hz;   // b_x on a side face
        else gf[f] = -ft.inner_normal_sign() * dpsi / grid.hx;              // b_z on the top face
    }
    return DiscreteField(grid, std::move(cells), std::move(bf), std::move(gf));
}

} // namespace cpl

#endif // CPL_LAPLACE_HPP
