// boxgrid.hpp -- nodal grid of a box, facet enumeration and the discrete
// quadratic form.
//
// All box solvers minimise quadratic functionals built from one bilinear form
//     a(v,w) = sum_cells (grad v)_c . (grad w)_c * cell_volume,
// where (grad .)_c is the cell-midpoint gradient of the nodal values, and from
// boundary pairings of facet data g with facet-averaged node values
//     l(w; g) = sum_facets g_f * avg_f(w) * area_f.
// Affine functions are exact for this pair (the telescoping of midpoint
// gradients matches the facet-midpoint boundary rule), which gives the free
// regression tests and makes the discrete divergence theorem an identity.
#ifndef CPL_BOXGRID_HPP
#define CPL_BOXGRID_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cpl/common.hpp"

namespace cpl {

struct Facet {
    std::array<std::int32_t, 4> nodes{-1, -1, -1, -1};
    int nnodes = 0;
    double area = 0.0;
    int axis = 0;  // normal axis (d-1 for bottom/top)
    int side = 0;  // 0 = low face, 1 = high face; inner normal sign is (side ? -1 : +1)

    double inner_normal_sign() const { return side ? -1.0 : 1.0; }
};

class BoxGrid {
  public:
    int d;        // 2 or 3
    int Nh;       // horizontal cells per side
    int Mz;       // vertical cells
    double lx;    // horizontal extent
    double lz;    // vertical extent
    double hx;
    double hz;

    BoxGrid(int d_, double lx_, int Nh_, double lz_, int Mz_)
        : d(d_), Nh(Nh_), Mz(Mz_), lx(lx_), lz(lz_), hx(lx_ / Nh_), hz(lz_ / Mz_) {
        if (d != 2 && d != 3) throw InvalidInput("BoxGrid: d must be 2 or 3");
        if (Nh < 1 || Mz < 1) throw InvalidInput("BoxGrid: empty grid");
    }

    /// Cube of side l.
    static BoxGrid cube(int d_, double l, int Nh_) { return BoxGrid(d_, l, Nh_, l, Nh_); }

    int dh() const { return d - 1; }
    std::int64_t nodes_per_layer() const {
        std::int64_t n = Nh + 1;
        if (dh() == 2) n *= (Nh + 1);
        return n;
    }
    std::int64_t node_count() const { return nodes_per_layer() * (Mz + 1); }
    std::int64_t cells_per_layer() const {
        std::int64_t n = Nh;
        if (dh() == 2) n *= Nh;
        return n;
    }
    std::int64_t cell_count() const { return cells_per_layer() * Mz; }
    double cell_volume() const { return std::pow(hx, dh()) * hz; }
    double bottom_area() const { return std::pow(lx, dh()); }

    std::int32_t node(int ix, int j) const {  // d=2
        return std::int32_t(std::int64_t(j) * (Nh + 1) + ix);
    }
    std::int32_t node(int ix, int iy, int j) const {  // d=3
        return std::int32_t((std::int64_t(j) * (Nh + 1) + iy) * (Nh + 1) + ix);
    }

    // ---- facet enumerations -------------------------------------------------

    /// Bottom facets, one per bottom cell, ordered like ChargeDensity cells.
    std::vector<Facet> bottom_facets() const {
        std::vector<Facet> out;
        out.reserve(std::size_t(cells_per_layer()));
        const double area = std::pow(hx, dh());
        if (dh() == 1) {
            for (int i = 0; i < Nh; ++i) {
                Facet f;
                f.nodes = {node(i, 0), node(i + 1, 0), -1, -1};
                f.nnodes = 2;
                f.area = area;
                f.axis = 1;
                f.side = 0;
                out.push_back(f);
            }
        } else {
            for (int iy = 0; iy < Nh; ++iy)
                for (int ix = 0; ix < Nh; ++ix) {
                    Facet f;
                    f.nodes = {node(ix, iy, 0), node(ix + 1, iy, 0), node(ix, iy + 1, 0), node(ix + 1, iy + 1, 0)};
                    f.nnodes = 4;
                    f.area = area;
                    f.axis = 2;
                    f.side = 0;
                    out.push_back(f);
                }
        }
        return out;
    }

    /// Gamma facets: the lateral faces followed by the top face.  Order is
    /// deterministic: for each horizontal axis the low face then the high
    /// face, then the top.
    std::vector<Facet> gamma_facets() const {
        std::vector<Facet> out;
        if (dh() == 1) {
            for (int side = 0; side < 2; ++side) {
                const int ix = (side == 0) ? 0 : Nh;
                for (int j = 0; j < Mz; ++j) {
                    Facet f;
                    f.nodes = {node(ix, j), node(ix, j + 1), -1, -1};
                    f.nnodes = 2;
                    f.area = hz;
                    f.axis = 0;
                    f.side = side;
                    out.push_back(f);
                }
            }
            for (int i = 0; i < Nh; ++i) {
                Facet f;
                f.nodes = {node(i, Mz), node(i + 1, Mz), -1, -1};
                f.nnodes = 2;
                f.area = hx;
                f.axis = 1;
                f.side = 1;
                out.push_back(f);
            }
        } else {
            for (int axis = 0; axis < 2; ++axis)
                for (int side = 0; side < 2; ++side) {
                    const int fixed = (side == 0) ? 0 : Nh;
                    for (int j = 0; j < Mz; ++j)
                        for (int t = 0; t < Nh; ++t) {
                            Facet f;
                            auto nd = [&](int tt, int jj) {
                                return (axis == 0) ? node(fixed, tt, jj) : node(tt, fixed, jj);
                            };
                            f.nodes = {nd(t, j), nd(t + 1, j), nd(t, j + 1), nd(t + 1, j + 1)};
                            f.nnodes = 4;
                            f.area = hx * hz;
                            f.axis = axis;
                            f.side = side;
                            out.push_back(f);
                        }
                }
            for (int iy = 0; iy < Nh; ++iy)
                for (int ix = 0; ix < Nh; ++ix) {
                    Facet f;
                    f.nodes = {node(ix, iy, Mz), node(ix + 1, iy, Mz), node(ix, iy + 1, Mz), node(ix + 1, iy + 1, Mz)};
                    f.nnodes = 4;
                    f.area = hx * hx;
                    f.axis = 2;
                    f.side = 1;
                    out.push_back(f);
                }
        }
        return out;
    }

    /// Coordinates of a node (x, [y], z).
    std::array<double, 3> node_coord(std::int32_t n) const {
        std::array<double, 3> c{0.0, 0.0, 0.0};
        if (dh() == 1) {
            c[0] = double(n % (Nh + 1)) * hx;
            c[1] = double(n / (Nh + 1)) * hz;
        } else {
            c[0] = double(n % (Nh + 1)) * hx;
            c[1] = double((n / (Nh + 1)) % (Nh + 1)) * hx;
            c[2] = double(n / (std::int64_t(Nh + 1) * (Nh + 1))) * hz;
        }
        return c;
    }

    std::array<double, 3> facet_center(const Facet& f) const {
        std::array<double, 3> c{0.0, 0.0, 0.0};
        for (int a = 0; a < f.nnodes; ++a) {
            auto nc = node_coord(f.nodes[a]);
            for (int k = 0; k < 3; ++k) c[k] += nc[k];
        }
        for (int k = 0; k < 3; ++k) c[k] /= f.nnodes;
        return c;
    }

    std::vector<std::int32_t> bottom_nodes() const {
        std::vector<std::int32_t> out;
        if (dh() == 1)
            for (int i = 0; i <= Nh; ++i) out.push_back(node(i, 0));
        else
            for (int iy = 0; iy <= Nh; ++iy)
                for (int ix = 0; ix <= Nh; ++ix) out.push_back(node(ix, iy, 0));
        return out;
    }

    /// Trapezoid weights of the bottom nodes (they sum to the bottom area).
    std::vector<double> bottom_node_weights() const {
        std::vector<double> out;
        auto w1 = [&](int i) { return (i == 0 || i == Nh) ? 0.5 * hx : hx; };
        if (dh() == 1) {
            for (int i = 0; i <= Nh; ++i) out.push_back(w1(i));
        } else {
            for (int iy = 0; iy <= Nh; ++iy)
                for (int ix = 0; ix <= Nh; ++ix) out.push_back(w1(ix) * w1(iy));
        }
        return out;
    }

    std::vector<std::int32_t> gamma_nodes() const {
        std::vector<std::int32_t> out;
        std::vector<char> seen(std::size_t(node_count()), 0);
        for (const Facet& f : gamma_facets())
            for (int a = 0; a < f.nnodes; ++a)
                if (!seen[std::size_t(f.nodes[a])]) {
                    seen[std::size_t(f.nodes[a])] = 1;
                    out.push_back(f.nodes[a]);
                }
        return out;
    }

    // ---- cells and the quadratic form ---------------------------------------

    /// Corner node of cell (cx,[cy],cz): bit 0 of `corner` offsets x, bit 1
    /// offsets y (d=3), highest bit offsets z.
    std::int32_t cell_corner(std::int64_t cell, int corner) const {
        if (dh() == 1) {
            const int cx = int(cell % Nh), cz = int(cell / Nh);
            return node(cx + (corner & 1), cz + ((corner >> 1) & 1));
        }
        const int cx = int(cell % Nh);
        const int cy = int((cell / Nh) % Nh);
        const int cz = int(cell / (std::int64_t(Nh) * Nh));
        return node(cx + (corner & 1), cy + ((corner >> 1) & 1), cz + ((corner >> 2) & 1));
    }

    /// Cell-midpoint gradient of nodal values.
    void cell_gradient(std::span<const double> v, std::int64_t cell, double* grad) const {
        const int nc = 1 << d;
        const double inv = 1.0 / double(1 << (d - 1));
        double vals[8];
        for (int c = 0; c < nc; ++c) vals[c] = v[std::size_t(cell_corner(cell, c))];
        for (int a = 0; a < d; ++a) {
            const double sp = (a == d - 1) ? hz : hx;
            double acc = 0.0;
            for (int c = 0; c < nc; ++c) acc += ((c >> a) & 1) ? vals[c] : -vals[c];
            grad[a] = acc * inv / sp;
        }
    }

    /// y += A v  (the gradient form; y must be pre-sized and may hold data).
    void apply_form(std::span<const double> v, std::span<double> y) const {
        const int nc = 1 << d;
        const double inv = 1.0 / double(1 << (d - 1));
        const double vol = cell_volume();
        const std::int64_t ncells = cell_count();
        double grad[3], coef[3];
        for (int a = 0; a < d; ++a) coef[a] = inv / ((a == d - 1) ? hz : hx);
        for (std::int64_t cell = 0; cell < ncells; ++cell) {
            std::int32_t corners[8];
            double vals[8];
            for (int c = 0; c < nc; ++c) {
                corners[c] = cell_corner(cell, c);
                vals[c] = v[std::size_t(corners[c])];
            }
            for (int a = 0; a < d; ++a) {
                double acc = 0.0;
                for (int c = 0; c < nc; ++c) acc += ((c >> a) & 1) ? vals[c] : -vals[c];
                grad[a] = acc * coef[a];
            }
            for (int c = 0; c < nc; ++c) {
                double t = 0.0;
                for (int a = 0; a < d; ++a) t += (((c >> a) & 1) ? coef[a] : -coef[a]) * grad[a];
                y[std::size_t(corners[c])] += t * vol;
            }
        }
    }

    /// int |grad v|^2 by the midpoint rule (callers halve it for the energy).
    double grad_sq_integral(std::span<const double> v) const {
        const double vol = cell_volume();
        double acc = 0.0;
        double grad[3];
        const std::int64_t ncells = cell_count();
        for (std::int64_t cell = 0; cell < ncells; ++cell) {
            cell_gradient(v, cell, grad);
            double g2 = 0.0;
            for (int a = 0; a < d; ++a) g2 += grad[a] * grad[a];
            acc += g2 * vol;
        }
        return acc;
    }

    /// Facet pairing: out[node] += g_f * area_f / nnodes for each facet.
    static void add_facet_load(const std::vector<Facet>& facets, std::span<const double> g,
                               std::span<double> out) {
        if (facets.size() != g.size()) throw InvalidInput("add_facet_load: data size mismatch");
        for (std::size_t f = 0; f < facets.size(); ++f) {
            const double w = g[f] * facets[f].area / facets[f].nnodes;
            for (int a = 0; a < facets[f].nnodes; ++a) out[std::size_t(facets[f].nodes[a])] += w;
        }
    }

    static double facet_average(const Facet& f, std::span<const double> v) {
        double acc = 0.0;
        for (int a = 0; a < f.nnodes; ++a) acc += v[std::size_t(f.nodes[a])];
        return acc / f.nnodes;
    }
};

} // namespace cpl

#endif // CPL_BOXGRID_HPP
