// spectral.hpp -- exact field energy and field reconstruction for the
// horizontally periodic class via per-mode harmonic extension.
//
// The charge u on the bottom torus is treated as the trigonometric
// interpolant of its cell values (sampled-symbol convention), with
//     u_hat(k) = N^{-(d-1)} sum_j u_j exp(-i k.x_j),   x_j cell centers.
// The potential extends harmonically into the slab with Neumann data u at
// x_d = 0 and Dirichlet v = 0 at x_d = L; pairing u with its own boundary
// potential gives the energy as a positive Fourier multiplier form
//     E = L^{d-1} sum_k M(k) |u_hat(k)|^2,
// with M(0) = L/2 (analytic k->0 limit) and M(k) = tanh(|k|L)/(2|k|).
#ifndef CPL_SPECTRAL_HPP
#define CPL_SPECTRAL_HPP

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "cpl/domain.hpp"
#include "cpl/fft.hpp"

namespace cpl {

namespace detail {

/// Signed mode representative in (-N/2, N/2] for index m in [0,N).
inline int signed_mode(int m, int N) { return (m > N / 2) ? m - N : m; }

/// Stable sinh(a)/cosh(b) for 0 <= a <= b (avoids overflow at large |k|L).
inline double sinh_over_cosh(double a, double b) {
    return std::exp(a - b) * (1.0 - std::exp(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

/// Stable cosh(a)/cosh(b) for 0 <= a <= b.
inline double cosh_over_cosh(double a, double b) {
    return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

} // namespace detail

struct SpectralKernel {
    DomainSpec domain;
    std::vector<double> multipliers;  // M(k) over the N^{d-1} DFT modes, flat index

    explicit SpectralKernel(const DomainSpec& dom) : domain(dom) {
        if (dom.bc != BC::periodic) throw WrongClass("SpectralKernel: periodic domain required");
        const int N = dom.N;
        const double L = dom.L;
        const double two_pi = 6.283185307179586477;
        if (dom.dh() == 1) {
            multipliers.resize(N);
            for (int m = 0; m < N; ++m) multipliers[m] = multiplier(std::abs(detail::signed_mode(m, N)) * two_pi / L, L);
        } else {
            multipliers.resize(std::size_t(N) * N);
            for (int my = 0; my < N; ++my)
                for (int mx = 0; mx < N; ++mx) {
                    const double kx = detail::signed_mode(mx, N) * two_pi / L;
                    const double ky = detail::signed_mode(my, N) * two_pi / L;
                    multipliers[std::size_t(my) * N + mx] = multiplier(std::hypot(kx, ky), L);
                }
        }
    }

    /// M(|k|): L/2 at k=0, tanh(|k|L)/(2|k|) otherwise.
    static double multiplier(double kmag, double L) {
        if (kmag == 0.0) return 0.5 * L;
        return std::tanh(kmag * L) / (2.0 * kmag);
    }
};

namespace detail {

inline std::vector<std::complex<double>> dft_of(const DomainSpec& dom, std::span<const double> bottom) {
    if (std::int64_t(bottom.size()) != dom.bottom_cells())
        throw InvalidInput("spectral: bottom array size mismatch");
    std::vector<std::complex<double>> data(bottom.size());
    for (std::size_t i = 0; i < bottom.size(); ++i) data[i] = bottom[i];
    Dft::forward(dom.dh(), dom.N, data);
    return data;
}

} // namespace detail

/// Minimal field energy over divergence-free extensions of u into the slab.
/// Overload on a raw array: unit-test bypass of the +-1 constraint.
inline double field_energy_periodic(const DomainSpec& dom, std::span<const double> bottom,
                                    const SpectralKernel* kernel = nullptr) {
    if (dom.bc != BC::periodic) throw WrongClass("field_energy_periodic: periodic domain required");
    std::optional<SpectralKernel> local;
    if (!kernel) local.emplace(dom);
    const SpectralKernel& K = kernel ? *kernel : *local;
    auto U = detail::dft_of(dom, bottom);
    const double cells = double(dom.bottom_cells());
    double acc = 0.0;
    for (std::size_t m = 0; m < U.size(); ++m) acc += K.multipliers[m] * std::norm(U[m]);
    return dom.bottom_area() * acc / (cells * cells);
}

inline double field_energy_periodic(const ChargeDensity& u, const SpectralKernel* kernel = nullptr) {
    std::vector<double> vals(u.values.begin(), u.values.end());
    return field_energy_periodic(u.domain, vals, kernel);
}

// ---------------------------------------------------------------------------
// Real-space Green convolution: phi = G * u with G_hat(k) = 2 M(k), so that
// the field energy equals (1/2) sum_j u_j phi_j h^{d-1}.  The circulant row
// g(delta) feeds the O(N^{d-1}) incremental updates of the annealer.

struct GreenTable {
    DomainSpec domain;
    std::vector<double> row;  // g at cell offset delta, flat index

    explicit GreenTable(const DomainSpec& dom) : domain(dom) {
        SpectralKernel K(dom);
        std::vector<std::complex<double>> data(K.multipliers.size());
        for (std::size_t m = 0; m < data.size(); ++m) data[m] = 2.0 * K.multipliers[m];
        Dft::backward(dom.dh(), dom.N, data);
        const double cells = double(dom.bottom_cells());
        row.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) row[i] = data[i].real() / cells;
    }

    double at(std::int64_t di, std::int64_t dj = 0) const {
        const int N = domain.N;
        const std::int64_t mi = ((di % N) + N) % N;
        if (domain.dh() == 1) return row[std::size_t(mi)];
        const std::int64_t mj = ((dj % N) + N) % N;
        return row[std::size_t(mj) * N + mi];
    }
};

inline std::vector<double> green_apply(const DomainSpec& dom, std::span<const double> bottom) {
    if (dom.bc != BC::periodic) throw WrongClass("green_apply: periodic domain required");
    SpectralKernel K(dom);
    auto data = detail::dft_of(dom, bottom);
    for (std::size_t m = 0; m < data.size(); ++m) data[m] *= 2.0 * K.multipliers[m];
    Dft::backward(dom.dh(), dom.N, data);
    std::vector<double> phi(data.size());
    const double cells = double(dom.bottom_cells());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = data[i].real() / cells;
    return phi;
}

inline std::vector<double> green_apply(const ChargeDensity& u) {
    std::vector<double> vals(u.values.begin(), u.values.end());
    return green_apply(u.domain, vals);
}

/// (1/2) sum u_j phi_j h^{d-1}; agrees with field_energy_periodic to 1e-10 rel.
inline double field_energy_from_phi(const DomainSpec& dom, std::span<const double> u,
                                    std::span<const double> phi) {
    if (u.size() != phi.size()) throw InvalidInput("field_energy_from_phi: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * phi[i];
    return 0.5 * acc * dom.cell_area();
}

// ---------------------------------------------------------------------------
// Field reconstruction b = -grad v per mode.  Vertical profile of v for k != 0
// is sinh(|k|(L-x_d)) / (|k| cosh(|k|L)); the k = 0 part is u_mean (L - x_d).

struct FieldSample {
    std::array<double, 3> b{0.0, 0.0, 0.0};  // components 0..d-2 horizontal, d-1 vertical
    double v = 0.0;
};

class PotentialField {
  public:
    explicit PotentialField(const ChargeDensity& u) : dom_(u.domain) {
        std::vector<double> vals(u.values.begin(), u.values.end());
        init(vals);
    }
    PotentialField(const DomainSpec& dom, std::span<const double> bottom) : dom_(dom) { init(bottom); }

    const DomainSpec& domain() const { return dom_; }

    /// Point evaluation; x_d must lie in (0, L].
    FieldSample at(std::span<const double> xh, double xd) const {
        if (!(xd > 0.0) || xd > dom_.L) throw InvalidInput("PotentialField: x_d outside (0, L]");
        if (int(xh.size()) != dom_.dh()) throw InvalidInput("PotentialField: point dimension mismatch");
        FieldSample out;
        const int N = dom_.N;
        const double two_pi = 6.283185307179586477;
        std::complex<double> v_acc = 0.0, bd_acc = 0.0;
        std::complex<double> bh_acc[2] = {0.0, 0.0};
        for (std::size_t m = 0; m < uhat_.size(); ++m) {
            double k[2] = {0.0, 0.0};
            if (dom_.dh() == 1) {
                k[0] = detail::signed_mode(int(m), N) * two_pi / dom_.L;
            } else {
                k[0] = detail::signed_mode(int(m % std::size_t(N)), N) * two_pi / dom_.L;
                k[1] = detail::signed_mode(int(m / std::size_t(N)), N) * two_pi / dom_.L;
            }
            const double kmag = std::hypot(k[0], k[1]);
            double prof, dprof;  // v profile and its x_d derivative
            if (kmag == 0.0) {
                prof = dom_.L - xd;
                dprof = -1.0;
            } else {
                prof = detail::sinh_over_cosh(kmag * (dom_.L - xd), kmag * dom_.L) / kmag;
                dprof = -detail::cosh_over_cosh(kmag * (dom_.L - xd), kmag * dom_.L);
            }
            double phase = 0.0;
            for (int a = 0; a < dom_.dh(); ++a) phase += k[a] * xh[a];
            const std::complex<double> e(std::cos(phase), std::sin(phase));
            const std::complex<double> base = uhat_[m] * e;
            v_acc += base * prof;
            bd_acc -= base * dprof;  // b_d = -d_d v
            for (int a = 0; a < dom_.dh(); ++a)
                bh_acc[a] -= std::complex<double>(0.0, k[a]) * base * prof;  // b_a = -d_a v
        }
        out.v = v_acc.real();
        for (int a = 0; a < dom_.dh(); ++a) out.b[a] = bh_acc[a].real();
        out.b[dom_.dh()] = bd_acc.real();
        return out;
    }

    /// d=2 fast path: v and b at all N cell centers of one height, via FFT.
    void row(double xd, std::vector<double>& v, std::vector<double>& bx, std::vector<double>& bd) const {
        if (dom_.dh() != 1) throw InvalidInput("PotentialField::row: d=2 only");
        if (!(xd > 0.0) || xd > dom_.L) throw InvalidInput("PotentialField: x_d outside (0, L]");
        const int N = dom_.N;
        const double two_pi = 6.283185307179586477;
        std::vector<std::complex<double>> vm(N), bxm(N), bdm(N);
        for (int m = 0; m < N; ++m) {
            const double k = detail::signed_mode(m, N) * two_pi / dom_.L;
            const double kmag = std::abs(k);
            double prof, dprof;
            if (kmag == 0.0) {
                prof = dom_.L - xd;
                dprof = -1.0;
            } else {
                prof = detail::sinh_over_cosh(kmag * (dom_.L - xd), kmag * dom_.L) / kmag;
                dprof = -detail::cosh_over_cosh(kmag * (dom_.L - xd), kmag * dom_.L);
            }
            vm[m] = ustd_[m] * prof;
            bxm[m] = -std::complex<double>(0.0, k) * ustd_[m] * prof;
            bdm[m] = -ustd_[m] * dprof;
        }
        Dft::backward(1, N, vm);
        Dft::backward(1, N, bxm);
        Dft::backward(1, N, bdm);
        v.resize(N); bx.resize(N); bd.resize(N);
        for (int j = 0; j < N; ++j) {
            v[j] = vm[j].real() / N;
            bx[j] = bxm[j].real() / N;
            bd[j] = bdm[j].real() / N;
        }
    }

    /// Surface potential v(., 0) at cell centers (the boundary-pairing trace).
    std::vector<double> surface_potential() const {
        const int N = dom_.N;
        const double two_pi = 6.283185307179586477;
        std::vector<std::complex<double>> vm(uhat_.size());
        for (std::size_t m = 0; m < uhat_.size(); ++m) {
            double k[2] = {0.0, 0.0};
            if (dom_.dh() == 1) {
                k[0] = detail::signed_mode(int(m), N) * two_pi / dom_.L;
            } else {
                k[0] = detail::signed_mode(int(m % std::size_t(N)), N) * two_pi / dom_.L;
                k[1] = detail::signed_mode(int(m / std::size_t(N)), N) * two_pi / dom_.L;
            }
            const double kmag = std::hypot(k[0], k[1]);
            const double prof = (kmag == 0.0) ? dom_.L : std::tanh(kmag * dom_.L) / kmag;
            vm[m] = ustd_[m] * prof;
        }
        Dft::backward(dom_.dh(), N, vm);
        std::vector<double> v(vm.size());
        const double cells = double(dom_.bottom_cells());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = vm[j].real() / cells;
        return v;
    }

  private:
    void init(std::span<const double> bottom) {
        if (dom_.bc != BC::periodic) throw WrongClass("PotentialField: periodic domain required");
        ustd_ = detail::dft_of(dom_, bottom);
        const int N = dom_.N;
        const double cells = double(dom_.bottom_cells());
        uhat_.resize(ustd_.size());
        const double pi = 3.141592653589793238;
        for (std::size_t m = 0; m < ustd_.size(); ++m) {
            // cell-center phase: x_j = (j + 1/2) h per axis
            double ph = 0.0;
            if (dom_.dh() == 1) {
                ph = -pi * detail::signed_mode(int(m), N) / double(N);
            } else {
                ph = -pi * (detail::signed_mode(int(m % std::size_t(N)), N) +
                            detail::signed_mode(int(m / std::size_t(N)), N)) / double(N);
            }
            uhat_[m] = ustd_[m] / cells * std::complex<double>(std::cos(ph), std::sin(ph));
        }
    }

    DomainSpec dom_;
    std::vector<std::complex<double>> ustd_;  // plain DFT of cell values
    std::vector<std::complex<double>> uhat_;  // cell-center convention coefficients
};

/// reconstruct_field: b = -grad v at the requested points (x', x_d).
inline std::vector<FieldSample> reconstruct_field(const ChargeDensity& u,
                                                  const std::vector<std::pair<std::array<double, 2>, double>>& points) {
    PotentialField f(u);
    std::vector<FieldSample> out;
    out.reserve(points.size());
    for (const auto& [xh, xd] : points)
        out.push_back(f.at(std::span<const double>(xh.data(), std::size_t(u.domain.dh())), xd));
    return out;
}

} // namespace cpl

#endif // CPL_SPECTRAL_HPP
