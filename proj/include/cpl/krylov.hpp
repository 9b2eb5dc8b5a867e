// krylov.hpp -- conjugate residual iteration for the SPD (or semidefinite,
// mean-pinned) systems assembled from the box quadratic form.  CR minimises
// the residual 2-norm over the Krylov space, so the logged residuals are
// nonincreasing; cost per iteration is one operator application.
#ifndef CPL_KRYLOV_HPP
#define CPL_KRYLOV_HPP

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "cpl/common.hpp"

namespace cpl {

struct KrylovOptions {
    double rel_tol = 1e-10;
    std::int64_t max_iters = 100000;
    bool pin_mean = false;              // project out constants (pure-Neumann systems)
    std::ostream* log = nullptr;        // line-oriented "iter residual" pairs
    std::vector<double>* residual_history = nullptr;
};

struct KrylovResult {
    std::int64_t iterations = 0;
    double residual = 0.0;   // final |r| / |rhs|
    bool converged = false;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void remove_mean(std::span<double> v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= double(v.size());
    for (double& x : v) x -= m;
}

} // namespace detail

/// Solve A x = rhs with A given as y = A(x) (must be symmetric positive
/// (semi)definite on the admissible subspace).  `x` carries the warm start.
inline KrylovResult conjugate_residual(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                                       std::span<const double> rhs, std::span<double> x,
                                       const KrylovOptions& opt = {}) {
    const std::size_t n = rhs.size();
    std::vector<double> r(n), p(n), Ar(n), Ap(n), scratch(n);

    auto matvec = [&](std::span<const double> in, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        apply(in, out);
        if (opt.pin_mean) detail::remove_mean(out);
    };

    const double rhs_norm = std::sqrt(detail::dot(rhs, rhs));
    KrylovResult res;
    if (rhs_norm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        res.converged = true;
        return res;
    }

    if (opt.pin_mean) detail::remove_mean(x);
    matvec(x, scratch);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - scratch[i];
    if (opt.pin_mean) detail::remove_mean(r);
    p = r;
    matvec(r, Ar);
    Ap = Ar;

    double r_dot_Ar = detail::dot(r, Ar);
    double rel = std::sqrt(detail::dot(r, r)) / rhs_norm;
    for (std::int64_t it = 0; it < opt.max_iters && rel > opt.rel_tol; ++it) {
        const double ApAp = detail::dot(Ap, Ap);
        if (ApAp == 0.0 || r_dot_Ar == 0.0) break;
        const double alpha = r_dot_Ar / ApAp;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        matvec(r, Ar);
        const double r_dot_Ar_next = detail::dot(r, Ar);
        const double beta = r_dot_Ar_next / r_dot_Ar;
        r_dot_Ar = r_dot_Ar_next;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = r[i] + beta * p[i];
            Ap[i] = Ar[i] + beta * Ap[i];
        }
        rel = std::sqrt(detail::dot(r, r)) / rhs_norm;
        res.iterations = it + 1;
        if (opt.log) (*opt.log) << res.iterations << ' ' << rel << '\n';
        if (opt.residual_history) opt.residual_history->push_back(rel);
    }
    if (opt.pin_mean) detail::remove_mean(x);
    res.residual = rel;
    res.converged = (rel <= opt.rel_tol);
    return res;
}

} // namespace cpl

#endif // CPL_KRYLOV_HPP
