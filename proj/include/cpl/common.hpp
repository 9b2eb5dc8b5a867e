// common.hpp -- error types, deterministic RNG helpers, small numeric utilities
#ifndef CPL_COMMON_HPP
#define CPL_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpl {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad argument values, violated preconditions.
struct InvalidInput : Error {
    using Error::Error;
};

/// Operation posed on the wrong boundary class.
struct WrongClass : Error {
    using Error::Error;
};

/// Constraint set empty (flux imbalance, odd cell count with zero_flux, ...).
struct Infeasible : Error {
    using Error::Error;
};

/// Iterative solve did not reach its tolerance.
struct ConvergenceFailure : Error {
    double residual;
    ConvergenceFailure(const std::string& msg, double res)
        : Error(msg + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

// ---------------------------------------------------------------------------
// RNG. mt19937_64 raw bits only; distributions are hand-rolled so that
// results are identical across standard libraries (seed contract).

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {
        for (int i = 0; i < 8; ++i) next_u64();
    }

    std::uint64_t next_u64() {
        // xorshift* generator; tiny, deterministic, good enough for sampling
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545f4914f6cdd1dull;
    }

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [a,b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller (deterministic, no cached spare).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    /// Derived stream for replica/worker `index`.
    Rng split(std::uint64_t index) const {
        return Rng(s_ ^ (0x9e3779b97f4a7c15ull * (index + 1)));
    }

  private:
    std::uint64_t s_;
};

// ---------------------------------------------------------------------------
// Small fitting helpers shared by experiments and tests.

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;     // rms residual of the fit
    double correlation = 0.0;  // Pearson r of (x,y)
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidInput("fit_line: need >= 2 points");
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / double(n), my = sy / double(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidInput("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / double(n));
    f.correlation = (syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
    return f;
}

/// Log-log power-law fit y ~ c * x^p. Requires positive data.
inline LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0) throw InvalidInput("fit_loglog: nonpositive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly);
}

inline double sq(double v) { return v * v; }

} // namespace cpl

#endif // CPL_COMMON_HPP
