// fft.hpp -- thin FFTW wrapper for the 1-d/2-d complex DFTs used by the
// spectral module.  Plans are cached per (rank, size, sign) and created under
// a lock (FFTW planning is not thread-safe); FFTW_UNALIGNED keeps the plans
// valid for any caller-provided buffers.
#ifndef CPL_FFT_HPP
#define CPL_FFT_HPP

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "cpl/common.hpp"

namespace cpl {

class Dft {
  public:
    /// Unnormalised forward DFT (sign -1) of an N^rank cube, rank in {1,2}.
    static void forward(int rank, int n, std::vector<std::complex<double>>& data) {
        run(rank, n, FFTW_FORWARD, data);
    }

    /// Unnormalised backward DFT (sign +1).  Divide by N^rank for an inverse.
    static void backward(int rank, int n, std::vector<std::complex<double>>& data) {
        run(rank, n, FFTW_BACKWARD, data);
    }

  private:
    static void run(int rank, int n, int sign, std::vector<std::complex<double>>& data) {
        const std::size_t total = (rank == 1) ? std::size_t(n) : std::size_t(n) * n;
        if (data.size() != total) throw InvalidInput("Dft: buffer size mismatch");
        fftw_plan plan = cached_plan(rank, n, sign);
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(plan, p, p);
    }

    static fftw_plan cached_plan(int rank, int n, int sign) {
        static std::mutex mtx;
        static std::map<std::tuple<int, int, int>, fftw_plan> cache;
        std::lock_guard<std::mutex> lock(mtx);
        auto key = std::make_tuple(rank, n, sign);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        std::vector<std::complex<double>> scratch((rank == 1) ? std::size_t(n) : std::size_t(n) * n);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = (rank == 1)
            ? fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
            : fftw_plan_dft_2d(n, n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw Error("Dft: fftw plan creation failed");
        cache.emplace(key, plan);
        return plan;
    }
};

} // namespace cpl

#endif // CPL_FFT_HPP
