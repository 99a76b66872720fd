#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <new>

namespace perslab {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

} // namespace detail

template <class T>
using FftwBuffer = std::unique_ptr<T[], detail::FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    void* p = fftw_malloc(sizeof(T) * (n == 0 ? 1 : n));
    if (!p)
        throw std::bad_alloc();
    return FftwBuffer<T>(static_cast<T*>(p));
}

// Plans are made once (FFTW_ESTIMATE, so they are deterministic) and then
// executed concurrently on caller-owned fftw_malloc buffers.
class ComplexFft {
public:
    explicit ComplexFft(std::size_t n, int sign = FFTW_FORWARD) : n_(n) {
        auto in = fftw_buffer<fftw_complex>(n);
        auto out = fftw_buffer<fftw_complex>(n);
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), sign, FFTW_ESTIMATE);
    }
    ~ComplexFft() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    ComplexFft(const ComplexFft&) = delete;
    ComplexFft& operator=(const ComplexFft&) = delete;

    std::size_t size() const { return n_; }
    void execute(fftw_complex* in, fftw_complex* out) const { fftw_execute_dft(plan_, in, out); }

private:
    std::size_t n_;
    fftw_plan plan_;
};

class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        auto r = fftw_buffer<double>(n);
        auto c = fftw_buffer<fftw_complex>(n / 2 + 1);
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), r.get(), c.get(), FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), c.get(), r.get(), FFTW_ESTIMATE);
    }
    ~RealFft() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t size() const { return n_; }
    void forward(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(fwd_, in, out); }
    // Unnormalized: the result carries a factor n.
    void inverse(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(inv_, in, out); }

private:
    std::size_t n_;
    fftw_plan fwd_, inv_;
};

// Smallest 2^a 3^b 5^c >= n.
inline std::size_t fft_good_size(std::size_t n) {
    std::size_t best = 1;
    while (best < n)
        best *= 2;
    for (std::size_t p5 = 1; p5 < best; p5 *= 5)
        for (std::size_t p35 = p5; p35 < best; p35 *= 3) {
            std::size_t v = p35;
            while (v < n)
                v *= 2;
            if (v < best)
                best = v;
        }
    return best;
}

} // namespace perslab
