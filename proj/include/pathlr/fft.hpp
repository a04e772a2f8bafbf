#ifndef PATHLR_FFT_HPP
#define PATHLR_FFT_HPP

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <span>
#include <stdexcept>

#include "pathlr/errors.hpp"

namespace pathlr {

/// Transform-size policy: fixed-size kernel convolutions use the next
/// power of two; one-shot transforms of long arrays use the smallest
/// 5-smooth size to avoid up-to-2x zero padding.
enum class FftSizing { PowerOfTwo, Smooth };

/// Real linear convolution through zero-padded FFTs of a fixed transform
/// size.  One engine owns its FFTW plans and scratch buffers, so distinct
/// engines may be used from distinct threads; a single engine is not
/// re-entrant.
class ConvolutionEngine {
public:
    /// Smallest power of two >= n.
    static Index fft_size_for(Index n) {
        Index s = 1;
        while (s < n) s <<= 1;
        return s;
    }

    /// Smallest 2^a 3^b 5^c >= n.
    static Index smooth_size_for(Index n) {
        Index best = fft_size_for(n);
        for (Index f5 = 1; f5 < best; f5 *= 5)
            for (Index f35 = f5; f35 < best; f35 *= 3) {
                Index s = f35;
                while (s < n) s *= 2;
                best = std::min(best, s);
            }
        return best;
    }

    /// Engine able to produce linear convolutions of total output length
    /// up to `max_out_len`.
    explicit ConvolutionEngine(Index max_out_len, FftSizing sizing = FftSizing::PowerOfTwo)
        : n_(sizing == FftSizing::PowerOfTwo
                 ? fft_size_for(std::max<Index>(max_out_len, 1))
                 : smooth_size_for(std::max<Index>(max_out_len, 1))),
          nc_(n_ / 2 + 1) {
        a_ = fftw_alloc_real(static_cast<size_t>(n_));
        fa_ = fftw_alloc_complex(static_cast<size_t>(nc_));
        fk_ = fftw_alloc_complex(static_cast<size_t>(nc_));
        if (!a_ || !fa_ || !fk_) throw std::bad_alloc();
        fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), a_, fa_, FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), fa_, a_, FFTW_ESTIMATE);
        if (!fwd_ || !inv_) throw std::runtime_error("fftw plan creation failed");
    }

    ConvolutionEngine(const ConvolutionEngine&) = delete;
    ConvolutionEngine& operator=(const ConvolutionEngine&) = delete;

    ~ConvolutionEngine() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
        fftw_free(a_);
        fftw_free(fa_);
        fftw_free(fk_);
    }

    Index fft_size() const { return n_; }

    /// Number of forward/inverse transforms executed so far.
    Index transform_count() const { return transforms_; }

    /// Caches the spectrum of `kernel` for repeated use by
    /// convolve_with_kernel().
    void set_kernel(std::span<const double> kernel) {
        load(kernel);
        fftw_execute(fwd_);
        ++transforms_;
        std::memcpy(fk_, fa_, sizeof(fftw_complex) * static_cast<size_t>(nc_));
        kernel_len_ = static_cast<Index>(kernel.size());
    }

    /// out = full linear convolution of `a` with the cached kernel;
    /// out.size() must be a.size() + kernel.size() - 1.
    void convolve_with_kernel(std::span<const double> a, std::span<double> out) {
        if (kernel_len_ == 0) throw std::logic_error("kernel not set");
        const Index out_len = static_cast<Index>(a.size()) + kernel_len_ - 1;
        if (static_cast<Index>(out.size()) != out_len || out_len > n_)
            throw std::invalid_argument("convolution output size mismatch");
        load(a);
        fftw_execute(fwd_);
        const double scale = 1.0 / static_cast<double>(n_);
        for (Index i = 0; i < nc_; ++i) {
            const double re = fa_[i][0] * fk_[i][0] - fa_[i][1] * fk_[i][1];
            const double im = fa_[i][0] * fk_[i][1] + fa_[i][1] * fk_[i][0];
            fa_[i][0] = re * scale;
            fa_[i][1] = im * scale;
        }
        fftw_execute(inv_);
        transforms_ += 2;
        std::memcpy(out.data(), a_, sizeof(double) * static_cast<size_t>(out_len));
    }

    /// One-shot full linear convolution a * b.
    void convolve(std::span<const double> a, std::span<const double> b,
                  std::span<double> out) {
        set_kernel(b);
        convolve_with_kernel(a, out);
    }

private:
    void load(std::span<const double> x) {
        if (static_cast<Index>(x.size()) > n_)
            throw std::invalid_argument("input exceeds transform size");
        std::memcpy(a_, x.data(), sizeof(double) * x.size());
        std::memset(a_ + x.size(), 0, sizeof(double) * static_cast<size_t>(n_ - x.size()));
    }

    Index n_;
    Index nc_;
    Index kernel_len_ = 0;
    Index transforms_ = 0;
    double* a_;
    fftw_complex* fa_;
    fftw_complex* fk_;
    fftw_plan fwd_;
    fftw_plan inv_;
};

}  // namespace pathlr

#endif  // PATHLR_FFT_HPP
