#pragma once

#include <complex>
#include <cstddef>
#include <cstring>
#include <mutex>
#include <new>

#include <fftw3.h>

#include "nfsar/errors.hpp"

namespace nfsar::detail {

// FFTW plan creation and destruction are not thread safe; execution is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class FftwBuffer {
public:
    explicit FftwBuffer(std::size_t n)
        : ptr_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (ptr_ == nullptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(ptr_); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    fftw_complex* get() { return ptr_; }

private:
    fftw_complex* ptr_;
};

// Unscaled 2D DFT of a row-major n_rows x n_cols block, in place.
// direction is FFTW_FORWARD (exp(-j...)) or FFTW_BACKWARD (exp(+j...)).
// Data is staged through fftw_malloc'd buffers so plan selection never depends
// on caller allocation alignment; with FFTW_ESTIMATE the chosen algorithm,
// and therefore the rounding, is reproducible run to run.
inline void dft2_unscaled(std::complex<double>* data, std::size_t n_rows, std::size_t n_cols,
                          int direction) {
    require(n_rows >= 1 && n_cols >= 1, "dft2_unscaled: empty transform");
    const std::size_t n = n_rows * n_cols;
    FftwBuffer in(n), out(n);

    fftw_plan plan = nullptr;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(n_rows), static_cast<int>(n_cols), in.get(),
                                out.get(), direction, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw InvariantError("dft2_unscaled: FFTW plan creation failed");

    std::memcpy(in.get(), data, n * sizeof(fftw_complex));
    fftw_execute(plan);
    std::memcpy(data, out.get(), n * sizeof(fftw_complex));

    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
}

}  // namespace nfsar::detail
