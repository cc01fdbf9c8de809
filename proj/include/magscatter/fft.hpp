#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace magscatter {

/// fftw_malloc'ed complex buffer.
class FftBuffer {
public:
    explicit FftBuffer(std::size_t n);
    std::complex<double>* data() { return data_.get(); }
    const std::complex<double>* data() const { return data_.get(); }
    std::size_t size() const { return n_; }
    std::complex<double>& operator[](std::size_t i) { return data_[i]; }
    const std::complex<double>& operator[](std::size_t i) const { return data_[i]; }
    void zero();

private:
    struct Free {
        void operator()(std::complex<double>* p) const;
    };
    std::unique_ptr<std::complex<double>[], Free> data_;
    std::size_t n_;
};

/// In-place unnormalised multidimensional complex DFT. sign -1 computes
/// sum_j x_j e^{-2 pi i j p / N}, sign +1 the conjugate kernel.
/// Plans are created with FFTW_ESTIMATE so repeated runs are bitwise reproducible.
class FftPlan {
public:
    FftPlan(const std::vector<int>& dims, int sign);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    /// Safe to call concurrently on distinct buffers allocated by FftBuffer.
    void execute(FftBuffer& buffer) const;
    std::size_t size() const { return size_; }

private:
    void* plan_ = nullptr;
    std::size_t size_ = 0;
};

}  // namespace magscatter
