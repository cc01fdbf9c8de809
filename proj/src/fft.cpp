#include "magscatter/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace magscatter {
namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FftBuffer::FftBuffer(std::size_t n)
    : data_(static_cast<std::complex<double>*>(fftw_malloc(sizeof(std::complex<double>) * (n ? n : 1)))), n_(n) {
    if (!data_) throw std::bad_alloc();
}

void FftBuffer::Free::operator()(std::complex<double>* p) const { fftw_free(p); }

void FftBuffer::zero() {
    for (std::size_t i = 0; i < n_; ++i) data_[i] = 0.0;
}

FftPlan::FftPlan(const std::vector<int>& dims, int sign) {
    size_ = 1;
    for (int d : dims) size_ *= static_cast<std::size_t>(d);
    FftBuffer scratch(size_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                          FFTW_ESTIMATE);
    if (!plan_) throw std::runtime_error("FFTW plan creation failed");
}

FftPlan::~FftPlan() {
    if (plan_) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
}

void FftPlan::execute(FftBuffer& buffer) const {
    if (buffer.size() != size_) throw std::logic_error("FftPlan::execute: buffer size mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(buffer.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_), p, p);
}

}  // namespace magscatter
