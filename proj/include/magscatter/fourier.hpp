#pragma once

#include <vector>

#include "magscatter/grid.hpp"

namespace magscatter {

/// Samples of F(f)(xi) = int f(x) e^{+i x.xi} dx (kernel sign fixed at +1).
struct FourierSamples {
    std::vector<Vec> frequencies;
    std::vector<complex> values;
    int convention_sign = +1;
};

/// Riemann sum h^n sum_i f(x_i) e^{i x_i.xi} at arbitrary frequencies. Frequencies sharing
/// a last component share one partial sum over the last axis; when every frequency lies on
/// the reciprocal lattice (xi_d = pi p_d / L) a single FFT is used instead.
FourierSamples fourier(const ComplexField& field, const std::vector<Vec>& frequencies);
FourierSamples fourier(const RealField& field, const std::vector<Vec>& frequencies);

/// Transforms of several fields on one grid at the same frequencies: result[f][j].
std::vector<std::vector<complex>> fourier_many(const std::vector<const ComplexField*>& fields,
                                               const std::vector<Vec>& frequencies);

}  // namespace magscatter
