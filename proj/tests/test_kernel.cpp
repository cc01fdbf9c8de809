#include <gtest/gtest.h>

#include <cmath>

#include "magscatter/error.hpp"
#include "magscatter/kernel.hpp"
#include "magscatter/norms.hpp"
#include "magscatter/special.hpp"
#include "support.hpp"

using namespace magscatter;
using namespace magscatter::testing;

namespace {

template <typename F>
complex simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    complex s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * (h / 3.0);
}

complex h0_oracle(double z) { return {std::cyl_bessel_j(0.0, z), std::cyl_neumann(0.0, z)}; }

/// Truncated spectrum by direct radial quadrature; r = t^2 removes the 2D logarithm.
complex spectrum_oracle(double k, double s, double R, int dim) {
    if (dim == 3)
        return simpson(
            [&](double r) {
                const double sinc = s == 0.0 ? r : std::sin(s * r) / s;
                return std::exp(complex(0.0, k * r)) * sinc;
            },
            0.0, R, 20000);
    return simpson(
        [&](double t) {
            const double r = t * t;
            if (r == 0.0) return complex(0.0);
            return complex(0.0, 0.25) * h0_oracle(k * r) * std::cyl_bessel_j(0.0, s * r) * 2.0 * kPi * r * 2.0 * t;
        },
        0.0, std::sqrt(R), 40000);
}

}  // namespace

TEST(TruncatedSpectrum, MatchesRadialQuadrature) {
    for (int dim : {2, 3})
        for (double s : {0.0, 0.3, 1.0, 1.4999, 1.5, 1.50003, 2.2, 5.0, 11.0}) {
            const double k = 1.5, R = 6.0;
            const complex a = truncated_green_spectrum(k, s, R, dim), b = spectrum_oracle(k, s, R, dim);
            EXPECT_LT(std::abs(a - b), 1e-6 * std::max(1.0, std::abs(b))) << "dim " << dim << " s " << s;
        }
}

TEST(TruncatedSpectrum, ThreeDimensionalClosedForm) {
    const double k = 2.0, R = 5.0;
    for (double s : {0.4, 1.1, 3.0, 9.0}) {
        const complex e = std::exp(complex(0.0, k * R));
        const complex closed =
            (1.0 - e * (std::cos(s * R) - complex(0.0, k) * std::sin(s * R) / s)) / (s * s - k * k);
        EXPECT_LT(std::abs(truncated_green_spectrum(k, s, R, 3) - closed), 1e-12 * std::abs(closed));
    }
}

TEST(SelfCell, MatchesBallIntegral) {
    for (double k : {0.5, 2.0, 6.0}) {
        const double h = 0.3;
        const double a3 = std::cbrt(3.0 / (4.0 * kPi)) * h;
        const complex ball3 =
            simpson([&](double r) { return r * std::exp(complex(0.0, k * r)); }, 0.0, a3, 2000);
        EXPECT_LT(std::abs(self_cell_weight(k, h, 3) - ball3), 1e-10);
        const double a2 = h / std::sqrt(kPi);
        const complex ball2 = simpson(
            [&](double t) {
                const double r = t * t;
                return r == 0.0 ? complex(0.0) : complex(0.0, 0.25) * h0_oracle(k * r) * 2.0 * kPi * r * 2.0 * t;
            },
            0.0, std::sqrt(a2), 4000);
        EXPECT_LT(std::abs(self_cell_weight(k, h, 2) - ball2), 1e-8);
    }
}

TEST(GreenKernel, FftMatchesDenseBothRules) {
    Gen gen(5);
    for (KernelRule rule : {KernelRule::truncated_spectral, KernelRule::point_ball})
        for (int dim : {2, 3}) {
            const Grid g = make_grid(dim, 3.0, dim == 3 ? 12 : 32);
            const GreenKernel K(g, 1.7, rule);
            const ComplexField f = gen.smooth_field(g);
            const auto a = K.convolve_with_gradient(f, QuadratureMode::fft_convolution);
            const auto b = K.convolve_with_gradient(f, QuadratureMode::dense_quadrature);
            for (int c = 0; c <= dim; ++c) EXPECT_LT(l2_diff(a[c], b[c]) / l2(b[c]), 1e-6) << to_string(rule);
        }
}

TEST(GreenKernel, WeightsHaveReflectionSymmetry) {
    const Grid g = make_grid(3, 2.0, 8);
    const GreenKernel K(g, 1.0);
    Gen gen(6);
    for (int t = 0; t < 30; ++t) {
        const std::array<int, 3> j{gen.integer(-7, 7), gen.integer(-7, 7), gen.integer(-7, 7)};
        const std::array<int, 3> mj{-j[0], -j[1], -j[2]};
        EXPECT_LT(std::abs(K.weight(0, j) - K.weight(0, mj)), 1e-13);
        for (int d = 1; d <= 3; ++d) EXPECT_LT(std::abs(K.weight(d, j) + K.weight(d, mj)), 1e-13);
    }
    EXPECT_THROW(K.weight(0, {8, 0, 0}), ValidationError);
    EXPECT_THROW(K.weight(4, {0, 0, 0}), ValidationError);
}

TEST(GreenKernel, FarWeightsApproachPointSamples) {
    const Grid g = make_grid(3, 4.0, 16);
    const GreenKernel K(g, 1.0);
    const double h = g.spacing();
    for (int j = 4; j <= 10; j += 3) {
        const complex w = K.weight(0, {j, 0, 0});
        const complex p = h * h * h * green(1.0, j * h, 3).value;
        EXPECT_LT(std::abs(w - p) / std::abs(p), 0.03) << j;
    }
}

TEST(GreenKernel, GreenIdentityTwoDimensions) {
    const Grid g = make_grid(2, 8.0, 128);
    ComplexField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec x = g.point(i);
        f[i] = std::exp(-dot(x, x)) * (1.0 + 0.3 * x[0]);
    }
    const GreenKernel spectral(g, 2.0);
    EXPECT_LT(helmholtz_defect(spectral.convolve(f, QuadratureMode::fft_convolution), f, 2.0), 2e-2);
    const GreenKernel ball(g, 2.0, KernelRule::point_ball);
    EXPECT_LT(helmholtz_defect(ball.convolve(f, QuadratureMode::fft_convolution), f, 2.0), 0.15);
}

TEST(GreenKernel, GradientComponentsMatchDifferences) {
    const Grid g = make_grid(3, 4.0, 32);
    Gen gen(7);
    const ComplexField f = gen.smooth_field(g);
    const GreenKernel K(g, 1.2);
    const auto parts = K.convolve_with_gradient(f, QuadratureMode::fft_convolution);
    for (int d = 0; d < 3; ++d) {
        const ComplexField fd = partial_derivative(parts[0], d);
        EXPECT_LT(l2_diff(fd, parts[d + 1]) / l2(parts[d + 1]), 0.03);
    }
}

TEST(GreenKernel, LinearAndValidated) {
    const Grid g = make_grid(2, 3.0, 16);
    Gen gen(8);
    const ComplexField a = gen.smooth_field(g), b = gen.smooth_field(g);
    const complex alpha = gen.cplx(), beta = gen.cplx();
    ComplexField mix(g);
    for (std::size_t i = 0; i < g.size(); ++i) mix[i] = alpha * a[i] + beta * b[i];
    const GreenKernel K(g, 1.0);
    const ComplexField ka = K.convolve(a, QuadratureMode::fft_convolution);
    const ComplexField kb = K.convolve(b, QuadratureMode::fft_convolution);
    const ComplexField km = K.convolve(mix, QuadratureMode::fft_convolution);
    ComplexField expect(g);
    for (std::size_t i = 0; i < g.size(); ++i) expect[i] = alpha * ka[i] + beta * kb[i];
    EXPECT_LT(l2_diff(km, expect), 1e-13 * l2(expect));

    EXPECT_THROW(GreenKernel(g, 0.0), ValidationError);
    EXPECT_THROW(K.convolve(ComplexField(make_grid(2, 3.0, 8)), QuadratureMode::fft_convolution), ValidationError);
    EXPECT_THROW(quadrature_from_string("spline"), ValidationError);
    EXPECT_EQ(quadrature_from_string("dense"), QuadratureMode::dense_quadrature);
}
