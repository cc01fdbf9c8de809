#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "magscatter/fft.hpp"
#include "magscatter/grid.hpp"

namespace magscatter {

enum class QuadratureMode { fft_convolution, dense_quadrature };

/// How the lattice weights of G_k^+ are built.
///
/// truncated_spectral: weights are the band-limited lattice samples of G_k^+ cut off at
/// distance R = sqrt(n) * 2L (beyond any pair of grid points), computed from the closed-form
/// spectrum of the truncated kernel. Spectrally accurate for smooth sources.
///
/// point_ball: h^n G_k^+(|x_i - x_j|) off the diagonal and the exact integral of G_k^+ over
/// a ball of volume h^n for the self cell. First order near the singularity.
enum class KernelRule { truncated_spectral, point_ball };

std::string to_string(QuadratureMode mode);
std::string to_string(KernelRule rule);
QuadratureMode quadrature_from_string(const std::string& name);
KernelRule kernel_rule_from_string(const std::string& name);

/// Spectrum of G_k^+ truncated to |x| <= R: integral of G(x) 1_{|x|<=R} e^{i x.xi} dx at |xi| = s.
complex truncated_green_spectrum(double k, double s, double R, int dim);

/// Integral of G_k^+ over the ball of volume h^n centred at the singularity.
complex self_cell_weight(double k, double h, int dim);

/// Discrete convolution with G_k^+ and its gradient on a fixed grid.
///
/// Component 0 of the weight tables is G, component d + 1 is dG/dx_d, so
/// convolve_with_gradient(s)[c](x_i) = sum_j w_c(i - j) s_j.
/// Tables are built once; all member functions are const and thread-safe.
class GreenKernel {
public:
    GreenKernel(const Grid& grid, double k, KernelRule rule = KernelRule::truncated_spectral);
    ~GreenKernel();
    GreenKernel(const GreenKernel&) = delete;
    GreenKernel& operator=(const GreenKernel&) = delete;

    const Grid& grid() const { return grid_; }
    double k() const { return k_; }
    KernelRule rule() const { return rule_; }

    /// Weight for lattice offset j with |j_d| <= m - 1.
    complex weight(int component, const std::array<int, 3>& offset) const;

    ComplexField convolve(const ComplexField& source, QuadratureMode mode) const;
    /// Returns {G * s, d_1 G * s, ..., d_n G * s}.
    std::vector<ComplexField> convolve_with_gradient(const ComplexField& source, QuadratureMode mode) const;

private:
    std::vector<ComplexField> run(const ComplexField& source, QuadratureMode mode, int components) const;
    std::vector<ComplexField> run_fft(const ComplexField& source, int components) const;
    std::vector<ComplexField> run_dense(const ComplexField& source, int components) const;
    std::size_t padded_index(const std::array<int, 3>& offset) const;
    void build_spectral();
    void build_point_ball();

    Grid grid_;
    double k_;
    KernelRule rule_;
    int padded_;  // 2m
    std::vector<std::vector<complex>> tables_;   // spatial weights on the (2m)^n wrap-around lattice
    std::vector<std::vector<complex>> spectra_;  // normalised DFTs of tables_
    std::unique_ptr<FftPlan> forward_;
    std::unique_ptr<FftPlan> backward_;
};

}  // namespace magscatter
