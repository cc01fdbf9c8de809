#include "magscatter/kernel.hpp"

#include <cmath>

#include "magscatter/error.hpp"
#include "magscatter/parallel.hpp"
#include "magscatter/special.hpp"

namespace magscatter {
namespace {

/// Padding factor of the lattice on which the truncated spectrum is sampled.
constexpr int kSpectralOversampling = 3;

double sinc(double y) { return std::abs(y) < 1e-8 ? 1.0 - y * y / 6.0 : std::sin(y) / y; }

/// (e^{i x R} - 1) / x, smooth through x = 0.
complex phase_quotient(double x, double R) {
    const double y = x * R;
    return R * complex(-std::sin(0.5 * y) * sinc(0.5 * y), sinc(y));
}

complex spectrum_3d(double k, double s, double R) {
    if (s == 0.0) {
        const complex e = std::exp(complex(0.0, k * R));
        return (e * complex(1.0, -k * R) - 1.0) / (k * k);
    }
    // (1/s) int_0^R e^{ikr} sin(sr) dr
    return -0.5 * (phase_quotient(k + s, R) - phase_quotient(k - s, R)) / s;
}

complex spectrum_2d_raw(double k, double s, double R, complex H0, complex H1) {
    const double sR = s * R;
    const complex bracket = s * bessel_j1(sR) * H0 - k * bessel_j0(sR) * H1;
    return (1.0 + complex(0.0, 0.5 * kPi * R) * bracket) / (s * s - k * k);
}

}  // namespace

std::string to_string(QuadratureMode mode) {
    return mode == QuadratureMode::fft_convolution ? "fft" : "dense";
}

std::string to_string(KernelRule rule) {
    return rule == KernelRule::truncated_spectral ? "truncated_spectral" : "point_ball";
}

QuadratureMode quadrature_from_string(const std::string& name) {
    if (name == "fft" || name == "fft_convolution") return QuadratureMode::fft_convolution;
    if (name == "dense" || name == "dense_quadrature") return QuadratureMode::dense_quadrature;
    throw ValidationError("unknown quadrature mode '" + name + "' (expected fft or dense)");
}

KernelRule kernel_rule_from_string(const std::string& name) {
    if (name == "truncated_spectral") return KernelRule::truncated_spectral;
    if (name == "point_ball") return KernelRule::point_ball;
    throw ValidationError("unknown kernel rule '" + name + "' (expected truncated_spectral or point_ball)");
}

complex truncated_green_spectrum(double k, double s, double R, int dim) {
    if (!(k > 0.0) || !(R > 0.0) || s < 0.0) throw ValidationError("truncated_green_spectrum: need k > 0, R > 0, s >= 0");
    if (dim == 3) return spectrum_3d(k, s, R);
    if (dim != 2) throw ValidationError("truncated_green_spectrum: dim must be 2 or 3");
    const complex H0 = hankel1(0.0, k * R);
    const complex H1 = hankel1(1.0, k * R);
    // Removable singularity at s = k: interpolate across a window of width 2e-3 / R.
    const double gap = 1e-3 / R;
    if (std::abs(s - k) < gap) {
        const complex lo = spectrum_2d_raw(k, k - gap, R, H0, H1);
        const complex hi = spectrum_2d_raw(k, k + gap, R, H0, H1);
        const double t = (s - (k - gap)) / (2.0 * gap);
        return (1.0 - t) * lo + t * hi;
    }
    return spectrum_2d_raw(k, s, R, H0, H1);
}

complex self_cell_weight(double k, double h, int dim) {
    if (dim == 3) {
        const double a = std::cbrt(3.0 / (4.0 * kPi)) * h;
        const complex e = std::exp(complex(0.0, k * a));
        return (e * complex(1.0, -k * a) - 1.0) / (k * k);
    }
    const double a = h / std::sqrt(kPi);
    return complex(0.0, kPi * a / (2.0 * k)) * hankel1(1.0, k * a) - 1.0 / (k * k);
}

GreenKernel::GreenKernel(const Grid& grid, double k, KernelRule rule)
    : grid_(grid), k_(k), rule_(rule), padded_(2 * grid.points_per_axis()) {
    if (!(k > 0.0)) throw ValidationError("GreenKernel: k must be positive");
    const int n = grid_.dim();
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(padded_);
    tables_.assign(n + 1, std::vector<complex>(total, complex(0.0)));
    if (rule_ == KernelRule::truncated_spectral)
        build_spectral();
    else
        build_point_ball();

    std::vector<int> dims(n, padded_);
    forward_ = std::make_unique<FftPlan>(dims, -1);
    backward_ = std::make_unique<FftPlan>(dims, +1);
    const double norm = 1.0 / static_cast<double>(total);
    FftBuffer buf(total);
    for (const auto& table : tables_) {
        for (std::size_t i = 0; i < total; ++i) buf[i] = table[i];
        forward_->execute(buf);
        std::vector<complex> spec(total);
        for (std::size_t i = 0; i < total; ++i) spec[i] = buf[i] * norm;
        spectra_.push_back(std::move(spec));
    }
}

GreenKernel::~GreenKernel() = default;

std::size_t GreenKernel::padded_index(const std::array<int, 3>& offset) const {
    std::size_t idx = 0;
    for (int d = 0; d < grid_.dim(); ++d) {
        int j = offset[d] % padded_;
        if (j < 0) j += padded_;
        idx = idx * padded_ + static_cast<std::size_t>(j);
    }
    return idx;
}

complex GreenKernel::weight(int component, const std::array<int, 3>& offset) const {
    const int m = grid_.points_per_axis();
    if (component < 0 || component > grid_.dim()) throw ValidationError("GreenKernel::weight: bad component");
    for (int d = 0; d < grid_.dim(); ++d)
        if (std::abs(offset[d]) > m - 1) throw ValidationError("GreenKernel::weight: offset outside the grid span");
    return tables_[component][padded_index(offset)];
}

void GreenKernel::build_point_ball() {
    const int n = grid_.dim();
    const int m = grid_.points_per_axis();
    const double h = grid_.spacing();
    const double vol = grid_.cell_volume();
    const std::size_t total = tables_[0].size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::array<int, 3> off{0, 0, 0};
        std::size_t rest = idx;
        bool inside = true;
        for (int d = n - 1; d >= 0; --d) {
            int j = static_cast<int>(rest % padded_);
            rest /= padded_;
            if (j >= m) j -= padded_;
            if (j == -m) inside = false;
            off[d] = j;
        }
        if (!inside) continue;
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) r2 += double(off[d]) * off[d];
        if (r2 == 0.0) {
            tables_[0][idx] = self_cell_weight(k_, h, n);
            continue;
        }
        const double r = std::sqrt(r2) * h;
        tables_[0][idx] = vol * green(k_, r, n).value;
        const complex dG = green_radial_derivative(k_, r, n);
        for (int d = 0; d < n; ++d) tables_[d + 1][idx] = vol * dG * (off[d] * h / r);
    }
}

void GreenKernel::build_spectral() {
    const int n = grid_.dim();
    const int m = grid_.points_per_axis();
    const double h = grid_.spacing();
    const int M = kSpectralOversampling * m;
    const double R = std::sqrt(double(n)) * 2.0 * grid_.half_width();
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(M);

    auto freq_index = [&](std::size_t idx, std::array<int, 3>& p) {
        for (int d = n - 1; d >= 0; --d) {
            int j = static_cast<int>(idx % M);
            idx /= M;
            p[d] = j >= M / 2 ? j - M : j;
        }
    };
    const double dxi = 2.0 * kPi / (M * h);
    std::vector<complex> spectrum(total);
    parallel_for(total, [&](std::size_t b, std::size_t e) {
        std::array<int, 3> p{0, 0, 0};
        for (std::size_t i = b; i < e; ++i) {
            freq_index(i, p);
            double s2 = 0.0;
            for (int d = 0; d < n; ++d) s2 += double(p[d]) * p[d];
            spectrum[i] = truncated_green_spectrum(k_, std::sqrt(s2) * dxi, R, n);
        }
    });

    FftPlan plan(std::vector<int>(n, M), -1);
    FftBuffer buf(total);
    const double norm = 1.0 / static_cast<double>(total);
    for (int c = 0; c <= n; ++c) {
        std::array<int, 3> p{0, 0, 0};
        for (std::size_t i = 0; i < total; ++i) {
            if (c == 0) {
                buf[i] = spectrum[i];
                continue;
            }
            freq_index(i, p);
            const int pc = p[c - 1];
            buf[i] = pc == -M / 2 ? complex(0.0) : complex(0.0, -pc * dxi) * spectrum[i];
        }
        plan.execute(buf);
        // Copy offsets |j_d| <= m - 1 into the 2m wrap-around table.
        std::array<int, 3> j{0, 0, 0};
        const std::size_t span = static_cast<std::size_t>(std::pow(2 * m - 1, n) + 0.5);
        for (std::size_t t = 0; t < span; ++t) {
            std::size_t rest = t;
            std::size_t src = 0;
            for (int d = n - 1; d >= 0; --d) {
                j[d] = static_cast<int>(rest % (2 * m - 1)) - (m - 1);
                rest /= (2 * m - 1);
            }
            for (int d = 0; d < n; ++d) src = src * M + static_cast<std::size_t>(j[d] < 0 ? j[d] + M : j[d]);
            tables_[c][padded_index(j)] = buf[src] * norm;
        }
    }
}

std::vector<ComplexField> GreenKernel::run(const ComplexField& source, QuadratureMode mode, int components) const {
    require_same_grid(grid_, source.grid(), "GreenKernel::convolve");
    return mode == QuadratureMode::fft_convolution ? run_fft(source, components) : run_dense(source, components);
}

ComplexField GreenKernel::convolve(const ComplexField& source, QuadratureMode mode) const {
    return std::move(run(source, mode, 1).front());
}

std::vector<ComplexField> GreenKernel::convolve_with_gradient(const ComplexField& source, QuadratureMode mode) const {
    return run(source, mode, grid_.dim() + 1);
}

std::vector<ComplexField> GreenKernel::run_fft(const ComplexField& source, int components) const {
    const std::size_t total = tables_[0].size();
    FftBuffer input(total);
    input.zero();
    for (std::size_t i = 0; i < source.size(); ++i) input[padded_index(grid_.multi_index(i))] = source[i];
    forward_->execute(input);

    std::vector<ComplexField> out(components, ComplexField(grid_));
    FftBuffer work(total);
    for (int c = 0; c < components; ++c) {
        const auto& spec = spectra_[c];
        for (std::size_t i = 0; i < total; ++i) work[i] = input[i] * spec[i];
        backward_->execute(work);
        for (std::size_t i = 0; i < source.size(); ++i) out[c][i] = work[padded_index(grid_.multi_index(i))];
    }
    return out;
}

std::vector<ComplexField> GreenKernel::run_dense(const ComplexField& source, int components) const {
    const std::size_t N = source.size();
    std::vector<std::array<int, 3>> idx(N);
    for (std::size_t i = 0; i < N; ++i) idx[i] = grid_.multi_index(i);
    std::vector<ComplexField> out(components, ComplexField(grid_));
    parallel_for(N, [&](std::size_t b, std::size_t e) {
        std::vector<complex> acc(components);
        for (std::size_t i = b; i < e; ++i) {
            std::fill(acc.begin(), acc.end(), complex(0.0));
            for (std::size_t j = 0; j < N; ++j) {
                const complex s = source[j];
                if (s == complex(0.0)) continue;
                const std::array<int, 3> off{idx[i][0] - idx[j][0], idx[i][1] - idx[j][1], idx[i][2] - idx[j][2]};
                const std::size_t w = padded_index(off);
                for (int c = 0; c < components; ++c) acc[c] += tables_[c][w] * s;
            }
            for (int c = 0; c < components; ++c) out[c][i] = acc[c];
        }
    });
    return out;
}

}  // namespace magscatter
