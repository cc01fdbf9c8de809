#include "magscatter/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "magscatter/error.hpp"

namespace magscatter {
namespace {

constexpr int kSeriesTerms = 25;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct SeriesResult {
    BesselJY value;
    double scale;  // largest term magnitude, for roundoff estimates
};

SeriesResult series_jy(int order, double z) {
    const double q = 0.25 * z * z;
    const double log_half = std::log(0.5 * z);
    double j = 0.0, tail = 0.0, scale = 0.0;
    if (order == 0) {
        double term = 1.0;  // (-q)^m / (m!)^2
        double harmonic = 0.0;
        for (int m = 0; m < kSeriesTerms; ++m) {
            if (m > 0) {
                term *= -q / (double(m) * m);
                harmonic += 1.0 / m;
            }
            j += term;
            tail -= harmonic * term;  // sum (-1)^{m+1} H_m q^m/(m!)^2
            scale = std::max(scale, std::abs(term) * (1.0 + harmonic));
        }
        const double y = 2.0 / kPi * ((log_half + kEulerGamma) * j + tail);
        return {{j, y}, scale * (1.0 + std::abs(log_half))};
    }
    // order 1: (z/2) sum (-q)^m / (m! (m+1)!)
    double term = 1.0;
    double psi_sum = -2.0 * kEulerGamma + 1.0;  // psi(1) + psi(2)
    double harmonic = 0.0;
    for (int m = 0; m < kSeriesTerms; ++m) {
        if (m > 0) {
            term *= -q / (double(m) * (m + 1));
            harmonic += 1.0 / m;
            psi_sum = -2.0 * kEulerGamma + 2.0 * harmonic + 1.0 / (m + 1);
        }
        j += term;
        tail += psi_sum * term;
        scale = std::max(scale, std::abs(term) * (1.0 + std::abs(psi_sum)));
    }
    j *= 0.5 * z;
    const double y = 2.0 / kPi * log_half * j - 2.0 / (kPi * z) - 0.5 * z * tail / kPi;
    return {{j, y}, scale * (0.5 * z + 1.0) * (1.0 + std::abs(log_half)) + 2.0 / (kPi * z)};
}

struct AsymptoticResult {
    complex h;
    double last_term;
};

// H^(1)_nu(z) ~ sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} sum_k i^k a_k(nu) / z^k
AsymptoticResult asymptotic_hankel(double nu, double z) {
    const double mu = 4.0 * nu * nu;
    complex sum = 1.0;
    complex ik = 1.0;
    double a = 1.0;
    double prev = 1.0;
    double last = 0.0;
    for (int k = 1; k < 60; ++k) {
        a *= (mu - double(2 * k - 1) * (2 * k - 1)) / (8.0 * k * z);
        ik *= complex(0.0, 1.0);
        const double mag = std::abs(a);
        if (mag > prev) break;  // series started diverging; stop at smallest term
        sum += ik * a;
        prev = mag;
        last = mag;
        if (mag < 0.25 * kEps) break;
    }
    const double phase = z - 0.5 * nu * kPi - 0.25 * kPi;
    const double amp = std::sqrt(2.0 / (kPi * z));
    return {amp * std::polar(1.0, phase) * sum, amp * last};
}

void require_positive(double z, const char* what) {
    if (!(z > 0.0) || !std::isfinite(z))
        throw ValidationError(std::string(what) + ": argument must be positive and finite");
}

}  // namespace

BesselJY bessel_jy(int order, double z) {
    require_positive(z, "bessel_jy");
    if (order != 0 && order != 1) throw ValidationError("bessel_jy: only orders 0 and 1 are supported");
    if (z <= kHankelSwitch) return series_jy(order, z).value;
    const complex h = asymptotic_hankel(order, z).h;
    return {h.real(), h.imag()};
}

double bessel_j0(double z) {
    z = std::abs(z);
    if (z == 0.0) return 1.0;
    return bessel_jy(0, z).j;
}

double bessel_j1(double z) {
    const double s = z < 0.0 ? -1.0 : 1.0;
    z = std::abs(z);
    if (z == 0.0) return 0.0;
    return s * bessel_jy(1, z).j;
}

complex hankel1(double order, double z) {
    require_positive(z, "hankel1");
    if (order == 0.5) return complex(0.0, -1.0) * std::sqrt(2.0 / (kPi * z)) * std::polar(1.0, z);
    if (order != 0.0 && order != 1.0)
        throw ValidationError("hankel1: order must be 0, 0.5 or 1");
    const auto jy = bessel_jy(static_cast<int>(order), z);
    return {jy.j, jy.y};
}

GreenEval green(double k, double r, int dim) {
    if (!(k > 0.0)) throw ValidationError("green: wavenumber must be positive");
    if (!(r > 0.0)) throw ValidationError("green: r = 0 is the singular point of the kernel");
    if (dim == 3) {
        const complex v = std::polar(1.0, k * r) / (4.0 * kPi * r);
        return {v, GreenRegime::closed_form, 4.0 * kEps * std::abs(v)};
    }
    if (dim != 2) throw ValidationError("green: dimension must be 2 or 3");
    const double z = k * r;
    const complex quarter_i(0.0, 0.25);
    if (z <= kHankelSwitch) {
        const auto s = series_jy(0, z);
        return {quarter_i * complex(s.value.j, s.value.y), GreenRegime::series, 0.25 * 8.0 * kEps * s.scale};
    }
    const auto a = asymptotic_hankel(0.0, z);
    return {quarter_i * a.h, GreenRegime::asymptotic, 0.25 * (a.last_term + 4.0 * kEps * std::abs(a.h))};
}

complex green_via_hankel(double k, double r, int dim) {
    if (dim != 2 && dim != 3) throw ValidationError("green_via_hankel: dimension must be 2 or 3");
    const double nu = 0.5 * (dim - 2);
    return complex(0.0, 0.25) * std::pow(k / (2.0 * kPi * r), nu) * hankel1(nu, k * r);
}

complex green_radial_derivative(double k, double r, int dim) {
    if (!(r > 0.0)) throw ValidationError("green_radial_derivative: r must be positive");
    if (dim == 3) return std::polar(1.0, k * r) * complex(-1.0, k * r) / (4.0 * kPi * r * r);
    // d/dr (i/4) H0(kr) = -(i k / 4) H1(kr)
    return complex(0.0, -0.25 * k) * hankel1(1.0, k * r);
}

complex green_farfield_constant(double k, int dim) {
    if (!(k > 0.0)) throw ValidationError("green_farfield_constant: wavenumber must be positive");
    if (dim == 3) return 1.0 / (4.0 * kPi);
    if (dim != 2) throw ValidationError("green_farfield_constant: dimension must be 2 or 3");
    return std::polar(1.0 / std::sqrt(8.0 * kPi * k), 0.25 * kPi);
}

}  // namespace magscatter
