#pragma once

#include <string>
#include <vector>

#include "magscatter/lippmann.hpp"
#include "magscatter/quadrature.hpp"

namespace magscatter {

enum class AmplitudeMethod { integral, farfield_fit, born_first_order, born_improved };
std::string to_string(AmplitudeMethod m);

/// One value of A(k, theta', theta).
struct AmplitudeRecord {
    double k = 0.0;
    Vec theta{0.0, 0.0, 0.0};
    Vec theta_prime{0.0, 0.0, 0.0};
    complex value;
    AmplitudeMethod method = AmplitudeMethod::integral;
};

/// A(k, theta', theta) = int e^{-ik theta'.y} s[u](y) dy with u = u0 + u_sc and
/// s[u] = i (div W) u + 2i W.grad u - q~ u. Uses the gradient carried by the solution
/// (central differences of u_sc when none is stored).
std::vector<AmplitudeRecord> amplitude_integral(const ScatteringSolution& solution, const PotentialData& potential,
                                                const std::vector<Vec>& theta_primes);

struct FarfieldFitOptions {
    double tail_tolerance = 1e-6;  // max |V|, |W| beyond the smallest radius, relative to the peak
};

struct FarfieldFit {
    complex amplitude;
    double fit_residual = 0.0;  // relative RMS misfit of the 1/r expansion
    std::vector<double> radii;
    std::vector<complex> normalized;  // u_sc / (c_n e^{ikr} r^{-(n-1)/2}) per radius
};

/// Fits a0 + a1/r (+ a2/r^2 with four or more radii) to the normalised scattered field
/// along x = r theta' and returns a0. Radii must lie in (0, 0.8 L].
FarfieldFit farfield_fit_detail(const ScatteringSolution& solution, const PotentialData& potential, double k,
                                const std::vector<double>& radii, const Vec& theta_prime,
                                const FarfieldFitOptions& options = {});
complex farfield_fit(const ScatteringSolution& solution, const PotentialData& potential, double k,
                     const std::vector<double>& radii, const Vec& theta_prime,
                     const FarfieldFitOptions& options = {});

/// Multilinear interpolation of f(x) e^{-ik|x|} at x, multiplied back by e^{ik|x|}.
/// Interpolating the demodulated field keeps the outgoing phase exact.
complex interpolate_outgoing(const ComplexField& f, double k, const Vec& x);

/// r^{(n-1)/2} times the weighted RMS over directions of |d f/dr - ik f| at |x| = radius.
double sommerfeld_residual(const ComplexField& field, double k, double radius, const DirectionSet& directions);

/// Log-log slope of |f| along the ray r theta' over the given radii, negated, so an
/// outgoing wave in R^n gives (n-1)/2.
double radial_decay_exponent(const ComplexField& field, double k, const std::vector<double>& radii,
                             const Vec& theta_prime);

}  // namespace magscatter
