#pragma once

#include "magscatter/grid.hpp"

namespace magscatter {

/// Argument above which the large-argument Hankel expansion replaces the power series.
inline constexpr double kHankelSwitch = 12.0;
inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kPi = 3.14159265358979323846;

struct BesselJY {
    double j = 0.0;
    double y = 0.0;
};

/// J_n(z) and Y_n(z) for integer order n in {0, 1} and z > 0.
BesselJY bessel_jy(int order, double z);

/// J_0 and J_1 for any real z >= 0 (no logarithmic branch involved).
double bessel_j0(double z);
double bessel_j1(double z);

/// Hankel function of the first kind H^(1)_nu(z) = J_nu(z) + i Y_nu(z) for nu in {0, 0.5, 1}.
complex hankel1(double order, double z);

enum class GreenRegime { series, closed_form, asymptotic };

struct GreenEval {
    complex value;
    GreenRegime regime = GreenRegime::closed_form;
    double estimated_abs_error = 0.0;
};

/// Outgoing Helmholtz kernel G_k^+(r): e^{ikr}/(4 pi r) in 3D, (i/4) H^(1)_0(kr) in 2D.
GreenEval green(double k, double r, int dim);

/// Same kernel through the dimension-generic Hankel representation
/// (i/4) (k / (2 pi r))^{(n-2)/2} H^(1)_{(n-2)/2}(kr).
complex green_via_hankel(double k, double r, int dim);

/// Radial derivative dG/dr.
complex green_radial_derivative(double k, double r, int dim);

/// Coefficient c_n k^{(n-3)/2} of e^{ik|x|} / |x|^{(n-1)/2} in the far field of G_k^+.
complex green_farfield_constant(double k, int dim);

}  // namespace magscatter
