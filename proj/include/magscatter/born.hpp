#pragma once

#include <vector>

#include "magscatter/farfield.hpp"
#include "magscatter/kernel.hpp"
#include "magscatter/potential.hpp"

namespace magscatter {

/// A_B = -k (theta + theta').F(W)(xi) - F(q~)(xi) with xi = k (theta - theta').
complex born_amplitude(const PotentialData& potential, double k, const Vec& theta, const Vec& theta_prime);

/// The W-linear part -k (theta + theta').F(W)(k (theta - theta')) alone.
complex born_magnetic_term(const PotentialData& potential, double k, const Vec& theta, const Vec& theta_prime);

/// A_B(k, -theta, theta) = -F(q~)(2k theta).
complex backscatter_born(const PotentialData& potential, double k, const Vec& theta);

/// Second-order backscattering terms. With D = div W and T = theta.W:
///   I1 = int int e^{ik theta.(y+z)} G(|y-z|) D(y) D(z)
///   I2 = 4ik  (same with D(y) T(z))
///   I3 = -4k^2 (same with T(y) T(z))
///   I4 = (same with q~(y) q~(z))
struct SecondOrderTerms {
    complex I1, I2, I3, I4;
    double regularization_eps = 0.0;  // 0: principal value plus shell term
    double pv_shell_gap = 0.0;
    double eta_max = 0.0;        // radial truncation of the frequency integral
    double tail_estimate = 0.0;  // numerator size at eta_max relative to its peak

    complex sum() const { return I1 + I2 + I3 + I4; }
};

struct SecondOrderOptions {
    double regularization_eps = 0.0;  // > 0 replaces the Plemelj split by 1/(eta^2 - k^2 - i eps)
    int nodes_per_panel = 16;
    double panel_width = 1.0;
    double eta_max = 0.0;  // 0 selects the truncation automatically
};

/// Frequency-domain evaluation
///   I = (2 pi)^{-n} int N(eta) / (|eta|^2 - k^2 - i0) d eta,  N = F(a)(k theta + eta) F(b)(k theta - eta),
/// split into a radial principal value (Gauss-Legendre panels, symmetric about |eta| = k inside
/// the gap) plus i pi / (2k) times the integral of N over the shell |eta| = k.
SecondOrderTerms second_order_fourier(const PotentialData& potential, double k, const Vec& theta,
                                      double pv_shell_gap, int angular_order,
                                      const SecondOrderOptions& options = {});

/// Largest grid per axis accepted by second_order_spatial.
inline constexpr int kSpatialOracleBudget3D = 16;
inline constexpr int kSpatialOracleBudget2D = 48;

/// Dense double sums over the grid with the lattice weights of module kernel.
SecondOrderTerms second_order_spatial(const PotentialData& potential, double k, const Vec& theta,
                                      KernelRule rule = KernelRule::truncated_spectral);

/// c0 c1 / (1 - c1); requires 0 <= c1 < 1.
double remainder_bound(double c0, double c1);

/// backscatter_born + I1 + I2 + I3 + I4.
complex improved_backscatter(const PotentialData& potential, double k, const Vec& theta, double pv_shell_gap,
                             int angular_order, const SecondOrderOptions& options = {});

struct InversionOptions {
    double taper_fraction = 0.2;   // raised-cosine roll-off over the outer part of the coverage
    double max_gap_ratio = 1.5;    // allowed gap relative to the output grid's Nyquist spacing pi / L
    int hole_fit_shells = 6;       // innermost shells used to extrapolate into |xi| < min |xi|
    int hole_fit_degree = 5;
    int hole_nodes = 8;
};

/// Band-limited reconstruction of q~ from backscattering records (theta' = -theta) through
/// F(q~)(2k theta) ~ -A(k, -theta, theta). Records must form a product of k values and
/// directions covering a hemisphere; the opposite hemisphere follows from F(q~)(-xi) = conj F(q~)(xi).
RealField invert_backscatter(const std::vector<AmplitudeRecord>& records, const Grid& output_grid,
                             const InversionOptions& options = {});

}  // namespace magscatter
