#include "magscatter/farfield.hpp"

#include <algorithm>
#include <cmath>

#include "magscatter/error.hpp"
#include "magscatter/special.hpp"

namespace magscatter {
namespace {

/// Solves the small dense system A x = b (row-major, n x n) by partial pivoting.
std::vector<complex> solve_small(std::vector<double> A, std::vector<complex> b, int n) {
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r * n + c]) > std::abs(A[piv * n + c])) piv = r;
        if (A[piv * n + c] == 0.0) throw NumericalError("singular least-squares system", "fit_pivot", 0.0);
        for (int j = 0; j < n; ++j) std::swap(A[c * n + j], A[piv * n + j]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < n; ++r) {
            const double f = A[r * n + c] / A[c * n + c];
            for (int j = c; j < n; ++j) A[r * n + j] -= f * A[c * n + j];
            b[r] -= f * b[c];
        }
    }
    std::vector<complex> x(n);
    for (int r = n - 1; r >= 0; --r) {
        complex s = b[r];
        for (int j = r + 1; j < n; ++j) s -= A[r * n + j] * x[j];
        x[r] = s / A[r * n + r];
    }
    return x;
}

void check_radius(const Grid& g, double r) {
    if (!(r > 0.0) || r > 0.8 * g.half_width() + 1e-12)
        throw ValidationError("radius " + std::to_string(r) + " outside (0, 0.8 * half_width]");
}

Vec along(const Vec& dir, double r) { return {r * dir[0], r * dir[1], r * dir[2]}; }

}  // namespace

std::string to_string(AmplitudeMethod m) {
    switch (m) {
        case AmplitudeMethod::integral: return "integral";
        case AmplitudeMethod::farfield_fit: return "farfield_fit";
        case AmplitudeMethod::born_first_order: return "born_first_order";
        case AmplitudeMethod::born_improved: return "born_improved";
    }
    return "unknown";
}

std::vector<AmplitudeRecord> amplitude_integral(const ScatteringSolution& solution, const PotentialData& potential,
                                                const std::vector<Vec>& theta_primes) {
    const Grid& g = solution.grid;
    require_same_grid(g, potential.grid, "amplitude_integral");
    if (!solution.converged())
        throw ValidationError("amplitude_integral: solution not converged (linear residual " +
                              std::to_string(solution.linear_residual) + ")");
    std::vector<AmplitudeRecord> out;
    for (const Vec& tp : theta_primes) {
        if (std::abs(norm(tp) - 1.0) > 1e-12) throw ValidationError("theta' must be a unit vector");
        out.push_back({solution.wave.k, solution.wave.theta, tp, complex(0.0), AmplitudeMethod::integral});
    }
    if (potential.is_zero()) return out;

    const FieldPair inc = incident_pair(g, solution.wave);
    std::vector<ComplexField> grad = solution.grad_u_sc;
    if (grad.empty())
        for (int d = 0; d < g.dim(); ++d) grad.push_back(partial_derivative(solution.u_sc, d));
    const complex I(0.0, 1.0);
    std::vector<complex> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const complex u = inc.value[i] + solution.u_sc[i];
        complex wg = 0.0;
        if (potential.has_magnetic())
            for (int d = 0; d < g.dim(); ++d) wg += potential.W[d][i] * (inc.gradient[d][i] + grad[d][i]);
        s[i] = I * potential.divW[i] * u + 2.0 * I * wg - potential.q_tilde[i] * u;
    }
    const double k = solution.wave.k, vol = g.cell_volume();
    for (auto& rec : out) {
        complex acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            acc += std::exp(complex(0.0, -k * dot(rec.theta_prime, g.point(i)))) * s[i];
        rec.value = acc * vol;
    }
    return out;
}

complex interpolate_outgoing(const ComplexField& f, double k, const Vec& x) {
    const Grid& g = f.grid();
    const int n = g.dim(), m = g.points_per_axis();
    const double h = g.spacing(), L = g.half_width();
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int d = 0; d < n; ++d) {
        const double t = (x[d] + L) / h - 0.5;
        int i0 = static_cast<int>(std::floor(t));
        if (i0 < 0 || i0 + 1 > m - 1) throw ValidationError("interpolation point outside the grid interior");
        base[d] = i0;
        frac[d] = t - i0;
    }
    complex acc = 0.0;
    for (int corner = 0; corner < (1 << n); ++corner) {
        std::array<int, 3> idx = base;
        double w = 1.0;
        for (int d = 0; d < n; ++d) {
            const int bit = (corner >> d) & 1;
            idx[d] += bit;
            w *= bit ? frac[d] : 1.0 - frac[d];
        }
        if (w == 0.0) continue;
        const std::size_t li = g.linear_index(idx);
        acc += w * f[li] * std::exp(complex(0.0, -k * norm(g.point(li))));
    }
    return acc * std::exp(complex(0.0, k * norm(x)));
}

FarfieldFit farfield_fit_detail(const ScatteringSolution& solution, const PotentialData& potential, double k,
                                const std::vector<double>& radii, const Vec& theta_prime,
                                const FarfieldFitOptions& options) {
    const Grid& g = solution.grid;
    require_same_grid(g, potential.grid, "farfield_fit");
    if (radii.size() < 3) throw ValidationError("farfield_fit: at least 3 radii required");
    if (!(k > 0.0)) throw ValidationError("farfield_fit: k must be positive");
    if (std::abs(norm(theta_prime) - 1.0) > 1e-12) throw ValidationError("theta' must be a unit vector");
    for (double r : radii) check_radius(g, r);
    const double rmin = *std::min_element(radii.begin(), radii.end());

    FarfieldFit fit;
    fit.radii = radii;
    if (potential.is_zero()) {
        fit.normalized.assign(radii.size(), complex(0.0));
        return fit;
    }
    double peak = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double a = std::abs(potential.V[i]);
        for (const auto& w : potential.W) a = std::max(a, std::abs(w[i]));
        peak = std::max(peak, a);
        if (norm(g.point(i)) >= rmin) tail = std::max(tail, a);
    }
    if (tail > options.tail_tolerance * peak)
        throw ValidationError("farfield_fit: potential tail beyond the smallest radius is " +
                              std::to_string(tail / peak) + " of its peak; use larger radii or a larger box");

    const int n = g.dim();
    const complex c = green_farfield_constant(k, n);
    for (double r : radii) {
        const complex u = interpolate_outgoing(solution.u_sc, k, along(theta_prime, r));
        fit.normalized.push_back(u * std::pow(r, 0.5 * (n - 1)) / (c * std::exp(complex(0.0, k * r))));
    }
    const int p = radii.size() >= 4 ? 3 : 2;
    std::vector<double> A(p * p, 0.0);
    std::vector<complex> b(p, 0.0);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        std::vector<double> basis(p);
        for (int j = 0; j < p; ++j) basis[j] = std::pow(radii[i], -j);
        for (int a = 0; a < p; ++a) {
            b[a] += basis[a] * fit.normalized[i];
            for (int bb = 0; bb < p; ++bb) A[a * p + bb] += basis[a] * basis[bb];
        }
    }
    const std::vector<complex> coef = solve_small(A, b, p);
    fit.amplitude = coef[0];
    double misfit = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        complex model = 0.0;
        for (int j = 0; j < p; ++j) model += coef[j] * std::pow(radii[i], -j);
        misfit += std::norm(model - fit.normalized[i]);
        scale += std::norm(fit.normalized[i]);
    }
    fit.fit_residual = scale > 0.0 ? std::sqrt(misfit / scale) : 0.0;
    return fit;
}

complex farfield_fit(const ScatteringSolution& solution, const PotentialData& potential, double k,
                     const std::vector<double>& radii, const Vec& theta_prime, const FarfieldFitOptions& options) {
    return farfield_fit_detail(solution, potential, k, radii, theta_prime, options).amplitude;
}

double sommerfeld_residual(const ComplexField& field, double k, double radius, const DirectionSet& directions) {
    const Grid& g = field.grid();
    check_radius(g, radius);
    if (directions.directions.empty()) throw ValidationError("sommerfeld_residual: empty direction set");
    const double step = g.spacing();
    if (radius - 2.0 * step <= 0.0) throw ValidationError("sommerfeld_residual: radius too small for differencing");
    // With f = v e^{ikr}: df/dr - ik f = e^{ikr} dv/dr, so difference the smooth envelope v.
    auto envelope = [&](const Vec& dir, double r) {
        return interpolate_outgoing(field, k, along(dir, r)) * std::exp(complex(0.0, -k * r));
    };
    double acc = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < directions.directions.size(); ++i) {
        const Vec& d = directions.directions[i];
        const complex dv =
            (3.0 * envelope(d, radius) - 4.0 * envelope(d, radius - step) + envelope(d, radius - 2.0 * step)) /
            (2.0 * step);
        acc += directions.weights[i] * std::norm(dv);
        wsum += directions.weights[i];
    }
    return std::pow(radius, 0.5 * (g.dim() - 1)) * std::sqrt(acc / wsum);
}

double radial_decay_exponent(const ComplexField& field, double k, const std::vector<double>& radii,
                             const Vec& theta_prime) {
    if (radii.size() < 2) throw ValidationError("radial_decay_exponent: at least 2 radii required");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double r : radii) {
        check_radius(field.grid(), r);
        const double a = std::abs(interpolate_outgoing(field, k, along(theta_prime, r)));
        if (!(a > 0.0)) throw NumericalError("field vanishes on the ray", "ray_modulus", a);
        const double x = std::log(r), y = std::log(a);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double nr = static_cast<double>(radii.size());
    return -(nr * sxy - sx * sy) / (nr * sxx - sx * sx);
}

}  // namespace magscatter
