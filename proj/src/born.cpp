#include "magscatter/born.hpp"

#include <algorithm>
#include <cmath>

#include "magscatter/error.hpp"
#include "magscatter/fourier.hpp"
#include "magscatter/quadrature.hpp"
#include "magscatter/special.hpp"

namespace magscatter {
namespace {

ComplexField complexify(const RealField& f) {
    ComplexField c(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) c[i] = f[i];
    return c;
}

void require_unit(const Vec& v, const char* what) {
    if (std::abs(norm(v) - 1.0) > 1e-12) throw ValidationError(std::string(what) + " must be a unit vector");
}

Vec combine(double a, const Vec& x, double b, const Vec& y) {
    return {a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]};
}

/// Transforms of q~ and the W components needed by the second-order numerators.
struct NumeratorFields {
    ComplexField q;
    std::vector<ComplexField> W;
    bool magnetic = false;
};

/// F(D), F(T), F(q~) at a list of frequencies, D = div W via -i xi.F(W), T = theta.W.
struct Transforms {
    std::vector<complex> D, T, q;
};

Transforms transforms_at(const NumeratorFields& f, const Vec& theta, const std::vector<Vec>& freqs, int dim) {
    std::vector<const ComplexField*> list{&f.q};
    if (f.magnetic)
        for (const auto& w : f.W) list.push_back(&w);
    auto F = fourier_many(list, freqs);
    Transforms t;
    t.q = std::move(F[0]);
    if (f.magnetic) {
        t.D.assign(freqs.size(), 0.0);
        t.T.assign(freqs.size(), 0.0);
        for (std::size_t j = 0; j < freqs.size(); ++j)
            for (int d = 0; d < dim; ++d) {
                t.D[j] += complex(0.0, -freqs[j][d]) * F[d + 1][j];
                t.T[j] += theta[d] * F[d + 1][j];
            }
    }
    return t;
}

/// Angular integrals (and angular maxima) of the four numerator products on shells |eta| = rho.
struct ShellValues {
    std::vector<std::array<complex, 4>> integral;
    std::vector<std::array<double, 4>> peak;
};

ShellValues shells(const NumeratorFields& f, double k, const Vec& theta, const std::vector<double>& rho,
                   const DirectionSet& dirs, int dim) {
    const std::size_t nd = dirs.directions.size();
    std::vector<Vec> freqs;
    freqs.reserve(2 * rho.size() * nd);
    const Vec kt = combine(k, theta, 0.0, theta);
    for (double r : rho)
        for (const Vec& d : dirs.directions) {
            freqs.push_back(combine(1.0, kt, r, d));
            freqs.push_back(combine(1.0, kt, -r, d));
        }
    const Transforms t = transforms_at(f, theta, freqs, dim);
    ShellValues out;
    out.integral.assign(rho.size(), {0.0, 0.0, 0.0, 0.0});
    out.peak.assign(rho.size(), {0.0, 0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < rho.size(); ++i)
        for (std::size_t j = 0; j < nd; ++j) {
            const std::size_t p = 2 * (i * nd + j), m = p + 1;
            std::array<complex, 4> prod{0.0, 0.0, 0.0, t.q[p] * t.q[m]};
            if (f.magnetic) {
                prod[0] = t.D[p] * t.D[m];
                prod[1] = t.D[p] * t.T[m];
                prod[2] = t.T[p] * t.T[m];
            }
            for (int c = 0; c < 4; ++c) {
                out.integral[i][c] += dirs.weights[j] * prod[c];
                out.peak[i][c] = std::max(out.peak[i][c], std::abs(prod[c]));
            }
        }
    return out;
}

std::array<complex, 4> coefficients(double k) {
    return {complex(1.0), complex(0.0, 4.0 * k), complex(-4.0 * k * k), complex(1.0)};
}

}  // namespace

complex born_magnetic_term(const PotentialData& potential, double k, const Vec& theta, const Vec& theta_prime) {
    require_unit(theta, "theta");
    require_unit(theta_prime, "theta'");
    if (!potential.has_magnetic()) return 0.0;
    const Vec xi = combine(k, theta, -k, theta_prime);
    const Vec sum = combine(1.0, theta, 1.0, theta_prime);
    std::vector<ComplexField> W;
    std::vector<const ComplexField*> list;
    for (const auto& w : potential.W) W.push_back(complexify(w));
    for (const auto& w : W) list.push_back(&w);
    const auto F = fourier_many(list, {xi});
    complex acc = 0.0;
    for (int d = 0; d < potential.grid.dim(); ++d) acc += sum[d] * F[d][0];
    return -k * acc;
}

complex born_amplitude(const PotentialData& potential, double k, const Vec& theta, const Vec& theta_prime) {
    require_unit(theta, "theta");
    require_unit(theta_prime, "theta'");
    if (!(k > 0.0)) throw ValidationError("born_amplitude: k must be positive");
    if (potential.is_zero()) return 0.0;
    const Vec xi = combine(k, theta, -k, theta_prime);
    const complex Fq = fourier(potential.q_tilde, {xi}).values[0];
    return born_magnetic_term(potential, k, theta, theta_prime) - Fq;
}

complex backscatter_born(const PotentialData& potential, double k, const Vec& theta) {
    return born_amplitude(potential, k, theta, combine(-1.0, theta, 0.0, theta));
}

SecondOrderTerms second_order_fourier(const PotentialData& potential, double k, const Vec& theta,
                                      double pv_shell_gap, int angular_order, const SecondOrderOptions& options) {
    if (!(k > 0.0)) throw ValidationError("second_order_fourier: k must be positive");
    require_unit(theta, "theta");
    if (!(pv_shell_gap > 0.0) || pv_shell_gap >= 0.25 * k)
        throw ValidationError("second_order_fourier: pv_shell_gap must lie in (0, k/4)");
    if (angular_order < 2) throw ValidationError("second_order_fourier: angular_order must be >= 2");
    if (options.nodes_per_panel < 2 || options.nodes_per_panel % 2 != 0)
        throw ValidationError("second_order_fourier: nodes_per_panel must be even and >= 2");
    SecondOrderTerms out;
    out.pv_shell_gap = pv_shell_gap;
    out.regularization_eps = options.regularization_eps;
    if (potential.is_zero()) return out;

    const Grid& g = potential.grid;
    const int n = g.dim();
    NumeratorFields fields{complexify(potential.q_tilde), {}, potential.has_magnetic()};
    if (fields.magnetic)
        for (const auto& w : potential.W) fields.W.push_back(complexify(w));
    const DirectionSet dirs =
        n == 3 ? latlong_directions(angular_order, 2 * angular_order) : circle_directions(2 * angular_order);

    // Radial truncation: where every numerator falls below 1e-3 of its peak, but inside the
    // band the grid resolves (|k theta +- eta| < pi / h).
    const double alias_limit = kPi / g.spacing() - k;
    const double floor_radius = k + pv_shell_gap + options.panel_width;
    if (alias_limit <= floor_radius)
        throw ValidationError("second_order_fourier: grid too coarse for k (need pi/h > 2k + gap + panel)");
    const int scan = 48;
    std::vector<double> scan_rho(scan + 1);
    for (int i = 0; i <= scan; ++i) scan_rho[i] = alias_limit * i / scan;
    const ShellValues scanned = shells(fields, k, theta, scan_rho, dirs, n);
    std::array<double, 4> peak{0.0, 0.0, 0.0, 0.0};
    for (const auto& p : scanned.peak)
        for (int c = 0; c < 4; ++c) peak[c] = std::max(peak[c], p[c]);

    double R = options.eta_max;
    if (R <= 0.0) {
        R = floor_radius;
        for (int c = 0; c < 4; ++c) {
            if (peak[c] == 0.0) continue;
            int last = 0;
            for (int i = 0; i <= scan; ++i)
                if (scanned.peak[i][c] > 1e-3 * peak[c]) last = i;
            R = std::max(R, scan_rho[std::min(last + 1, scan)]);
        }
        R = std::min(R, alias_limit);
    } else if (R <= k + pv_shell_gap) {
        throw ValidationError("second_order_fourier: eta_max must exceed k + pv_shell_gap");
    }
    out.eta_max = R;
    {
        const ShellValues at_cutoff = shells(fields, k, theta, {R}, dirs, n);
        for (int c = 0; c < 4; ++c)
            if (peak[c] > 0.0) out.tail_estimate = std::max(out.tail_estimate, at_cutoff.peak[0][c] / peak[c]);
    }
    if (out.tail_estimate > 1e-2)
        throw NumericalError("second-order numerators not decayed at the frequency cutoff " + std::to_string(R) +
                                 "; enlarge the eta-domain by refining the grid",
                             "numerator_tail", out.tail_estimate);

    std::vector<double> rho, wr;
    auto add_panels = [&](double a, double b, int panels) {
        for (int p = 0; p < panels; ++p) {
            const QuadratureRule q =
                gauss_legendre(options.nodes_per_panel, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels);
            rho.insert(rho.end(), q.nodes.begin(), q.nodes.end());
            wr.insert(wr.end(), q.weights.begin(), q.weights.end());
        }
    };
    const double lo = k - pv_shell_gap, hi = k + pv_shell_gap;
    add_panels(0.0, lo, std::max(1, static_cast<int>(std::ceil(lo / options.panel_width))));
    add_panels(lo, hi, 1);
    add_panels(hi, R, std::max(1, static_cast<int>(std::ceil((R - hi) / options.panel_width))));
    const bool split = options.regularization_eps <= 0.0;
    if (split) rho.push_back(k);
    const ShellValues sv = shells(fields, k, theta, rho, dirs, n);

    std::array<complex, 4> acc{0.0, 0.0, 0.0, 0.0};
    const complex ieps(0.0, std::max(options.regularization_eps, 0.0));
    for (std::size_t i = 0; i < wr.size(); ++i) {
        const double r = rho[i];
        const complex w = wr[i] * std::pow(r, n - 1) / (r * r - k * k - ieps);
        for (int c = 0; c < 4; ++c) acc[c] += w * sv.integral[i][c];
    }
    if (split) {
        const complex shell(0.0, kPi / (2.0 * k) * std::pow(k, n - 1));
        for (int c = 0; c < 4; ++c) acc[c] += shell * sv.integral.back()[c];
    }
    const double norm_factor = std::pow(2.0 * kPi, -n);
    const auto coef = coefficients(k);
    std::array<complex, 4> I;
    for (int c = 0; c < 4; ++c) I[c] = coef[c] * acc[c] * norm_factor;
    if (!fields.magnetic) I[0] = I[1] = I[2] = 0.0;
    out.I1 = I[0];
    out.I2 = I[1];
    out.I3 = I[2];
    out.I4 = I[3];
    return out;
}

SecondOrderTerms second_order_spatial(const PotentialData& potential, double k, const Vec& theta, KernelRule rule) {
    if (!(k > 0.0)) throw ValidationError("second_order_spatial: k must be positive");
    require_unit(theta, "theta");
    const Grid& g = potential.grid;
    const int budget = g.dim() == 3 ? kSpatialOracleBudget3D : kSpatialOracleBudget2D;
    if (g.points_per_axis() > budget)
        throw ValidationError("second_order_spatial: grid exceeds the dense oracle budget (m <= " +
                              std::to_string(budget) + ")");
    SecondOrderTerms out;
    if (potential.is_zero()) return out;

    ComplexField eq(g), eD(g), eT(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const complex e = std::exp(complex(0.0, k * dot(theta, g.point(i))));
        eq[i] = e * potential.q_tilde[i];
        eD[i] = e * potential.divW[i];
        double t = 0.0;
        if (potential.has_magnetic())
            for (int d = 0; d < g.dim(); ++d) t += theta[d] * potential.W[d][i];
        eT[i] = e * t;
    }
    GreenKernel kernel(g, k, rule);
    auto pairing = [&](const ComplexField& a, const ComplexField& b) {
        const ComplexField kb = kernel.convolve(b, QuadratureMode::dense_quadrature);
        complex s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += a[i] * kb[i];
        return s * g.cell_volume();
    };
    const auto coef = coefficients(k);
    out.I4 = coef[3] * pairing(eq, eq);
    if (potential.has_magnetic()) {
        out.I1 = coef[0] * pairing(eD, eD);
        out.I2 = coef[1] * pairing(eD, eT);
        out.I3 = coef[2] * pairing(eT, eT);
    }
    return out;
}

double remainder_bound(double c0, double c1) {
    if (!(c0 >= 0.0) || !(c1 >= 0.0)) throw ValidationError("remainder_bound: arguments must be nonnegative");
    if (c1 >= 1.0) throw NumericalError("remainder bound requires c1 < 1 (series not controlled)", "c1", c1);
    return c0 * c1 / (1.0 - c1);
}

complex improved_backscatter(const PotentialData& potential, double k, const Vec& theta, double pv_shell_gap,
                             int angular_order, const SecondOrderOptions& options) {
    const complex base = backscatter_born(potential, k, theta);
    if (potential.is_zero()) {
        // still enforce the preconditions of the second-order terms
        second_order_fourier(potential, k, theta, pv_shell_gap, angular_order, options);
        return base;
    }
    return base + second_order_fourier(potential, k, theta, pv_shell_gap, angular_order, options).sum();
}

}  // namespace magscatter
