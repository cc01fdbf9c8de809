#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "magscatter/grid.hpp"
#include "magscatter/potential.hpp"

namespace magscatter::testing {

/// Deterministic generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
    complex cplx(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

    Vec unit(int dim) {
        while (true) {
            Vec v{uniform(-1, 1), uniform(-1, 1), dim == 3 ? uniform(-1, 1) : 0.0};
            const double r = norm(v);
            if (r > 0.2 && r < 1.0) return {v[0] / r, v[1] / r, v[2] / r};
        }
    }

    Vec point(int dim, double radius) {
        return {uniform(-radius, radius), uniform(-radius, radius), dim == 3 ? uniform(-radius, radius) : 0.0};
    }

    ComplexField smooth_field(const Grid& g) {
        const Vec c = point(g.dim(), 0.3 * g.half_width());
        const double w = uniform(0.6, 1.2);
        const complex a = cplx(), b = cplx();
        const Vec dir = unit(g.dim());
        ComplexField f(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Vec x = g.point(i);
            const Vec d{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
            f[i] = (a + b * dot(dir, x)) * std::exp(-dot(d, d) / (w * w));
        }
        return f;
    }

    /// Random Gaussian-family potential terms well inside a box of half width L.
    ScalarPotentialSpec scalar_spec(int dim, double L, double amplitude) {
        ScalarPotentialSpec s;
        const int terms = integer(1, 2);
        for (int t = 0; t < terms; ++t)
            s.terms.push_back(PotentialSpec::gaussian(uniform(-amplitude, amplitude), uniform(0.7, 1.1),
                                                      point(dim, 0.1 * L)));
        return s;
    }

    VectorPotentialSpec vector_spec(int dim, double L, double amplitude) {
        VectorPotentialSpec s;
        s.terms.push_back(
            PotentialSpec::gaussian(uniform(-amplitude, amplitude), uniform(0.7, 1.1), point(dim, 0.1 * L))
                .along(integer(0, dim - 1)));
        s.terms.push_back(PotentialSpec::gauge(
            PotentialSpec::gaussian(uniform(-amplitude, amplitude), uniform(0.8, 1.2), point(dim, 0.1 * L))));
        return s;
    }

private:
    std::mt19937_64 rng_;
};

inline double l2(const ComplexField& f) {
    double s = 0.0;
    for (const auto& v : f.values()) s += std::norm(v);
    return std::sqrt(s);
}

inline double l2_diff(const ComplexField& a, const ComplexField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

inline double rel_err(complex a, complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Relative L2 error of (-Delta_h - k^2) u against f over the interior (one-cell margin).
inline double helmholtz_defect(const ComplexField& u, const ComplexField& f, double k) {
    const Grid& g = u.grid();
    const int n = g.dim(), m = g.points_per_axis();
    const double h2 = g.spacing() * g.spacing();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto ijk = g.multi_index(i);
        bool inside = true;
        for (int d = 0; d < n; ++d) inside = inside && ijk[d] > 0 && ijk[d] < m - 1;
        if (!inside) continue;
        complex lap = -2.0 * n * u[i];
        for (int d = 0; d < n; ++d) {
            auto a = ijk, b = ijk;
            ++a[d];
            --b[d];
            lap += u[g.linear_index(a)] + u[g.linear_index(b)];
        }
        const complex r = -lap / h2 - k * k * u[i] - f[i];
        num += std::norm(r);
        den += std::norm(f[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace magscatter::testing
