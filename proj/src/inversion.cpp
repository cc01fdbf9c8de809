#include <algorithm>
#include <cmath>
#include <map>

#include "magscatter/born.hpp"
#include "magscatter/error.hpp"
#include "magscatter/parallel.hpp"
#include "magscatter/quadrature.hpp"
#include "magscatter/special.hpp"

namespace magscatter {
namespace {

struct Sample {
    Vec xi;
    complex value;
    double weight;
};

bool same_direction(const Vec& a, const Vec& b) {
    return std::abs(a[0] - b[0]) < 1e-9 && std::abs(a[1] - b[1]) < 1e-9 && std::abs(a[2] - b[2]) < 1e-9;
}

Vec negate(const Vec& v) { return {-v[0], -v[1], -v[2]}; }

/// Solid-angle weights by nearest-direction counting on a fine Fibonacci sphere; also
/// returns the largest angular distance from a fine point to its nearest direction.
std::vector<double> sphere_cell_weights(const std::vector<Vec>& dirs, double& max_angle) {
    const int fine = 20000;
    std::vector<double> w(dirs.size(), 0.0);
    max_angle = 0.0;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < fine; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / fine, r = std::sqrt(1.0 - z * z);
        const Vec p{r * std::cos(golden * i), r * std::sin(golden * i), z};
        std::size_t best = 0;
        double best_dot = -2.0;
        for (std::size_t j = 0; j < dirs.size(); ++j) {
            const double d = dot(p, dirs[j]);
            if (d > best_dot) best_dot = d, best = j;
        }
        w[best] += 4.0 * kPi / fine;
        max_angle = std::max(max_angle, std::acos(std::clamp(best_dot, -1.0, 1.0)));
    }
    return w;
}

/// Least-squares polynomial through (t_i, v_i), evaluated at s.
std::vector<complex> poly_fit_eval(const std::vector<double>& t, const std::vector<complex>& v, int degree,
                                   const std::vector<double>& s) {
    const int p = std::min<int>(degree + 1, static_cast<int>(t.size()));
    double scale = 0.0;
    for (double x : t) scale = std::max(scale, std::abs(x));
    std::vector<double> A(p * p, 0.0);
    std::vector<complex> b(p, 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> basis(p, 1.0);
        for (int j = 1; j < p; ++j) basis[j] = basis[j - 1] * t[i] / scale;
        for (int a = 0; a < p; ++a) {
            b[a] += basis[a] * v[i];
            for (int c = 0; c < p; ++c) A[a * p + c] += basis[a] * basis[c];
        }
    }
    for (int c = 0; c < p; ++c) {
        int piv = c;
        for (int r = c + 1; r < p; ++r)
            if (std::abs(A[r * p + c]) > std::abs(A[piv * p + c])) piv = r;
        for (int j = 0; j < p; ++j) std::swap(A[c * p + j], A[piv * p + j]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < p; ++r) {
            const double f = A[r * p + c] / A[c * p + c];
            for (int j = c; j < p; ++j) A[r * p + j] -= f * A[c * p + j];
            b[r] -= f * b[c];
        }
    }
    std::vector<complex> coef(p);
    for (int r = p - 1; r >= 0; --r) {
        complex acc = b[r];
        for (int j = r + 1; j < p; ++j) acc -= A[r * p + j] * coef[j];
        coef[r] = acc / A[r * p + r];
    }
    std::vector<complex> out;
    for (double x : s) {
        complex acc = 0.0, pw = 1.0;
        for (int j = 0; j < p; ++j, pw *= x / scale) acc += coef[j] * pw;
        out.push_back(acc);
    }
    return out;
}

}  // namespace

RealField invert_backscatter(const std::vector<AmplitudeRecord>& records, const Grid& output_grid,
                             const InversionOptions& options) {
    RealField out(output_grid);
    if (records.empty()) return out;
    const int n = output_grid.dim();

    // Product structure: distinct k values times distinct directions.
    std::vector<double> ks;
    std::vector<Vec> dirs;
    for (const auto& r : records) {
        if (!same_direction(r.theta_prime, negate(r.theta)))
            throw ValidationError("invert_backscatter: every record must have theta' = -theta");
        if (std::abs(norm(r.theta) - 1.0) > 1e-12) throw ValidationError("invert_backscatter: theta must be unit");
        if (n == 2 && r.theta[2] != 0.0) throw ValidationError("invert_backscatter: 3D direction for a 2D grid");
        if (!(r.k > 0.0)) throw ValidationError("invert_backscatter: k must be positive");
        if (std::none_of(ks.begin(), ks.end(), [&](double k) { return std::abs(k - r.k) <= 1e-12 * r.k; }))
            ks.push_back(r.k);
        if (std::none_of(dirs.begin(), dirs.end(), [&](const Vec& d) { return same_direction(d, r.theta); }))
            dirs.push_back(r.theta);
    }
    std::sort(ks.begin(), ks.end());
    if (ks.size() < 2) throw ValidationError("invert_backscatter: need at least two k values");
    if (records.size() != ks.size() * dirs.size())
        throw ValidationError("invert_backscatter: records must form a product of k values and directions");

    // Full direction set: measured directions plus their antipodes (filled by conjugation).
    std::vector<Vec> full = dirs;
    std::vector<int> source(dirs.size());
    std::vector<bool> conjugate(dirs.size(), false);
    for (std::size_t j = 0; j < dirs.size(); ++j) source[j] = static_cast<int>(j);
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        const Vec a = negate(dirs[j]);
        if (std::any_of(full.begin(), full.end(), [&](const Vec& d) { return same_direction(d, a); })) continue;
        full.push_back(a);
        source.push_back(static_cast<int>(j));
        conjugate.push_back(true);
    }
    std::vector<std::vector<complex>> F(full.size(), std::vector<complex>(ks.size(), 0.0));
    for (const auto& r : records) {
        const std::size_t ki = std::lower_bound(ks.begin(), ks.end(), r.k * (1 - 1e-12)) - ks.begin();
        for (std::size_t j = 0; j < full.size(); ++j) {
            if (!same_direction(dirs[source[j]], r.theta)) continue;
            F[j][ki] = conjugate[j] ? std::conj(-r.value) : -r.value;
        }
    }

    // Quadrature weights and coverage check.
    std::vector<double> rho(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) rho[i] = 2.0 * ks[i];
    const double rho_max = rho.back();
    double max_gap = 0.0;
    for (std::size_t i = 1; i < rho.size(); ++i) max_gap = std::max(max_gap, rho[i] - rho[i - 1]);
    std::vector<double> dw(full.size());
    if (n == 2) {
        std::vector<std::pair<double, std::size_t>> ang;
        for (std::size_t j = 0; j < full.size(); ++j) ang.push_back({std::atan2(full[j][1], full[j][0]), j});
        std::sort(ang.begin(), ang.end());
        const std::size_t c = ang.size();
        for (std::size_t j = 0; j < c; ++j) {
            double prev = ang[(j + c - 1) % c].first, next = ang[(j + 1) % c].first;
            if (j == 0) prev -= 2.0 * kPi;
            if (j + 1 == c) next += 2.0 * kPi;
            if (c == 1) prev = ang[0].first - kPi, next = ang[0].first + kPi;
            dw[ang[j].second] = 0.5 * (next - prev);
            max_gap = std::max(max_gap, rho_max * (next - ang[j].first));
        }
    } else {
        double max_angle = 0.0;
        dw = sphere_cell_weights(full, max_angle);
        max_gap = std::max(max_gap, 2.0 * max_angle * rho_max);
    }
    const double nyquist = kPi / output_grid.half_width();
    if (max_gap > options.max_gap_ratio * nyquist)
        throw ValidationError("invert_backscatter: frequency coverage gap " + std::to_string(max_gap) +
                              " exceeds " + std::to_string(options.max_gap_ratio) + " x Nyquist spacing " +
                              std::to_string(nyquist));

    const double roll_start = (1.0 - options.taper_fraction) * rho_max;
    auto taper = [&](double r) {
        if (r <= roll_start || options.taper_fraction <= 0.0) return 1.0;
        return 0.5 * (1.0 + std::cos(kPi * (r - roll_start) / (rho_max - roll_start)));
    };
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double lo = i == 0 ? rho[0] : 0.5 * (rho[i - 1] + rho[i]);
        const double hi = i + 1 == rho.size() ? rho[i] : 0.5 * (rho[i] + rho[i + 1]);
        const double wr = (hi - lo) * std::pow(rho[i], n - 1) * taper(rho[i]);
        for (std::size_t j = 0; j < full.size(); ++j)
            samples.push_back({{rho[i] * full[j][0], rho[i] * full[j][1], rho[i] * full[j][2]}, F[j][i], wr * dw[j]});
    }

    // Low-frequency hole |xi| < rho_0: extrapolate along each line through the origin.
    const QuadratureRule hole = gauss_legendre(options.hole_nodes, 0.0, rho[0]);
    const int shells_used = std::min<int>(options.hole_fit_shells, static_cast<int>(rho.size()));
    for (std::size_t j = 0; j < full.size(); ++j) {
        const Vec opposite = negate(full[j]);
        std::size_t jo = j;
        for (std::size_t t = 0; t < full.size(); ++t)
            if (same_direction(full[t], opposite)) jo = t;
        std::vector<double> t;
        std::vector<complex> v;
        for (int i = 0; i < shells_used; ++i) {
            t.push_back(rho[i]);
            v.push_back(F[j][i]);
            t.push_back(-rho[i]);
            v.push_back(F[jo][i]);
        }
        const auto fill = poly_fit_eval(t, v, options.hole_fit_degree, hole.nodes);
        for (std::size_t q = 0; q < hole.nodes.size(); ++q) {
            const double r = hole.nodes[q];
            samples.push_back({{r * full[j][0], r * full[j][1], r * full[j][2]}, fill[q],
                               hole.weights[q] * std::pow(r, n - 1) * taper(r) * dw[j]});
        }
    }

    const double norm_factor = std::pow(2.0 * kPi, -n);
    parallel_for(output_grid.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Vec x = output_grid.point(i);
            complex acc = 0.0;
            for (const auto& s : samples) acc += s.weight * s.value * std::exp(complex(0.0, -dot(x, s.xi)));
            out[i] = norm_factor * acc.real();
        }
    });
    return out;
}

}  // namespace magscatter
