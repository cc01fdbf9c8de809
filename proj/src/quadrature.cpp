#include "magscatter/quadrature.hpp"

#include <cmath>

#include "magscatter/error.hpp"
#include "magscatter/special.hpp"

namespace magscatter {

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw ValidationError("gauss_legendre: need at least one node");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = w;
    }
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

DirectionSet circle_directions(int count) {
    if (count < 1) throw ValidationError("circle_directions: count must be positive");
    DirectionSet s;
    s.dim = 2;
    for (int i = 0; i < count; ++i) {
        const double phi = 2.0 * kPi * i / count;
        s.directions.push_back({std::cos(phi), std::sin(phi), 0.0});
        s.weights.push_back(2.0 * kPi / count);
    }
    return s;
}

DirectionSet latlong_directions(int n_polar, int n_azimuth) {
    if (n_polar < 1 || n_azimuth < 1) throw ValidationError("latlong_directions: counts must be positive");
    DirectionSet s;
    s.dim = 3;
    const QuadratureRule t = gauss_legendre(n_polar);
    for (int i = 0; i < n_polar; ++i) {
        const double c = t.nodes[i], st = std::sqrt(1.0 - c * c);
        for (int j = 0; j < n_azimuth; ++j) {
            const double phi = 2.0 * kPi * j / n_azimuth;
            s.directions.push_back({st * std::cos(phi), st * std::sin(phi), c});
            s.weights.push_back(t.weights[i] * 2.0 * kPi / n_azimuth);
        }
    }
    return s;
}

DirectionSet default_directions(int dim) {
    if (dim == 2) return circle_directions(64);
    if (dim == 3) return latlong_directions(16, 32);
    throw ValidationError("default_directions: dim must be 2 or 3");
}

}  // namespace magscatter
