#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "magscatter/error.hpp"
#include "magscatter/grid.hpp"

namespace magscatter {

/// Weighted Lebesgue norm parameters: p in {2, inf}; delta > 0 weights growth,
/// delta < 0 weights decay, through (1 + |x|^2)^{delta/2}.
struct WeightedNormParams {
    double p = 2.0;
    double delta = 0.0;
};

/// Default weight exponent of the solution space (any value above 1/2 is admissible).
inline constexpr double kDefaultDelta0 = 1.0;

inline double weight_factor(const Vec& x, double delta) {
    return std::pow(1.0 + dot(x, x), 0.5 * delta);
}

template <typename T>
double weighted_norm(const Field<T>& f, const WeightedNormParams& params) {
    const Grid& g = f.grid();
    const bool sup = std::isinf(params.p);
    if (!sup && params.p != 2.0) throw ValidationError("weighted_norm supports p = 2 or p = infinity only");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::abs(f[i]);
        if (std::isnan(a)) throw ValidationError("weighted_norm: field contains NaN");
        const double w = weight_factor(g.point(i), params.delta);
        if (sup)
            acc = std::max(acc, a * w);
        else
            acc += a * a * w * w;
    }
    return sup ? acc : std::sqrt(acc * g.cell_volume());
}

/// Central-difference partial derivative along `axis`; second-order one-sided at the faces.
template <typename T>
Field<T> partial_derivative(const Field<T>& f, int axis) {
    const Grid& g = f.grid();
    const int m = g.points_per_axis();
    if (m < 4) throw ValidationError("grid too small for central differences");
    const double inv2h = 0.5 / g.spacing();
    Field<T> out(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto ijk = g.multi_index(i);
        const int c = ijk[axis];
        auto at = [&](int j) {
            auto q = ijk;
            q[axis] = j;
            return f[g.linear_index(q)];
        };
        if (c == 0)
            out[i] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
        else if (c == m - 1)
            out[i] = (3.0 * at(m - 1) - 4.0 * at(m - 2) + at(m - 3)) * inv2h;
        else
            out[i] = (at(c + 1) - at(c - 1)) * inv2h;
    }
    return out;
}

/// Weighted H^1 norm with decay weight: sqrt(||f||^2_{L2_{-delta}} + ||grad f||^2_{L2_{-delta}}).
template <typename T>
double h1_weighted_norm(const Field<T>& f, double delta) {
    const WeightedNormParams w{2.0, -delta};
    const double base = weighted_norm(f, w);
    double total = base * base;
    for (int d = 0; d < f.grid().dim(); ++d) {
        const double gd = weighted_norm(partial_derivative(f, d), w);
        total += gd * gd;
    }
    return std::sqrt(total);
}

}  // namespace magscatter
