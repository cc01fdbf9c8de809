#pragma once

#include <vector>

#include "magscatter/grid.hpp"

namespace magscatter {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Directions on S^{n-1} with quadrature weights summing to the sphere area.
struct DirectionSet {
    int dim = 3;
    std::vector<Vec> directions;
    std::vector<double> weights;
};

/// `count` equispaced angles starting at angle 0.
DirectionSet circle_directions(int count);
/// Gauss-Legendre in cos(polar angle) times `n_azimuth` equispaced azimuths.
DirectionSet latlong_directions(int n_polar, int n_azimuth);
/// 64 angles in 2D, 16 x 32 latitude-longitude in 3D.
DirectionSet default_directions(int dim);

}  // namespace magscatter
