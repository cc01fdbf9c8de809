#include "magscatter/grid.hpp"

#include <string>

#include "magscatter/error.hpp"

namespace magscatter {

Grid make_grid(int dim, double half_width, int points_per_axis) {
    if (dim != 2 && dim != 3)
        throw ValidationError("grid dimension must be 2 or 3, got " + std::to_string(dim));
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw ValidationError("grid half_width must be positive");
    if (points_per_axis % 2 != 0)
        throw ValidationError("points_per_axis must be even, got " + std::to_string(points_per_axis));
    if (points_per_axis < 8)
        throw ValidationError("points_per_axis must be at least 8, got " + std::to_string(points_per_axis));

    Grid g;
    g.dim_ = dim;
    g.half_width_ = half_width;
    g.m_ = points_per_axis;
    g.h_ = 2.0 * half_width / points_per_axis;
    g.size_ = 1;
    for (int d = 0; d < dim; ++d) g.size_ *= static_cast<std::size_t>(points_per_axis);
    return g;
}

std::array<int, 3> Grid::multi_index(std::size_t idx) const {
    std::array<int, 3> ijk{0, 0, 0};
    for (int d = dim_ - 1; d >= 0; --d) {
        ijk[d] = static_cast<int>(idx % m_);
        idx /= m_;
    }
    return ijk;
}

std::size_t Grid::linear_index(const std::array<int, 3>& ijk) const {
    std::size_t idx = 0;
    for (int d = 0; d < dim_; ++d) idx = idx * m_ + static_cast<std::size_t>(ijk[d]);
    return idx;
}

Vec Grid::point(std::size_t idx) const {
    const auto ijk = multi_index(idx);
    Vec x{0.0, 0.0, 0.0};
    for (int d = 0; d < dim_; ++d) x[d] = coordinate(ijk[d]);
    return x;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (a != b) throw ValidationError(std::string(where) + ": grid mismatch");
}

}  // namespace magscatter
