#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace magscatter {

using complex = std::complex<double>;

/// Point or vector in R^n; unused trailing components are zero when n = 2.
using Vec = std::array<double, 3>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

/// Cell-centred tensor grid on the box [-L, L]^dim with m points per axis.
/// Linear indices are row-major with the last axis fastest.
class Grid {
public:
    Grid() = default;

    int dim() const { return dim_; }
    double half_width() const { return half_width_; }
    int points_per_axis() const { return m_; }
    double spacing() const { return h_; }
    std::size_t size() const { return size_; }
    double cell_volume() const { return dim_ == 2 ? h_ * h_ : h_ * h_ * h_; }

    double coordinate(int i) const { return -half_width_ + (i + 0.5) * h_; }
    std::array<int, 3> multi_index(std::size_t idx) const;
    std::size_t linear_index(const std::array<int, 3>& ijk) const;
    Vec point(std::size_t idx) const;

    bool operator==(const Grid& o) const {
        return dim_ == o.dim_ && m_ == o.m_ && half_width_ == o.half_width_;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    friend Grid make_grid(int, double, int);
    int dim_ = 0;
    double half_width_ = 0.0;
    int m_ = 0;
    double h_ = 0.0;
    std::size_t size_ = 0;
};

/// Builds a grid; requires dim in {2,3}, half_width > 0 and an even m >= 8.
Grid make_grid(int dim, double half_width, int points_per_axis);

/// Values sampled on a grid. Arithmetic is left to free functions and loops.
template <typename T>
class Field {
public:
    Field() = default;
    explicit Field(Grid g, T fill = T{}) : grid_(g), data_(g.size(), fill) {}
    Field(Grid g, std::vector<T> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return data_.size(); }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    std::vector<T>& values() { return data_; }
    const std::vector<T>& values() const { return data_; }

private:
    Grid grid_;
    std::vector<T> data_;
};

using RealField = Field<double>;
using ComplexField = Field<complex>;

/// Throws ValidationError when the two grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace magscatter

#include "magscatter/detail/grid_impl.hpp"
