#pragma once

#include <optional>
#include <string>
#include <vector>

#include "magscatter/born.hpp"
#include "magscatter/lippmann.hpp"
#include "magscatter/potential.hpp"

namespace magscatter {

struct GridConfig {
    int dim = 3;
    double half_width = 4.0;
    int points_per_axis = 32;
};

struct SolverConfig {
    SolveMethod method = SolveMethod::direct;
    double tol = 1e-8;
    int max_iters = 200;
    int max_terms = 100;
    double delta = kDefaultDelta0;
    int norm_iters = 20;
    QuadratureMode quadrature = QuadratureMode::fft_convolution;
    KernelRule rule = KernelRule::truncated_spectral;
};

/// Which theta' the amplitude commands evaluate.
struct DirectionConfig {
    enum class Kind { backscatter, default_set, circle, latlong, explicit_list } kind = Kind::backscatter;
    int count = 64;
    int n_polar = 16;
    int n_azimuth = 32;
    std::vector<Vec> list;
};

struct BornConfig {
    std::optional<double> pv_shell_gap;  // default k / 8
    int angular_order = 10;
    bool second_order = true;
};

struct SweepConfig {
    enum class Axis { epsilon, k, resolution } axis = Axis::epsilon;
    std::vector<double> values;
};

struct InvertConfig {
    double half_width = 4.0;
    int points_per_axis = 32;
    bool from_solver = true;  // false: first-order Born amplitudes instead of solves
};

struct ExperimentConfig {
    GridConfig grid;
    ScalarPotentialSpec V;
    VectorPotentialSpec W;
    std::optional<DecayBound> decay;
    std::vector<double> k_list;
    std::vector<Vec> theta_list;
    SolverConfig solver;
    DirectionConfig directions;
    std::vector<double> farfield_radii;
    BornConfig born;
    std::optional<SweepConfig> sweep;
    InvertConfig invert;

    Grid make_grid() const;
    PotentialData sample(const Grid& grid) const;
};

/// Parses and range-checks a JSON configuration; throws ValidationError naming the field.
ExperimentConfig parse_config(const std::string& json_text);

std::string to_string(SweepConfig::Axis axis);

}  // namespace magscatter
