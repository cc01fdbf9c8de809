#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "magscatter/grid.hpp"

namespace magscatter {

enum class Family { gaussian_bump, smooth_compact_bump, power_tail, pure_gauge };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

/// One parametric term of a potential.
///
/// Scalar profiles (all centred at `center`, with s = |x - center|^2):
///   gaussian_bump        amplitude * exp(-s / width^2)
///   smooth_compact_bump  amplitude * exp(1 - 1 / (1 - s / width^2)) inside radius `width`, 0 outside
///   power_tail           amplitude * (1 + s / width^2)^(-mu / 2)
///
/// For the magnetic potential a non-gauge term contributes `profile * e_axis`, and a
/// `pure_gauge` term contributes grad(phi) with phi given by `generator`.
struct PotentialSpec {
    Family family = Family::gaussian_bump;
    Vec center{0.0, 0.0, 0.0};
    double amplitude = 0.0;
    double width = 1.0;
    double mu = 3.0;
    int axis = -1;  // component index for vector terms
    std::shared_ptr<const PotentialSpec> generator;

    static PotentialSpec gaussian(double amplitude, double width, Vec center = {0.0, 0.0, 0.0});
    static PotentialSpec compact_bump(double amplitude, double radius, Vec center = {0.0, 0.0, 0.0});
    static PotentialSpec power(double amplitude, double width, double mu, Vec center = {0.0, 0.0, 0.0});
    static PotentialSpec gauge(PotentialSpec phi);
    PotentialSpec along(int component) const;
    PotentialSpec scaled(double factor) const;
};

/// Electric potential V as a sum of scalar terms.
struct ScalarPotentialSpec {
    std::vector<PotentialSpec> terms;
    ScalarPotentialSpec scaled(double factor) const;
};

/// Magnetic potential W as a sum of component terms and gauge terms.
struct VectorPotentialSpec {
    std::vector<PotentialSpec> terms;
    VectorPotentialSpec scaled(double factor) const;
};

/// Declared decay bound |V|, |W|, |div W| <= c / |x|^mu.
struct DecayBound {
    double mu = 3.0;
    double c = 1.0;
};

/// Sampled coefficients of the operator on a grid. q_tilde = |W|^2 + V pointwise.
struct PotentialData {
    Grid grid;
    RealField V;
    std::vector<RealField> W;  // dim components
    RealField divW;
    RealField q_tilde;
    double mu = 3.0;
    double c_decay = 1.0;

    bool has_magnetic() const { return magnetic_; }
    bool is_zero() const { return zero_; }

    bool magnetic_ = false;
    bool zero_ = true;
};

/// Analytic value, gradient and Laplacian of a scalar profile at x.
struct ProfileSample {
    double value = 0.0;
    Vec gradient{0.0, 0.0, 0.0};
    double laplacian = 0.0;
};

ProfileSample evaluate_profile(const PotentialSpec& spec, const Vec& x, int dim);

/// Samples V, W and div W analytically. Rejects pure_gauge terms for V and
/// power tails with mu <= 2. When `decay` is absent the bound is derived from the terms.
PotentialData sample_potential(const ScalarPotentialSpec& V, const VectorPotentialSpec& W, const Grid& grid,
                               std::optional<DecayBound> decay = std::nullopt);

PotentialData zero_potential(const Grid& grid);

/// Rejects specs that violate the decay condition or do not fit the grid.
void validate_spec(const PotentialSpec& spec, bool magnetic, const Grid& grid);

struct ConditionReport {
    int dim = 3;
    double mu = 0.0;
    double p = 0.0;
    double delta = 0.0;
    bool mu_ok = false;          // mu > 2
    bool delta_ok = false;       // delta > (n+1)/2 - n/p
    double delta_threshold = 0.0;
    double sup_V = 0.0;          // sup |V| |x|^mu over |x| > L/2
    double sup_W = 0.0;
    double sup_divW = 0.0;
    double c_decay = 0.0;
    bool decay_ok = false;
    bool low_mu_flag = false;    // mu < 3: amplitude continuity in theta' untested
    bool pass = false;
    std::vector<std::string> reasons;
    std::string note;
};

ConditionReport check_conditions(const PotentialData& potential, double p, double delta);

}  // namespace magscatter
