#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "magscatter/error.hpp"
#include "magscatter/norms.hpp"
#include "magscatter/potential.hpp"
#include "support.hpp"

using namespace magscatter;
using magscatter::testing::Gen;

namespace {

/// Composite Simpson rule on [a, b] with n (even) intervals.
template <typename F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

RealField sample(const Grid& g, double (*f)(const Vec&)) {
    RealField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.point(i));
    return out;
}

double gauss(const Vec& x) { return std::exp(-dot(x, x)); }

}  // namespace

TEST(Grid, SpacingAndCount) {
    const Grid g3 = make_grid(3, 4.0, 8);
    EXPECT_DOUBLE_EQ(g3.spacing(), 1.0);
    EXPECT_EQ(g3.size(), 512u);
    const Grid g2 = make_grid(2, 6.0, 12);
    EXPECT_DOUBLE_EQ(g2.spacing(), 1.0);
    EXPECT_EQ(g2.size(), 144u);
}

TEST(Grid, RejectsBadShapes) {
    EXPECT_THROW(make_grid(3, 4.0, 7), ValidationError);
    EXPECT_THROW(make_grid(3, 4.0, 6), ValidationError);
    EXPECT_THROW(make_grid(4, 4.0, 8), ValidationError);
    EXPECT_THROW(make_grid(2, 0.0, 8), ValidationError);
}

TEST(Grid, CellCentredIndexRoundTrip) {
    Gen gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = gen.integer(2, 3);
        const int m = 2 * gen.integer(4, 12);
        const double L = gen.uniform(0.5, 10.0);
        const Grid g = make_grid(dim, L, m);
        EXPECT_NEAR(g.spacing() * m, 2.0 * L, 1e-12 * L);
        EXPECT_NEAR(g.coordinate(0), -L + 0.5 * g.spacing(), 1e-12 * L);
        for (int s = 0; s < 10; ++s) {
            const std::size_t idx = static_cast<std::size_t>(gen.integer(0, static_cast<int>(g.size()) - 1));
            EXPECT_EQ(g.linear_index(g.multi_index(idx)), idx);
            const Vec x = g.point(idx);
            for (int d = 0; d < dim; ++d) EXPECT_GT(std::abs(x[d]), 0.25 * g.spacing());
        }
    }
}

TEST(Potential, ZeroSpecsGiveZeroFields) {
    const Grid g = make_grid(3, 4.0, 8);
    const PotentialData p = sample_potential({}, {}, g);
    EXPECT_TRUE(p.is_zero());
    EXPECT_FALSE(p.has_magnetic());
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(p.V[i], 0.0);
        EXPECT_EQ(p.q_tilde[i], 0.0);
        EXPECT_EQ(p.divW[i], 0.0);
    }
}

TEST(Potential, ScalarOnlyGivesQTildeEqualV) {
    const Grid g = make_grid(3, 4.0, 16);
    ScalarPotentialSpec V;
    V.terms.push_back(PotentialSpec::gaussian(1.0, 1.0));
    const PotentialData p = sample_potential(V, {}, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(p.q_tilde[i], p.V[i]);
        EXPECT_DOUBLE_EQ(p.V[i], gauss(g.point(i)));
    }
}

TEST(Potential, QTildeIsExactPointwise) {
    Gen gen(21);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = gen.integer(2, 3);
        const Grid g = make_grid(dim, 4.0, dim == 3 ? 12 : 24);
        const PotentialData p = sample_potential(gen.scalar_spec(dim, 4.0, 1.0), gen.vector_spec(dim, 4.0, 1.0), g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            double w2 = 0.0;
            for (int d = 0; d < dim; ++d) w2 += p.W[d][i] * p.W[d][i];
            EXPECT_EQ(p.q_tilde[i], w2 + p.V[i]);
        }
    }
}

TEST(Potential, GaugeDivergenceMatchesFiniteDifferencesSecondOrder) {
    // div grad phi = Laplacian phi; compare against the 5/7-point stencil applied to phi.
    const PotentialSpec phi = PotentialSpec::gaussian(0.8, 1.0, {0.2, -0.1, 0.3});
    VectorPotentialSpec W;
    W.terms.push_back(PotentialSpec::gauge(phi));
    double errs[2];
    for (int level = 0; level < 2; ++level) {
        const Grid g = make_grid(3, 4.0, level == 0 ? 16 : 32);
        const PotentialData p = sample_potential({}, W, g);
        const double h = g.spacing();
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Vec x = g.point(i);
            double lap = -6.0 * evaluate_profile(phi, x, 3).value;
            for (int d = 0; d < 3; ++d) {
                Vec a = x, b = x;
                a[d] += h;
                b[d] -= h;
                lap += evaluate_profile(phi, a, 3).value + evaluate_profile(phi, b, 3).value;
            }
            err = std::max(err, std::abs(lap / (h * h) - p.divW[i]));
        }
        errs[level] = err;
    }
    // Stencil truncation bound: (h^2 / 12) * 3 * max|phi''''| ~ 0.15 at h = 0.25.
    EXPECT_LT(errs[1], 0.2);
    EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.4);
}

TEST(Potential, ValidationRejectsBadSpecs) {
    const Grid g = make_grid(3, 4.0, 8);
    ScalarPotentialSpec gaugeV;
    gaugeV.terms.push_back(PotentialSpec::gauge(PotentialSpec::gaussian(1.0, 1.0)));
    EXPECT_THROW(sample_potential(gaugeV, {}, g), ValidationError);

    ScalarPotentialSpec slow;
    slow.terms.push_back(PotentialSpec::power(1.0, 1.0, 1.5));
    try {
        sample_potential(slow, {}, g);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("mu > 2"), std::string::npos);
    }

    ScalarPotentialSpec wide;
    wide.terms.push_back(PotentialSpec::compact_bump(1.0, 3.5, {1.0, 0.0, 0.0}));
    EXPECT_THROW(sample_potential(wide, {}, g), ValidationError);

    VectorPotentialSpec no_axis;
    no_axis.terms.push_back(PotentialSpec::gaussian(1.0, 1.0));
    EXPECT_THROW(sample_potential({}, no_axis, g), ValidationError);
}

TEST(Potential, CompactBumpVanishesOutsideSupport) {
    const Grid g = make_grid(2, 4.0, 32);
    ScalarPotentialSpec V;
    V.terms.push_back(PotentialSpec::compact_bump(2.0, 1.5));
    const PotentialData p = sample_potential(V, {}, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (norm(g.point(i)) >= 1.5) EXPECT_EQ(p.V[i], 0.0);
        else EXPECT_GT(p.V[i], 0.0);
    }
}

TEST(WeightedNorm, ZeroField) {
    const Grid g = make_grid(3, 4.0, 8);
    EXPECT_EQ(weighted_norm(ComplexField(g), {2.0, 1.0}), 0.0);
    EXPECT_EQ(weighted_norm(ComplexField(g), {std::numeric_limits<double>::infinity(), 1.0}), 0.0);
}

TEST(WeightedNorm, GaussianMatchesRadialQuadrature) {
    const Grid g = make_grid(3, 6.0, 48);
    const RealField f = sample(g, gauss);
    const double oracle = std::sqrt(simpson(
        [](double r) { return std::exp(-2.0 * r * r) * (1.0 + r * r) * 4.0 * M_PI * r * r; }, 0.0, 8.0, 4000));
    EXPECT_NEAR(weighted_norm(f, {2.0, 1.0}) / oracle, 1.0, 0.01);
}

TEST(WeightedNorm, GrowthWeightIncreasesNorm) {
    const Grid g = make_grid(3, 6.0, 24);
    const RealField f = sample(g, gauss);
    EXPECT_GT(weighted_norm(f, {2.0, 1.0}), weighted_norm(f, {2.0, 0.0}));
}

TEST(WeightedNorm, PropertyHomogeneousAndMonotone) {
    Gen gen(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = gen.integer(2, 3);
        const Grid g = make_grid(dim, gen.uniform(2.0, 6.0), dim == 3 ? 12 : 32);
        const ComplexField f = gen.smooth_field(g);
        const complex alpha = gen.cplx(3.0);
        ComplexField af(g);
        for (std::size_t i = 0; i < g.size(); ++i) af[i] = alpha * f[i];
        const double d1 = gen.uniform(-2.0, 2.0), d2 = d1 + gen.uniform(0.0, 2.0);
        for (double p : {2.0, std::numeric_limits<double>::infinity()}) {
            const double base = weighted_norm(f, {p, d1});
            EXPECT_NEAR(weighted_norm(af, {p, d1}), std::abs(alpha) * base, 1e-12 * std::abs(alpha) * base);
            EXPECT_LE(base, weighted_norm(f, {p, d2}) * (1.0 + 1e-14));
        }
    }
}

TEST(WeightedNorm, RefinementChangeIsSecondOrderOrBetter) {
    double prev = 0.0;
    double changes[2];
    for (int level = 0; level < 3; ++level) {
        const Grid g = make_grid(2, 5.0, 16 << level);
        const double v = weighted_norm(sample(g, gauss), {2.0, 1.0});
        if (level > 0) changes[level - 1] = std::abs(v - prev);
        prev = v;
    }
    const double h = 10.0 / 32;
    EXPECT_LT(changes[0], h * h);
    EXPECT_LE(changes[1], changes[0] / 3.0 + 1e-14);
}

TEST(WeightedNorm, RejectsNaNAndUnsupportedP) {
    const Grid g = make_grid(2, 2.0, 8);
    ComplexField f(g);
    f[3] = complex(std::nan(""), 0.0);
    EXPECT_THROW(weighted_norm(f, {2.0, 0.0}), ValidationError);
    EXPECT_THROW(weighted_norm(ComplexField(g), {1.0, 0.0}), ValidationError);
}

TEST(H1Norm, ZeroAndConstant) {
    const Grid g = make_grid(3, 3.0, 12);
    EXPECT_EQ(h1_weighted_norm(ComplexField(g), 1.0), 0.0);
    const RealField one(g, 1.0);
    double direct = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) direct += 1.0 / (1.0 + dot(g.point(i), g.point(i)));
    direct = std::sqrt(direct * g.cell_volume());
    EXPECT_NEAR(h1_weighted_norm(one, 1.0), direct, 1e-12 * direct);
}

TEST(H1Norm, GradientTermMatchesAnalyticGradient) {
    double errs[2];
    for (int level = 0; level < 2; ++level) {
        const Grid g = make_grid(3, 4.0, level == 0 ? 16 : 32);
        const RealField f = sample(g, gauss);
        double e = 0.0, ref = 0.0;
        for (int d = 0; d < 3; ++d) {
            const RealField df = partial_derivative(f, d);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const Vec x = g.point(i);
                const double exact = -2.0 * x[d] * gauss(x);
                e += std::pow(df[i] - exact, 2);
                ref += exact * exact;
            }
        }
        errs[level] = std::sqrt(e / ref);
    }
    // Central difference error h^2 f''' / 6 relative to f' is about 0.04 at h = 0.25.
    EXPECT_LT(errs[1], 0.06);
    EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.5);
}

TEST(Conditions, GaussianPasses) {
    const Grid g = make_grid(3, 6.0, 24);
    ScalarPotentialSpec V;
    V.terms.push_back(PotentialSpec::gaussian(1.0, 1.0));
    VectorPotentialSpec W;
    W.terms.push_back(PotentialSpec::gaussian(0.5, 1.0).along(2));
    const ConditionReport r = check_conditions(sample_potential(V, W, g), 2.0, 1.0);
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(r.mu_ok);
    EXPECT_FALSE(r.low_mu_flag);
    EXPECT_FALSE(r.note.empty());
}

TEST(Conditions, SlowDecayFailsWithReason) {
    const Grid g = make_grid(3, 6.0, 16);
    ScalarPotentialSpec V;
    V.terms.push_back(PotentialSpec::gaussian(1.0, 1.0));
    const ConditionReport r = check_conditions(sample_potential(V, {}, g, DecayBound{1.5, 10.0}), 2.0, 1.0);
    EXPECT_FALSE(r.pass);
    EXPECT_FALSE(r.mu_ok);
    ASSERT_FALSE(r.reasons.empty());
    EXPECT_NE(r.reasons.front().find("mu <= 2"), std::string::npos);
}

TEST(Conditions, DeltaThresholdAndLowMuFlag) {
    const Grid g = make_grid(3, 6.0, 16);
    ScalarPotentialSpec V;
    V.terms.push_back(PotentialSpec::power(0.1, 1.0, 2.5));
    const PotentialData p = sample_potential(V, {}, g);
    const ConditionReport ok = check_conditions(p, 2.0, 0.6);
    EXPECT_NEAR(ok.delta_threshold, 0.5, 1e-15);
    EXPECT_TRUE(ok.delta_ok);
    EXPECT_TRUE(ok.low_mu_flag);
    EXPECT_TRUE(ok.decay_ok);
    EXPECT_FALSE(check_conditions(p, 2.0, 0.5).delta_ok);
}

TEST(Conditions, ZeroPotentialPasses) {
    const Grid g = make_grid(2, 4.0, 16);
    EXPECT_TRUE(check_conditions(zero_potential(g), 2.0, 1.0).pass);
}
