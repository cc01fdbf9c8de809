#include <gtest/gtest.h>

#include <cmath>

#include "magscatter/error.hpp"
#include "magscatter/lippmann.hpp"
#include "magscatter/special.hpp"
#include "support.hpp"

using namespace magscatter;
using namespace magscatter::testing;

namespace {

ScalarPotentialSpec gaussian_v(double amp, double width = 1.0, Vec c = {0.0, 0.0, 0.0}) {
    ScalarPotentialSpec V;
    V.terms.push_back(PotentialSpec::gaussian(amp, width, c));
    return V;
}

ComplexField diff(const ComplexField& a, const ComplexField& b) {
    ComplexField d(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

/// Averages each 2^n block of a grid with 2m points onto the grid with m points.
ComplexField restrict_to(const ComplexField& fine, const Grid& coarse) {
    ComplexField out(coarse);
    const Grid& f = fine.grid();
    const int n = f.dim();
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto ijk = f.multi_index(i);
        for (int d = 0; d < n; ++d) ijk[d] /= 2;
        out[coarse.linear_index(ijk)] += fine[i] / double(1 << n);
    }
    return out;
}

}  // namespace

TEST(IncidentWave, PhaseExampleAndUnitModulus) {
    const Grid g = make_grid(3, 8.0 * kPi, 8);  // cell centres at odd multiples of pi
    const ComplexField u0 = incident_wave(g, {1.0, {1.0, 0.0, 0.0}});
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(std::abs(u0[i]), 1.0, 1e-15);
        if (std::abs(g.point(i)[0] - kPi) < 1e-12) {
            EXPECT_LT(std::abs(u0[i] - complex(-1.0, 0.0)), 1e-15);
        }
    }
    Gen gen(11);
    for (int t = 0; t < 10; ++t) {
        const int dim = gen.integer(2, 3);
        const Grid h = make_grid(dim, gen.uniform(1, 5), 2 * gen.integer(4, 6));
        const ComplexField w = incident_wave(h, {gen.uniform(0.1, 8), gen.unit(dim)});
        for (const auto& v : w.values()) EXPECT_NEAR(std::abs(v), 1.0, 1e-14);
    }
    EXPECT_THROW(incident_wave(g, {1.0, {1.0, 0.1, 0.0}}), ValidationError);
    EXPECT_THROW(incident_wave(g, {0.0, {1.0, 0.0, 0.0}}), ValidationError);
}

TEST(IncidentWave, DiscreteHelmholtzDefectIsSecondOrder) {
    // (-Delta_h - k^2) e^{ik x.theta} = (sum_d 4 sin^2(k theta_d h / 2) / h^2 - k^2) u0.
    const double k = 1.3;
    const Vec theta{0.6, 0.0, 0.8};
    double defect[2];
    for (int level = 0; level < 2; ++level) {
        const Grid g = make_grid(3, 3.0, level == 0 ? 12 : 24);
        const ComplexField u = incident_wave(g, {k, theta});
        const double h = g.spacing();
        double worst = 0.0, oracle = -k * k;
        for (int d = 0; d < 3; ++d) oracle += 4.0 * std::pow(std::sin(k * theta[d] * h / 2.0), 2) / (h * h);
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto ijk = g.multi_index(i);
            if (ijk[0] == 0 || ijk[1] == 0 || ijk[2] == 0 || ijk[0] == 11 + 12 * level ||
                ijk[1] == 11 + 12 * level || ijk[2] == 11 + 12 * level)
                continue;
            complex lap = -6.0 * u[i];
            for (int d = 0; d < 3; ++d) {
                auto a = ijk, b = ijk;
                ++a[d];
                --b[d];
                lap += u[g.linear_index(a)] + u[g.linear_index(b)];
            }
            const complex r = -lap / (h * h) - k * k * u[i];
            EXPECT_LT(std::abs(r - oracle * u[i]), 1e-9);
            worst = std::max(worst, std::abs(r));
        }
        defect[level] = worst;
    }
    EXPECT_NEAR(defect[0] / defect[1], 4.0, 0.2);
}

TEST(ApplyLk, ZeroPotentialAnnihilates) {
    const Grid g = make_grid(3, 3.0, 8);
    Gen gen(12);
    const PotentialData p = sample_potential({}, {}, g);
    const ComplexField out = apply_Lk(p, 1.0, gen.smooth_field(g));
    for (const auto& v : out.values()) EXPECT_EQ(v, complex(0.0));
}

TEST(ApplyLk, LinearForRandomPotentials) {
    Gen gen(13);
    for (int t = 0; t < 4; ++t) {
        const int dim = gen.integer(2, 3);
        const Grid g = make_grid(dim, 4.0, dim == 3 ? 12 : 24);
        const PotentialData p =
            sample_potential(gen.scalar_spec(dim, 4.0, 0.5), gen.vector_spec(dim, 4.0, 0.5), g);
        const ComplexField a = gen.smooth_field(g), b = gen.smooth_field(g);
        const complex alpha = gen.cplx(), beta = gen.cplx();
        ComplexField mix(g);
        for (std::size_t i = 0; i < g.size(); ++i) mix[i] = alpha * a[i] + beta * b[i];
        const double k = gen.uniform(0.5, 3.0);
        const ComplexField la = apply_Lk(p, k, a), lb = apply_Lk(p, k, b), lm = apply_Lk(p, k, mix);
        ComplexField expect(g);
        for (std::size_t i = 0; i < g.size(); ++i) expect[i] = alpha * la[i] + beta * lb[i];
        EXPECT_LT(l2_diff(lm, expect), 1e-12 * l2(expect));
    }
}

TEST(ApplyLk, FftMatchesDenseQuadrature) {
    Gen gen(14);
    for (int dim : {3, 2}) {
        const Grid g = make_grid(dim, 4.0, dim == 3 ? 12 : 32);
        const PotentialData p = sample_potential(gaussian_v(0.7), gen.vector_spec(dim, 4.0, 0.4), g);
        const ComplexField f = gen.smooth_field(g);
        const ComplexField a = apply_Lk(p, 1.5, f, QuadratureMode::fft_convolution);
        const ComplexField b = apply_Lk(p, 1.5, f, QuadratureMode::dense_quadrature);
        EXPECT_LT(l2_diff(a, b) / l2(b), 1e-6);
    }
}

TEST(ApplyLk, RejectsMismatchedInputs) {
    const Grid g = make_grid(3, 3.0, 8);
    const PotentialData p = sample_potential(gaussian_v(0.1), {}, g);
    EXPECT_THROW(apply_Lk(p, 1.0, ComplexField(make_grid(3, 3.0, 10))), ValidationError);
    EXPECT_THROW(apply_Lk(p, -1.0, ComplexField(g)), ValidationError);
}

TEST(TildeU0, ZeroAndScalarPaths) {
    const Grid g = make_grid(3, 4.0, 16);
    const WaveParams wave{1.5, {0.0, 0.6, 0.8}};
    const ComplexField zero = tilde_u0(sample_potential({}, {}, g), wave, g);
    EXPECT_EQ(l2(zero), 0.0);
    // With W = 0 the gradient never enters, so both paths coincide.
    const PotentialData p = sample_potential(gaussian_v(0.3), {}, g);
    const ComplexField a = tilde_u0(p, wave, g);
    const ComplexField b = apply_Lk(p, wave.k, incident_wave(g, wave));
    EXPECT_LT(l2_diff(a, b) / l2(b), 1e-12);
}

TEST(TildeU0, MagneticPathsAgreeToSecondOrder) {
    double errs[2];
    const WaveParams wave{1.0, {0.6, 0.8, 0.0}};
    for (int level = 0; level < 2; ++level) {
        const Grid g = make_grid(2, 5.0, level == 0 ? 32 : 64);
        VectorPotentialSpec W;
        W.terms.push_back(PotentialSpec::gaussian(0.4, 1.0, {0.2, -0.1, 0.0}).along(1));
        const PotentialData p = sample_potential(gaussian_v(0.2), W, g);
        const ComplexField a = tilde_u0(p, wave, g);
        const ComplexField b = apply_Lk(p, wave.k, incident_wave(g, wave));
        errs[level] = l2_diff(a, b) / l2(a);
    }
    EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.6);
}

TEST(TildeU0, GaugeSourceMatchesDenseOracle) {
    const Grid g = make_grid(3, 4.0, 12);
    const double k = 1.2;
    const Vec theta{0.0, 0.6, 0.8};
    const double a = 0.5, s = 1.0;  // phi = a exp(-|x|^2 / s^2)
    VectorPotentialSpec W;
    W.terms.push_back(PotentialSpec::gauge(PotentialSpec::gaussian(a, s, {0, 0, 0})));
    const PotentialData p = sample_potential({}, W, g);
    ComplexField src(g);
    const complex I(0.0, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec x = g.point(i);
        const double r2 = dot(x, x), phi = a * std::exp(-r2 / (s * s));
        const double lap = phi * (4.0 * r2 / std::pow(s, 4) - 6.0 / (s * s));
        const Vec grad{-2.0 * x[0] / (s * s) * phi, -2.0 * x[1] / (s * s) * phi, -2.0 * x[2] / (s * s) * phi};
        const complex u0 = std::exp(I * k * dot(theta, x));
        src[i] = I * lap * u0 + 2.0 * I * dot(grad, theta) * I * k * u0 - dot(grad, grad) * u0;
    }
    const ComplexField oracle = GreenKernel(g, k).convolve(src, QuadratureMode::dense_quadrature);
    const ComplexField got = tilde_u0(p, {k, theta}, g);
    EXPECT_LT(l2_diff(got, oracle) / l2(oracle), 1e-6);
}

TEST(BornSeries, ZeroPotentialStopsAfterFirstTerm) {
    const Grid g = make_grid(3, 3.0, 8);
    const ScatteringSolution sol = solve_born_series(sample_potential({}, {}, g), {1.0, {1, 0, 0}}, g, 20, 1e-8);
    EXPECT_EQ(sol.iterations, 1);
    EXPECT_EQ(l2(sol.u_sc), 0.0);
    EXPECT_EQ(sol.method, SolveMethod::born_series);
}

TEST(BornSeries, RatiosTrackNormEstimate) {
    const Grid g = make_grid(3, 4.0, 16);
    const PotentialData p = sample_potential(gaussian_v(0.1), {}, g);
    const WaveParams wave{2.0, {0.0, 0.0, 1.0}};
    const ScatteringSolution sol = solve_born_series(p, wave, g, 60, 1e-10);
    ASSERT_TRUE(sol.converged());
    ASSERT_GE(sol.born_ratio_history.size(), 3u);
    const double settled = sol.born_ratio_history.back();
    const double norm = estimate_operator_norm(p, wave.k, kDefaultDelta0, 30);
    EXPECT_LT(norm, 1.0);
    EXPECT_GT(settled, norm / 2.0);
    EXPECT_LT(settled, norm * 2.0);
}

TEST(BornSeries, StrongPotentialDiverges) {
    const Grid g = make_grid(3, 4.0, 12);
    const PotentialData p = sample_potential(gaussian_v(50.0), {}, g);
    EXPECT_GT(estimate_operator_norm(p, 2.0, kDefaultDelta0, 20), 1.0);
    EXPECT_THROW(solve_born_series(p, {2.0, {1, 0, 0}}, g, 200, 1e-8), NumericalError);
}

TEST(DirectSolve, ZeroPotentialNeedsNoIterations) {
    const Grid g = make_grid(2, 3.0, 16);
    const ScatteringSolution sol = solve_direct(sample_potential({}, {}, g), {1.0, {0, 1, 0}}, g, 1e-10, 100);
    EXPECT_EQ(sol.iterations, 0);
    EXPECT_EQ(l2(sol.u_sc), 0.0);
}

TEST(DirectSolve, AgreesWithBornSeriesAndFixedPoint) {
    Gen gen(15);
    int checked = 0;
    for (int t = 0; t < 3; ++t) {
        const int dim = gen.integer(2, 3);
        const double L = 4.0;
        const Grid g = make_grid(dim, L, dim == 3 ? 16 : 48);
        const PotentialData p = sample_potential(gen.scalar_spec(dim, L, 0.15), gen.vector_spec(dim, L, 0.1), g);
        const WaveParams wave{gen.uniform(0.8, 2.5), gen.unit(dim)};
        const LkOperator op(p, wave.k);
        if (estimate_operator_norm_detail(op, kDefaultDelta0, 20).value >= 0.5) continue;
        const double tol = 1e-8;
        const ScatteringSolution direct = solve_direct(op, wave, tol, 200);
        const ScatteringSolution born = solve_born_series(op, wave, 200, tol * 1e-2);
        ++checked;
        EXPECT_LE(fixed_point_residual(op, direct), tol);
        EXPECT_LE(direct.linear_residual, tol);
        const double scale = weighted_norm(tilde_u0_pair(op, wave, QuadratureMode::fft_convolution).value,
                                           {2.0, -kDefaultDelta0});
        EXPECT_LT(weighted_norm(diff(direct.u_sc, born.u_sc), {2.0, -kDefaultDelta0}), 10.0 * tol * scale);
    }
    EXPECT_GT(checked, 0);
}

TEST(DirectSolve, ReportsNonConvergence) {
    const Grid g = make_grid(3, 4.0, 12);
    const PotentialData p = sample_potential(gaussian_v(2.0), {}, g);
    SolverOptions opts;
    opts.restart = 2;
    try {
        solve_direct(p, {2.0, {1, 0, 0}}, g, 1e-14, 2, opts);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_GT(e.value(), 1e-14);
    }
}

TEST(NormEstimate, ZeroAndHomogeneity) {
    const Grid g = make_grid(3, 4.0, 12);
    EXPECT_EQ(estimate_operator_norm(sample_potential({}, {}, g), 1.0, kDefaultDelta0, 10), 0.0);
    const double a = estimate_operator_norm(sample_potential(gaussian_v(0.2), {}, g), 1.0, kDefaultDelta0, 40);
    const double b = estimate_operator_norm(sample_potential(gaussian_v(0.6), {}, g), 1.0, kDefaultDelta0, 40);
    EXPECT_NEAR(b / a, 3.0, 0.06);
}

TEST(ResidualPde, ZeroPotentialPlaneWave) {
    const Grid g = make_grid(3, 4.0, 16);
    const PotentialData p = sample_potential({}, {}, g);
    const ScatteringSolution sol = solve_direct(p, {1.0, {1, 0, 0}}, g, 1e-10, 10);
    EXPECT_LE(residual_pde(sol, p), 1e-6);
}

TEST(ResidualPde, ConvergedSolveIsSmallAndSecondOrder) {
    double res[2];
    for (int level = 0; level < 2; ++level) {
        const Grid g = make_grid(3, 4.0, level == 0 ? 24 : 48);
        const PotentialData p = sample_potential(gaussian_v(0.1), {}, g);
        const WaveParams wave{1.0, {0.0, 0.6, 0.8}};
        const ScatteringSolution sol = solve_direct(p, wave, g, 1e-9, 100);
        res[level] = residual_pde(sol, p);
    }
    EXPECT_LE(res[1], 5e-2);
    EXPECT_GT(res[0] / res[1], 2.5);
}

TEST(ResidualPde, TruncatedSolutionScoresWorse) {
    const Grid g = make_grid(3, 4.0, 24);
    const PotentialData p = sample_potential(gaussian_v(1.5), {}, g);
    const WaveParams wave{1.0, {0.0, 0.6, 0.8}};
    const double converged = residual_pde(solve_direct(p, wave, g, 1e-9, 100), p);
    const double truncated = residual_pde(solve_born_series(p, wave, g, 1, 1.0), p);
    EXPECT_GT(truncated, 2.0 * converged);
}

TEST(ResidualPde, ScalingIsFirstOrderInAmplitude) {
    const Grid g = make_grid(2, 4.0, 32);
    const WaveParams wave{1.0, {1, 0, 0}};
    double norms[2];
    const double alphas[2] = {1e-3, 1e-2};
    for (int i = 0; i < 2; ++i)
        norms[i] = l2(solve_direct(sample_potential(gaussian_v(alphas[i]), {}, g), wave, g, 1e-10, 100).u_sc);
    EXPECT_NEAR(std::log(norms[1] / norms[0]) / std::log(10.0), 1.0, 0.1);
}

TEST(DirectSolve, GridRefinementConverges) {
    const double L = 5.0;
    const WaveParams wave{1.0, {0.6, 0.8, 0.0}};
    ComplexField sols[3] = {ComplexField(make_grid(2, L, 16)), ComplexField(make_grid(2, L, 32)),
                            ComplexField(make_grid(2, L, 64))};
    for (auto& s : sols) {
        const Grid& g = s.grid();
        VectorPotentialSpec W;
        W.terms.push_back(PotentialSpec::gaussian(0.2, 1.0, {0, 0, 0}).along(0));
        s = solve_direct(sample_potential(gaussian_v(0.2), W, g), wave, g, 1e-10, 200).u_sc;
    }
    const double d1 = l2_diff(restrict_to(sols[1], sols[0].grid()), sols[0]);
    const double d2 = l2_diff(restrict_to(sols[2], sols[1].grid()), sols[1]) / 2.0;  // per-point scale
    EXPECT_LT(d2, d1 / 3.0);
}

TEST(Agmon, ZeroProbeAndBoundedSweep) {
    const Grid g = make_grid(2, 8.0, 128);
    const auto zero = verify_agmon_decay(g, 1.0, {1.0, 2.0}, ComplexField(g));
    for (const auto& r : zero) EXPECT_EQ(r.ratio, 0.0);
    ComplexField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec x = g.point(i);
        f[i] = std::exp(-dot(x, x) / 0.09);
    }
    const auto rows = verify_agmon_decay(g, 1.0, {1.0, 2.0, 4.0}, f);
    double lo = 1e300, hi = 0.0;
    for (const auto& r : rows) {
        lo = std::min(lo, r.k_ratio);
        hi = std::max(hi, r.k_ratio);
    }
    EXPECT_LE(hi, 3.0 * lo);
    EXPECT_THROW(verify_agmon_decay(g, 1.0, {0.5}, f), ValidationError);
}
