#include "magscatter/lippmann.hpp"

#include <cmath>
#include <cstdint>
#include <random>

#include "magscatter/error.hpp"
#include "magscatter/gmres.hpp"

namespace magscatter {
namespace {

constexpr int kDivergenceRun = 5;
constexpr std::uint64_t kPowerIterationSeed = 0x6d61677363617474ULL;

double plain_norm(const ComplexField& f) { return weighted_norm(f, {2.0, 0.0}); }
double decay_norm(const ComplexField& f, double delta) { return weighted_norm(f, {2.0, -delta}); }

std::vector<complex> pack(const FieldPair& p) {
    const std::size_t N = p.value.size();
    std::vector<complex> out(N * (p.gradient.size() + 1));
    std::copy(p.value.values().begin(), p.value.values().end(), out.begin());
    for (std::size_t d = 0; d < p.gradient.size(); ++d)
        std::copy(p.gradient[d].values().begin(), p.gradient[d].values().end(), out.begin() + (d + 1) * N);
    return out;
}

FieldPair unpack(const std::vector<complex>& v, const Grid& grid) {
    const std::size_t N = grid.size();
    FieldPair p = zero_pair(grid);
    std::copy(v.begin(), v.begin() + N, p.value.values().begin());
    for (int d = 0; d < grid.dim(); ++d)
        std::copy(v.begin() + (d + 1) * N, v.begin() + (d + 2) * N, p.gradient[d].values().begin());
    return p;
}

void axpy(complex a, const FieldPair& x, FieldPair& y) {
    for (std::size_t i = 0; i < y.value.size(); ++i) y.value[i] += a * x.value[i];
    for (std::size_t d = 0; d < y.gradient.size(); ++d)
        for (std::size_t i = 0; i < y.value.size(); ++i) y.gradient[d][i] += a * x.gradient[d][i];
}

ScatteringSolution empty_solution(const Grid& grid, const WaveParams& wave, SolveMethod method, double tol) {
    ScatteringSolution s;
    s.grid = grid;
    FieldPair z = zero_pair(grid);
    s.u_sc = std::move(z.value);
    s.grad_u_sc = std::move(z.gradient);
    s.wave = wave;
    s.method = method;
    s.tolerance = tol;
    return s;
}

void check_grid(const PotentialData& potential, const Grid& grid, const char* where) {
    require_same_grid(potential.grid, grid, where);
}

}  // namespace

void validate_wave(const WaveParams& wave, int dim) {
    if (!(wave.k > 0.0) || !std::isfinite(wave.k)) throw ValidationError("wavenumber k must be positive and finite");
    if (dim == 2 && wave.theta[2] != 0.0) throw ValidationError("theta must lie in the plane for a 2D grid");
    if (std::abs(norm(wave.theta) - 1.0) > 1e-12) throw ValidationError("theta must be a unit vector");
}

FieldPair zero_pair(const Grid& grid) {
    FieldPair p;
    p.value = ComplexField(grid);
    p.gradient.assign(grid.dim(), ComplexField(grid));
    return p;
}

FieldPair pair_from_values(const ComplexField& f) {
    FieldPair p;
    p.value = f;
    for (int d = 0; d < f.grid().dim(); ++d) p.gradient.push_back(partial_derivative(f, d));
    return p;
}

std::string to_string(SolveMethod m) { return m == SolveMethod::born_series ? "born_series" : "direct"; }

SolveMethod solve_method_from_string(const std::string& name) {
    if (name == "born_series") return SolveMethod::born_series;
    if (name == "direct") return SolveMethod::direct;
    throw ValidationError("unknown solver method '" + name + "' (expected born_series or direct)");
}

LkOperator::LkOperator(PotentialData potential, double k, KernelRule rule)
    : potential_(std::move(potential)), kernel_(std::make_shared<GreenKernel>(potential_.grid, k, rule)) {}

ComplexField LkOperator::source(const FieldPair& f) const {
    const Grid& g = grid();
    require_same_grid(g, f.value.grid(), "LkOperator::source");
    ComplexField s(g);
    const complex I(0.0, 1.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        complex wg = 0.0;
        if (potential_.has_magnetic())
            for (int d = 0; d < g.dim(); ++d) wg += potential_.W[d][i] * f.gradient[d][i];
        s[i] = I * potential_.divW[i] * f.value[i] + 2.0 * I * wg - potential_.q_tilde[i] * f.value[i];
    }
    return s;
}

FieldPair LkOperator::apply(const FieldPair& f, QuadratureMode mode) const {
    if (potential_.is_zero()) return zero_pair(grid());
    auto parts = kernel_->convolve_with_gradient(source(f), mode);
    FieldPair out;
    out.value = std::move(parts[0]);
    out.gradient.assign(std::make_move_iterator(parts.begin() + 1), std::make_move_iterator(parts.end()));
    return out;
}

ComplexField LkOperator::apply(const ComplexField& f, QuadratureMode mode) const {
    require_same_grid(grid(), f.grid(), "apply_Lk");
    if (potential_.is_zero()) return ComplexField(grid());
    return kernel_->convolve(source(pair_from_values(f)), mode);
}

ComplexField incident_wave(const Grid& grid, const WaveParams& wave) {
    return incident_pair(grid, wave).value;
}

FieldPair incident_pair(const Grid& grid, const WaveParams& wave) {
    validate_wave(wave, grid.dim());
    FieldPair p = zero_pair(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const complex u = std::exp(complex(0.0, wave.k * dot(grid.point(i), wave.theta)));
        p.value[i] = u;
        for (int d = 0; d < grid.dim(); ++d) p.gradient[d][i] = complex(0.0, wave.k * wave.theta[d]) * u;
    }
    return p;
}

ComplexField apply_Lk(const PotentialData& potential, double k, const ComplexField& f, QuadratureMode mode,
                      KernelRule rule) {
    require_same_grid(potential.grid, f.grid(), "apply_Lk");
    if (!(k > 0.0)) throw ValidationError("apply_Lk: k must be positive");
    if (potential.is_zero()) return ComplexField(f.grid());
    return LkOperator(potential, k, rule).apply(f, mode);
}

FieldPair tilde_u0_pair(const LkOperator& op, const WaveParams& wave, QuadratureMode mode) {
    if (std::abs(wave.k - op.k()) > 1e-14 * wave.k) throw ValidationError("wave k differs from operator k");
    return op.apply(incident_pair(op.grid(), wave), mode);
}

ComplexField tilde_u0(const PotentialData& potential, const WaveParams& wave, const Grid& grid, QuadratureMode mode,
                      KernelRule rule) {
    check_grid(potential, grid, "tilde_u0");
    validate_wave(wave, grid.dim());
    if (potential.is_zero()) return ComplexField(grid);
    LkOperator op(potential, wave.k, rule);
    return tilde_u0_pair(op, wave, mode).value;
}

ScatteringSolution solve_born_series(const LkOperator& op, const WaveParams& wave, int max_terms, double tol,
                                     const SolverOptions& options) {
    if (max_terms < 1) throw ValidationError("solve_born_series: max_terms must be >= 1");
    if (!(tol > 0.0)) throw ValidationError("solve_born_series: tol must be positive");
    validate_wave(wave, op.grid().dim());
    ScatteringSolution sol = empty_solution(op.grid(), wave, SolveMethod::born_series, tol);
    FieldPair term = tilde_u0_pair(op, wave, options.quadrature);
    const double base_w = decay_norm(term.value, options.delta);
    const double base = plain_norm(term.value);
    sol.iterations = 1;
    if (base == 0.0) return sol;

    FieldPair u = term;
    double prev_w = base_w;
    int rising = 0;
    while (true) {
        FieldPair next = op.apply(term, options.quadrature);
        const double next_w = decay_norm(next.value, options.delta);
        sol.born_ratio_history.push_back(next_w / prev_w);
        rising = next_w >= prev_w ? rising + 1 : 0;
        if (rising >= kDivergenceRun)
            throw NumericalError("Born series diverges: increments grew for " + std::to_string(kDivergenceRun) +
                                     " consecutive terms",
                                 "born_increment_ratio", sol.born_ratio_history.back());
        axpy(1.0, next, u);
        ++sol.iterations;
        if (next_w <= tol * base_w) {
            // One extra application: u - u0~ - L u = -L(last term).
            FieldPair tail = op.apply(next, options.quadrature);
            sol.linear_residual = plain_norm(tail.value) / base;
            if (sol.linear_residual <= tol) break;
        }
        if (sol.iterations >= max_terms)
            throw NumericalError("Born series did not reach tolerance within max_terms", "born_increment",
                                 next_w / base_w);
        prev_w = next_w;
        term = std::move(next);
    }
    sol.u_sc = std::move(u.value);
    sol.grad_u_sc = std::move(u.gradient);
    return sol;
}

ScatteringSolution solve_born_series(const PotentialData& potential, const WaveParams& wave, const Grid& grid,
                                     int max_terms, double tol, const SolverOptions& options) {
    check_grid(potential, grid, "solve_born_series");
    validate_wave(wave, grid.dim());
    if (potential.is_zero()) {
        ScatteringSolution s = empty_solution(grid, wave, SolveMethod::born_series, tol);
        s.iterations = 1;
        return s;
    }
    return solve_born_series(LkOperator(potential, wave.k, options.rule), wave, max_terms, tol, options);
}

ScatteringSolution solve_direct(const LkOperator& op, const WaveParams& wave, double tol, int max_iters,
                                const SolverOptions& options) {
    if (!(tol > 0.0)) throw ValidationError("solve_direct: tol must be positive");
    if (max_iters < 1) throw ValidationError("solve_direct: max_iters must be >= 1");
    validate_wave(wave, op.grid().dim());
    ScatteringSolution sol = empty_solution(op.grid(), wave, SolveMethod::direct, tol);
    FieldPair rhs = tilde_u0_pair(op, wave, options.quadrature);
    const double base = plain_norm(rhs.value);
    if (base == 0.0) return sol;

    const Grid& g = op.grid();
    LinearOperator A = [&](const std::vector<complex>& x, std::vector<complex>& y) {
        FieldPair lx = op.apply(unpack(x, g), options.quadrature);
        std::vector<complex> packed = pack(lx);
        y.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - packed[i];
    };
    const std::vector<complex> b = pack(rhs);
    std::vector<complex> x;
    double inner_tol = 0.5 * tol;
    int used = 0;
    while (true) {
        GmresResult r = gmres(A, b, x, inner_tol, max_iters - used, options.restart);
        used += r.iterations;
        x = std::move(r.x);
        FieldPair u = unpack(x, g);
        sol.iterations = used;
        sol.linear_residual = fixed_point_residual(op, [&] {
            ScatteringSolution probe = sol;
            probe.u_sc = u.value;
            probe.grad_u_sc = u.gradient;
            return probe;
        }(), options.quadrature);
        if (sol.linear_residual <= tol) {
            sol.u_sc = std::move(u.value);
            sol.grad_u_sc = std::move(u.gradient);
            return sol;
        }
        if (used >= max_iters || inner_tol < 1e-15)
            throw NumericalError("GMRES did not converge within max_iters", "linear_residual", sol.linear_residual);
        inner_tol *= 0.1;
    }
}

ScatteringSolution solve_direct(const PotentialData& potential, const WaveParams& wave, const Grid& grid, double tol,
                                int max_iters, const SolverOptions& options) {
    check_grid(potential, grid, "solve_direct");
    validate_wave(wave, grid.dim());
    if (potential.is_zero()) return empty_solution(grid, wave, SolveMethod::direct, tol);
    return solve_direct(LkOperator(potential, wave.k, options.rule), wave, tol, max_iters, options);
}

double fixed_point_residual(const LkOperator& op, const ScatteringSolution& solution, QuadratureMode mode) {
    FieldPair rhs = tilde_u0_pair(op, solution.wave, mode);
    const double base = plain_norm(rhs.value);
    if (base == 0.0) return 0.0;
    FieldPair u{solution.u_sc, solution.grad_u_sc};
    if (u.gradient.empty()) u = pair_from_values(solution.u_sc);
    FieldPair lu = op.apply(u, mode);
    ComplexField r(op.grid());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = u.value[i] - rhs.value[i] - lu.value[i];
    return plain_norm(r) / base;
}

NormEstimate estimate_operator_norm_detail(const LkOperator& op, double delta, int iters, QuadratureMode mode) {
    if (iters < 10) throw ValidationError("estimate_operator_norm: iters must be >= 10");
    NormEstimate est;
    if (op.potential().is_zero()) return est;
    const Grid& g = op.grid();
    std::mt19937_64 rng(kPowerIterationSeed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ComplexField start(g);
    for (std::size_t i = 0; i < start.size(); ++i) start[i] = complex(dist(rng), dist(rng));
    FieldPair f = pair_from_values(start);

    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = std::pow(1.0 + dot(g.point(i), g.point(i)), -delta);
    auto wdot = [&](const ComplexField& a, const ComplexField& b) {
        complex s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::conj(a[i]) * b[i];
        return s;
    };
    auto scale = [](FieldPair& p, double c) {
        for (auto& v : p.value.values()) v *= c;
        for (auto& gd : p.gradient)
            for (auto& v : gd.values()) v *= c;
    };
    scale(f, 1.0 / std::sqrt(std::real(wdot(f.value, f.value))));
    for (int it = 0; it < iters; ++it) {
        FieldPair lf = op.apply(f, mode);
        const double nf = std::real(wdot(f.value, f.value));
        const double nl = std::sqrt(std::real(wdot(lf.value, lf.value)));
        if (!(nl > 1e-300) || !(nf > 0.0)) {
            est.history.push_back(0.0);
            est.value = 0.0;
            return est;
        }
        est.history.push_back(std::abs(wdot(f.value, lf.value)) / nf);
        scale(lf, 1.0 / nl);
        f = std::move(lf);
    }
    est.value = est.history.back();
    return est;
}

double estimate_operator_norm(const PotentialData& potential, double k, double delta, int iters,
                              const SolverOptions& options) {
    if (iters < 10) throw ValidationError("estimate_operator_norm: iters must be >= 10");
    if (potential.is_zero()) return 0.0;
    return estimate_operator_norm_detail(LkOperator(potential, k, options.rule), delta, iters, options.quadrature)
        .value;
}

double residual_pde(const ScatteringSolution& solution, const PotentialData& potential) {
    const Grid& g = solution.grid;
    require_same_grid(g, potential.grid, "residual_pde");
    const int n = g.dim(), m = g.points_per_axis();
    const double h2 = g.spacing() * g.spacing();
    const double k = solution.wave.k;
    const ComplexField& u = solution.u_sc;
    const FieldPair inc = incident_pair(g, solution.wave);
    std::vector<ComplexField> du;
    for (int d = 0; d < n; ++d) du.push_back(partial_derivative(u, d));
    const complex I(0.0, 1.0);
    double rr = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto ijk = g.multi_index(i);
        bool interior = true;
        for (int d = 0; d < n; ++d) interior = interior && ijk[d] >= 2 && ijk[d] <= m - 3;
        if (!interior) continue;
        complex lap = -2.0 * n * u[i];
        for (int d = 0; d < n; ++d) {
            auto a = ijk, b = ijk;
            a[d] += 1;
            b[d] -= 1;
            lap += u[g.linear_index(a)] + u[g.linear_index(b)];
        }
        lap /= h2;
        const complex total = inc.value[i] + u[i];
        complex wg = 0.0;
        if (potential.has_magnetic())
            for (int d = 0; d < n; ++d) wg += potential.W[d][i] * (inc.gradient[d][i] + du[d][i]);
        const complex s = I * potential.divW[i] * total + 2.0 * I * wg - potential.q_tilde[i] * total;
        const complex r = -lap - k * k * u[i] - s;
        rr += std::norm(r);
        ss += std::norm(s);
    }
    if (ss == 0.0) return std::sqrt(rr);
    return std::sqrt(rr / ss);
}

std::vector<AgmonRow> verify_agmon_decay(const Grid& grid, double delta, const std::vector<double>& k_list,
                                         const ComplexField& probe, KernelRule rule) {
    require_same_grid(grid, probe.grid(), "verify_agmon_decay");
    const double denom = weighted_norm(probe, {2.0, delta});
    std::vector<AgmonRow> rows;
    for (double k : k_list) {
        if (!(k >= 1.0)) throw ValidationError("verify_agmon_decay: every k must be >= 1");
        AgmonRow row;
        row.k = k;
        if (denom > 0.0) {
            GreenKernel kernel(grid, k, rule);
            row.ratio = weighted_norm(kernel.convolve(probe, QuadratureMode::fft_convolution), {2.0, -delta}) / denom;
        }
        row.k_ratio = k * row.ratio;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace magscatter
