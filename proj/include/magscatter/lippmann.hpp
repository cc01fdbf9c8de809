#pragma once

#include <memory>
#include <string>
#include <vector>

#include "magscatter/kernel.hpp"
#include "magscatter/norms.hpp"
#include "magscatter/potential.hpp"

namespace magscatter {

/// Wavenumber k > 0 and unit incident direction theta.
struct WaveParams {
    double k = 1.0;
    Vec theta{1.0, 0.0, 0.0};
};

/// Throws ValidationError unless k > 0 and |theta| = 1 within 1e-12 (trailing component zero in 2D).
void validate_wave(const WaveParams& wave, int dim);

/// A complex field together with its gradient (dim components).
struct FieldPair {
    ComplexField value;
    std::vector<ComplexField> gradient;
};

FieldPair zero_pair(const Grid& grid);
/// Gradient by central differences.
FieldPair pair_from_values(const ComplexField& f);

enum class SolveMethod { born_series, direct };
std::string to_string(SolveMethod m);
SolveMethod solve_method_from_string(const std::string& name);

struct ScatteringSolution {
    Grid grid;
    ComplexField u_sc;
    std::vector<ComplexField> grad_u_sc;  // carried alongside u_sc by the solvers
    WaveParams wave;
    SolveMethod method = SolveMethod::direct;
    int iterations = 0;
    double linear_residual = 0.0;  // ||u_sc - u0~ - L_k u_sc||_2 / ||u0~||_2
    double tolerance = 0.0;
    std::vector<double> born_ratio_history;

    bool converged() const { return linear_residual <= tolerance; }
};

struct SolverOptions {
    QuadratureMode quadrature = QuadratureMode::fft_convolution;
    KernelRule rule = KernelRule::truncated_spectral;
    double delta = kDefaultDelta0;  // weight exponent of the L2_{-delta} monitoring norm
    int restart = 40;
};

/// The Lippmann-Schwinger operator
///   L_k f = G_k^+ * (i (div W) f + 2i W.grad f - q~ f)
/// for a fixed potential and wavenumber. Works on (f, grad f) pairs: the output gradient
/// is the convolution of the same source with grad G_k^+.
class LkOperator {
public:
    LkOperator(PotentialData potential, double k, KernelRule rule = KernelRule::truncated_spectral);

    const PotentialData& potential() const { return potential_; }
    const GreenKernel& kernel() const { return *kernel_; }
    const Grid& grid() const { return potential_.grid; }
    double k() const { return kernel_->k(); }

    ComplexField source(const FieldPair& f) const;
    FieldPair apply(const FieldPair& f, QuadratureMode mode) const;
    /// Plain-field form with central-difference gradient.
    ComplexField apply(const ComplexField& f, QuadratureMode mode) const;

private:
    PotentialData potential_;
    std::shared_ptr<const GreenKernel> kernel_;
};

/// u0(x) = e^{ik x.theta}.
ComplexField incident_wave(const Grid& grid, const WaveParams& wave);
/// u0 with its exact gradient ik theta u0.
FieldPair incident_pair(const Grid& grid, const WaveParams& wave);

ComplexField apply_Lk(const PotentialData& potential, double k, const ComplexField& f,
                      QuadratureMode mode = QuadratureMode::fft_convolution,
                      KernelRule rule = KernelRule::truncated_spectral);

/// L_k u0 using the exact gradient of u0.
ComplexField tilde_u0(const PotentialData& potential, const WaveParams& wave, const Grid& grid,
                      QuadratureMode mode = QuadratureMode::fft_convolution,
                      KernelRule rule = KernelRule::truncated_spectral);
FieldPair tilde_u0_pair(const LkOperator& op, const WaveParams& wave, QuadratureMode mode);

/// Partial sums of the Born series u_sc = sum_j L_k^j u0. Stops once the last increment
/// falls below tol * ||u0~|| in L2_{-delta}; throws NumericalError after five consecutive
/// non-decreasing increments or when max_terms is exhausted.
ScatteringSolution solve_born_series(const LkOperator& op, const WaveParams& wave, int max_terms, double tol,
                                     const SolverOptions& options = {});
ScatteringSolution solve_born_series(const PotentialData& potential, const WaveParams& wave, const Grid& grid,
                                     int max_terms, double tol, const SolverOptions& options = {});

/// Solves (I - L_k) u_sc = u0~ by restarted GMRES.
ScatteringSolution solve_direct(const LkOperator& op, const WaveParams& wave, double tol, int max_iters,
                                const SolverOptions& options = {});
ScatteringSolution solve_direct(const PotentialData& potential, const WaveParams& wave, const Grid& grid,
                                double tol, int max_iters, const SolverOptions& options = {});

/// ||u_sc - u0~ - L_k u_sc||_2 / ||u0~||_2 recomputed from scratch (0 when u0~ = 0).
double fixed_point_residual(const LkOperator& op, const ScatteringSolution& solution,
                            QuadratureMode mode = QuadratureMode::fft_convolution);

struct NormEstimate {
    double value = 0.0;
    std::vector<double> history;  // Rayleigh-quotient modulus per iteration
};

/// Power iteration for the spectral radius of L_k on L2_{-delta}, started from a fixed
/// pseudo-random vector. Returns 0 when the iterate collapses.
NormEstimate estimate_operator_norm_detail(const LkOperator& op, double delta, int iters,
                                           QuadratureMode mode = QuadratureMode::fft_convolution);
double estimate_operator_norm(const PotentialData& potential, double k, double delta, int iters,
                              const SolverOptions& options = {});

/// Relative L2 norm over the interior (two-cell margin) of (-Delta_h - k^2) u_sc - s[u],
/// s[u] the scattering source of u = u0 + u_sc; equivalently the residual of
/// H u = k^2 u with the plane wave handled exactly. Central differences throughout.
/// Returns 0 when the source vanishes.
double residual_pde(const ScatteringSolution& solution, const PotentialData& potential);

struct AgmonRow {
    double k = 0.0;
    double ratio = 0.0;     // ||G_k * f||_{L2_{-delta}} / ||f||_{L2_{delta}}
    double k_ratio = 0.0;   // k * ratio
};

std::vector<AgmonRow> verify_agmon_decay(const Grid& grid, double delta, const std::vector<double>& k_list,
                                         const ComplexField& probe,
                                         KernelRule rule = KernelRule::truncated_spectral);

}  // namespace magscatter
