#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace magscatter {

using LinearOperator = std::function<void(const std::vector<std::complex<double>>&, std::vector<std::complex<double>>&)>;

struct GmresResult {
    std::vector<std::complex<double>> x;
    int iterations = 0;              // total inner (Arnoldi) steps
    double relative_residual = 0.0;  // ||b - A x|| / ||b||, recomputed explicitly
    bool converged = false;
};

/// Restarted GMRES(restart) with modified Gram-Schmidt and Givens rotations.
GmresResult gmres(const LinearOperator& apply, const std::vector<std::complex<double>>& b,
                  std::vector<std::complex<double>> x0, double tol, int max_iters, int restart);

}  // namespace magscatter
