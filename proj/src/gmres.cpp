#include "magscatter/gmres.hpp"

#include <cmath>

#include "magscatter/error.hpp"

namespace magscatter {
namespace {
using cvec = std::vector<std::complex<double>>;

std::complex<double> inner(const cvec& a, const cvec& b) {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm2(const cvec& a) { return std::sqrt(std::real(inner(a, a))); }

double residual(const LinearOperator& apply, const cvec& b, const cvec& x, cvec& r) {
    apply(x, r);
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - r[i];
    return norm2(r);
}
}  // namespace

GmresResult gmres(const LinearOperator& apply, const cvec& b, cvec x0, double tol, int max_iters, int restart) {
    if (restart < 1 || max_iters < 0) throw ValidationError("gmres: restart must be >= 1 and max_iters >= 0");
    const std::size_t n = b.size();
    GmresResult out;
    out.x = x0.empty() ? cvec(n, 0.0) : std::move(x0);
    if (out.x.size() != n) throw ValidationError("gmres: initial guess size mismatch");
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        out.x.assign(n, 0.0);
        out.converged = true;
        return out;
    }

    cvec r(n);
    double rnorm = residual(apply, b, out.x, r);
    while (out.iterations < max_iters && rnorm / bnorm > tol) {
        const int steps = std::min(restart, max_iters - out.iterations);
        std::vector<cvec> V;
        V.reserve(steps + 1);
        V.emplace_back(r);
        for (auto& v : V[0]) v /= rnorm;
        std::vector<cvec> H(steps, cvec(steps + 1, 0.0));  // column-major Hessenberg
        cvec cs(steps), sn(steps), g(steps + 1, 0.0);
        g[0] = rnorm;
        int used = 0;
        cvec w(n);
        for (int j = 0; j < steps; ++j) {
            apply(V[j], w);
            for (int i = 0; i <= j; ++i) {
                H[j][i] = inner(V[i], w);
                for (std::size_t t = 0; t < n; ++t) w[t] -= H[j][i] * V[i][t];
            }
            const double hn = norm2(w);
            H[j][j + 1] = hn;
            for (int i = 0; i < j; ++i) {
                const auto a = H[j][i], c = H[j][i + 1];
                H[j][i] = std::conj(cs[i]) * a + std::conj(sn[i]) * c;
                H[j][i + 1] = -sn[i] * a + cs[i] * c;
            }
            const auto a = H[j][j], c = H[j][j + 1];
            const double den = std::sqrt(std::norm(a) + std::norm(c));
            cs[j] = den == 0.0 ? 1.0 : a / den;
            sn[j] = den == 0.0 ? 0.0 : c / den;
            H[j][j] = std::conj(cs[j]) * a + std::conj(sn[j]) * c;
            H[j][j + 1] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = std::conj(cs[j]) * g[j];
            used = j + 1;
            ++out.iterations;
            if (std::abs(g[j + 1]) / bnorm <= tol || hn == 0.0) break;
            V.emplace_back(w);
            for (auto& v : V.back()) v /= hn;
        }
        cvec y(used);
        for (int i = used - 1; i >= 0; --i) {
            auto s = g[i];
            for (int t = i + 1; t < used; ++t) s -= H[t][i] * y[t];
            y[i] = s / H[i][i];
        }
        for (int i = 0; i < used; ++i)
            for (std::size_t t = 0; t < n; ++t) out.x[t] += y[i] * V[i][t];
        rnorm = residual(apply, b, out.x, r);
    }
    out.relative_residual = rnorm / bnorm;
    out.converged = out.relative_residual <= tol;
    return out;
}

}  // namespace magscatter
