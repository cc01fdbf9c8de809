#include "magscatter/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "magscatter/error.hpp"

namespace magscatter {

std::string to_string(Family f) {
    switch (f) {
        case Family::gaussian_bump: return "gaussian_bump";
        case Family::smooth_compact_bump: return "smooth_compact_bump";
        case Family::power_tail: return "power_tail";
        case Family::pure_gauge: return "pure_gauge";
    }
    return "unknown";
}

Family family_from_string(const std::string& name) {
    if (name == "gaussian_bump") return Family::gaussian_bump;
    if (name == "smooth_compact_bump") return Family::smooth_compact_bump;
    if (name == "power_tail") return Family::power_tail;
    if (name == "pure_gauge") return Family::pure_gauge;
    throw ValidationError("unknown potential family '" + name + "'");
}

PotentialSpec PotentialSpec::gaussian(double amplitude, double width, Vec center) {
    PotentialSpec s;
    s.family = Family::gaussian_bump;
    s.amplitude = amplitude;
    s.width = width;
    s.center = center;
    return s;
}

PotentialSpec PotentialSpec::compact_bump(double amplitude, double radius, Vec center) {
    PotentialSpec s = gaussian(amplitude, radius, center);
    s.family = Family::smooth_compact_bump;
    return s;
}

PotentialSpec PotentialSpec::power(double amplitude, double width, double mu, Vec center) {
    PotentialSpec s = gaussian(amplitude, width, center);
    s.family = Family::power_tail;
    s.mu = mu;
    return s;
}

PotentialSpec PotentialSpec::gauge(PotentialSpec phi) {
    PotentialSpec s;
    s.family = Family::pure_gauge;
    s.center = phi.center;
    s.mu = phi.mu;
    s.generator = std::make_shared<const PotentialSpec>(std::move(phi));
    return s;
}

PotentialSpec PotentialSpec::along(int component) const {
    PotentialSpec s = *this;
    s.axis = component;
    return s;
}

PotentialSpec PotentialSpec::scaled(double factor) const {
    PotentialSpec s = *this;
    if (family == Family::pure_gauge && generator)
        s.generator = std::make_shared<const PotentialSpec>(generator->scaled(factor));
    else
        s.amplitude *= factor;
    return s;
}

ScalarPotentialSpec ScalarPotentialSpec::scaled(double factor) const {
    ScalarPotentialSpec out;
    for (const auto& t : terms) out.terms.push_back(t.scaled(factor));
    return out;
}

VectorPotentialSpec VectorPotentialSpec::scaled(double factor) const {
    VectorPotentialSpec out;
    for (const auto& t : terms) out.terms.push_back(t.scaled(factor));
    return out;
}

ProfileSample evaluate_profile(const PotentialSpec& spec, const Vec& x, int dim) {
    Vec dx{0.0, 0.0, 0.0};
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
        dx[d] = x[d] - spec.center[d];
        s += dx[d] * dx[d];
    }
    const double w2 = spec.width * spec.width;
    const double t = s / w2;
    // g(s), g'(s), g''(s) of the radial profile in the variable s = |x - c|^2
    double g = 0.0, g1 = 0.0, g2 = 0.0;
    switch (spec.family) {
        case Family::gaussian_bump: {
            g = spec.amplitude * std::exp(-t);
            g1 = -g / w2;
            g2 = g / (w2 * w2);
            break;
        }
        case Family::smooth_compact_bump: {
            if (t < 1.0) {
                const double a = 1.0 / (1.0 - t);
                g = spec.amplitude * std::exp(1.0 - a);
                g1 = -g * a * a / w2;
                g2 = g * (std::pow(a, 4) - 2.0 * std::pow(a, 3)) / (w2 * w2);
            }
            break;
        }
        case Family::power_tail: {
            const double half = 0.5 * spec.mu;
            g = spec.amplitude * std::pow(1.0 + t, -half);
            g1 = -half * spec.amplitude * std::pow(1.0 + t, -half - 1.0) / w2;
            g2 = half * (half + 1.0) * spec.amplitude * std::pow(1.0 + t, -half - 2.0) / (w2 * w2);
            break;
        }
        case Family::pure_gauge:
            throw ValidationError("pure_gauge is not a scalar profile");
    }
    ProfileSample out;
    out.value = g;
    for (int d = 0; d < dim; ++d) out.gradient[d] = 2.0 * g1 * dx[d];
    out.laplacian = 4.0 * s * g2 + 2.0 * dim * g1;
    return out;
}

void validate_spec(const PotentialSpec& spec, bool magnetic, const Grid& grid) {
    if (spec.family == Family::pure_gauge) {
        if (!magnetic) throw ValidationError("pure_gauge applies only to the magnetic potential W, not to V");
        if (!spec.generator) throw ValidationError("pure_gauge term needs a generator phi");
        if (spec.generator->family == Family::pure_gauge)
            throw ValidationError("pure_gauge generator must be a scalar profile");
        validate_spec(*spec.generator, false, grid);
        return;
    }
    if (!(spec.width > 0.0)) throw ValidationError("potential width must be positive");
    if (!std::isfinite(spec.amplitude)) throw ValidationError("potential amplitude must be finite");
    if (magnetic && (spec.axis < 0 || spec.axis >= grid.dim()))
        throw ValidationError("magnetic component term needs an axis in [0, dim)");
    if (spec.family == Family::power_tail && !(spec.mu > 2.0)) {
        std::ostringstream os;
        os << "power_tail decay exponent mu = " << spec.mu
           << " violates the decay condition mu > 2 (|V|, |W|, |grad W| <= c/|x|^mu)";
        throw ValidationError(os.str());
    }
    if (spec.family == Family::smooth_compact_bump) {
        for (int d = 0; d < grid.dim(); ++d)
            if (std::abs(spec.center[d]) + spec.width >= grid.half_width())
                throw ValidationError("smooth_compact_bump support must lie inside the grid box");
    }
}

namespace {

// Generous default decay constant: sup over the grid of |term| * max(1,|x|)^mu summed over terms.
double default_decay_constant(const PotentialData& p) {
    const Grid& g = p.grid;
    double c = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = std::max(1.0, norm(g.point(i)));
        double wmag = 0.0;
        for (const auto& w : p.W) wmag += w[i] * w[i];
        const double m = std::max({std::abs(p.V[i]), std::sqrt(wmag), std::abs(p.divW[i])});
        c = std::max(c, m * std::pow(r, p.mu));
    }
    return c > 0.0 ? 2.0 * c : 1.0;
}

}  // namespace

PotentialData zero_potential(const Grid& grid) {
    PotentialData p;
    p.grid = grid;
    p.V = RealField(grid, 0.0);
    p.W.assign(grid.dim(), RealField(grid, 0.0));
    p.divW = RealField(grid, 0.0);
    p.q_tilde = RealField(grid, 0.0);
    return p;
}

PotentialData sample_potential(const ScalarPotentialSpec& V, const VectorPotentialSpec& W, const Grid& grid,
                               std::optional<DecayBound> decay) {
    for (const auto& t : V.terms) validate_spec(t, false, grid);
    for (const auto& t : W.terms) validate_spec(t, true, grid);

    PotentialData p = zero_potential(grid);
    const int dim = grid.dim();
    double mu = std::numeric_limits<double>::infinity();
    auto note_mu = [&](const PotentialSpec& s) {
        const PotentialSpec& base = s.family == Family::pure_gauge ? *s.generator : s;
        mu = std::min(mu, base.mu);
    };

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec x = grid.point(i);
        double v = 0.0;
        for (const auto& t : V.terms) v += evaluate_profile(t, x, dim).value;
        p.V[i] = v;
        for (const auto& t : W.terms) {
            if (t.family == Family::pure_gauge) {
                const auto phi = evaluate_profile(*t.generator, x, dim);
                for (int d = 0; d < dim; ++d) p.W[d][i] += phi.gradient[d];
                p.divW[i] += phi.laplacian;
            } else {
                const auto prof = evaluate_profile(t, x, dim);
                p.W[t.axis][i] += prof.value;
                p.divW[i] += prof.gradient[t.axis];
            }
        }
        double w2 = 0.0;
        for (int d = 0; d < dim; ++d) w2 += p.W[d][i] * p.W[d][i];
        p.q_tilde[i] = w2 + p.V[i];
    }
    for (const auto& t : V.terms) note_mu(t);
    for (const auto& t : W.terms) note_mu(t);

    p.magnetic_ = false;
    for (const auto& t : W.terms) {
        const PotentialSpec& base = t.family == Family::pure_gauge ? *t.generator : t;
        if (base.amplitude != 0.0) p.magnetic_ = true;
    }
    p.zero_ = true;
    for (std::size_t i = 0; i < grid.size() && p.zero_; ++i)
        if (p.q_tilde[i] != 0.0 || p.divW[i] != 0.0) p.zero_ = false;
    for (const auto& w : p.W)
        for (std::size_t i = 0; i < grid.size() && p.zero_; ++i)
            if (w[i] != 0.0) p.zero_ = false;

    if (decay) {
        p.mu = decay->mu;
        p.c_decay = decay->c;
    } else {
        p.mu = std::isfinite(mu) ? mu : 3.0;
        p.c_decay = default_decay_constant(p);
    }
    return p;
}

ConditionReport check_conditions(const PotentialData& potential, double p, double delta) {
    const Grid& g = potential.grid;
    ConditionReport r;
    r.dim = g.dim();
    r.mu = potential.mu;
    r.p = p;
    r.delta = delta;
    r.c_decay = potential.c_decay;
    r.mu_ok = potential.mu > 2.0;
    const double n = g.dim();
    r.delta_threshold = 0.5 * (n + 1.0) - (std::isinf(p) ? 0.0 : n / p);
    r.delta_ok = delta > r.delta_threshold;
    if (!r.mu_ok) r.reasons.push_back("mu <= 2: decay condition mu > 2 violated");
    if (!r.delta_ok) {
        std::ostringstream os;
        os << "delta <= (n+1)/2 - n/p = " << r.delta_threshold;
        r.reasons.push_back(os.str());
    }

    const double r_min = 0.5 * g.half_width();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double rx = norm(g.point(i));
        if (rx <= r_min) continue;
        const double wgt = std::pow(rx, potential.mu);
        double w2 = 0.0;
        for (const auto& w : potential.W) w2 += w[i] * w[i];
        r.sup_V = std::max(r.sup_V, std::abs(potential.V[i]) * wgt);
        r.sup_W = std::max(r.sup_W, std::sqrt(w2) * wgt);
        r.sup_divW = std::max(r.sup_divW, std::abs(potential.divW[i]) * wgt);
    }
    r.decay_ok = r.sup_V <= r.c_decay && r.sup_W <= r.c_decay && r.sup_divW <= r.c_decay;
    if (!r.decay_ok) r.reasons.push_back("sampled |V|,|W|,|div W| times |x|^mu exceeds declared c");
    r.low_mu_flag = potential.mu < 3.0;
    r.note = "a single declared mu bounds V, W and div W together";
    r.pass = r.mu_ok && r.delta_ok && r.decay_ok;
    return r;
}

}  // namespace magscatter
