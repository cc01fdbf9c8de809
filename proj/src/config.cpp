#include "magscatter/config.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "magscatter/error.hpp"

namespace magscatter {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError("config " + path + ": " + what);
}

void only_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(path, "must be an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

double positive(const json& j, const std::string& path) {
    const double v = number(j, path);
    if (!(v > 0.0)) fail(path, "must be positive");
    return v;
}

int integer(const json& j, const std::string& path, int lo, int hi) {
    if (!j.is_number_integer()) fail(path, "must be an integer");
    const long long v = j.get<long long>();
    if (v < lo || v > hi) fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "must be a string");
    return j.get<std::string>();
}

Vec vec(const json& j, const std::string& path, int dim) {
    if (!j.is_array() || (j.size() != static_cast<std::size_t>(dim)))
        fail(path, "must be an array of " + std::to_string(dim) + " numbers");
    Vec v{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) v[d] = number(j[d], path + "[" + std::to_string(d) + "]");
    return v;
}

Vec unit(const json& j, const std::string& path, int dim) {
    const Vec v = vec(j, path, dim);
    if (std::abs(norm(v) - 1.0) > 1e-12) fail(path, "must be a unit vector (|theta| = 1 within 1e-12)");
    return v;
}

PotentialSpec term(const json& j, const std::string& path, int dim, bool magnetic) {
    only_keys(j, path, {"family", "amplitude", "width", "radius", "mu", "center", "axis", "generator"});
    if (!j.contains("family")) fail(path + ".family", "required");
    Family family;
    try {
        family = family_from_string(text(j["family"], path + ".family"));
    } catch (const ValidationError& e) {
        fail(path + ".family", e.what());
    }
    if (family == Family::pure_gauge) {
        if (!magnetic) fail(path, "pure_gauge terms belong to W");
        if (!j.contains("generator")) fail(path + ".generator", "required for pure_gauge");
        return PotentialSpec::gauge(term(j["generator"], path + ".generator", dim, false));
    }
    const double amp = j.contains("amplitude") ? number(j["amplitude"], path + ".amplitude") : 0.0;
    const Vec c = j.contains("center") ? vec(j["center"], path + ".center", dim) : Vec{0.0, 0.0, 0.0};
    const std::string wkey = family == Family::smooth_compact_bump && j.contains("radius") ? "radius" : "width";
    const double width = j.contains(wkey) ? positive(j[wkey], path + "." + wkey) : 1.0;
    PotentialSpec spec;
    switch (family) {
        case Family::gaussian_bump: spec = PotentialSpec::gaussian(amp, width, c); break;
        case Family::smooth_compact_bump: spec = PotentialSpec::compact_bump(amp, width, c); break;
        case Family::power_tail: {
            const double mu = j.contains("mu") ? number(j["mu"], path + ".mu") : 3.0;
            if (!(mu > 2.0)) fail(path + ".mu", "power_tail requires mu > 2 (decay condition), got " + std::to_string(mu));
            spec = PotentialSpec::power(amp, width, mu, c);
            break;
        }
        default: break;
    }
    if (magnetic) {
        if (!j.contains("axis")) fail(path + ".axis", "required for non-gauge W terms");
        spec = spec.along(integer(j["axis"], path + ".axis", 0, dim - 1));
    } else if (j.contains("axis")) {
        fail(path + ".axis", "only W terms have an axis");
    }
    return spec;
}

}  // namespace

std::string to_string(SweepConfig::Axis axis) {
    switch (axis) {
        case SweepConfig::Axis::epsilon: return "epsilon";
        case SweepConfig::Axis::k: return "k";
        case SweepConfig::Axis::resolution: return "resolution";
    }
    return "?";
}

Grid ExperimentConfig::make_grid() const { return magscatter::make_grid(grid.dim, grid.half_width, grid.points_per_axis); }

PotentialData ExperimentConfig::sample(const Grid& g) const { return sample_potential(V, W, g, decay); }

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    only_keys(root, "$", {"grid", "potential", "wave", "solver", "amplitude", "born", "sweep", "invert", "comment"});
    ExperimentConfig c;

    if (!root.contains("grid")) fail("grid", "required");
    const json& g = root["grid"];
    only_keys(g, "grid", {"dim", "half_width", "points_per_axis"});
    c.grid.dim = integer(g.value("dim", json(3)), "grid.dim", 2, 3);
    c.grid.half_width = positive(g.value("half_width", json(4.0)), "grid.half_width");
    c.grid.points_per_axis = integer(g.value("points_per_axis", json(32)), "grid.points_per_axis", 8, 4096);
    if (c.grid.points_per_axis % 2) fail("grid.points_per_axis", "must be even");
    const int dim = c.grid.dim;

    if (root.contains("potential")) {
        const json& p = root["potential"];
        only_keys(p, "potential", {"V", "W", "decay"});
        for (const char* key : {"V", "W"}) {
            if (!p.contains(key)) continue;
            if (!p[key].is_array()) fail(std::string("potential.") + key, "must be an array of terms");
            for (std::size_t i = 0; i < p[key].size(); ++i) {
                const std::string path = std::string("potential.") + key + "[" + std::to_string(i) + "]";
                const bool magnetic = key[0] == 'W';
                (magnetic ? c.W.terms : c.V.terms).push_back(term(p[key][i], path, dim, magnetic));
            }
        }
        if (p.contains("decay")) {
            only_keys(p["decay"], "potential.decay", {"mu", "c"});
            DecayBound b;
            b.mu = number(p["decay"].value("mu", json(3.0)), "potential.decay.mu");
            b.c = positive(p["decay"].value("c", json(1.0)), "potential.decay.c");
            c.decay = b;
        }
    }

    if (!root.contains("wave")) fail("wave", "required");
    const json& w = root["wave"];
    only_keys(w, "wave", {"k", "k_list", "theta", "theta_list"});
    if (w.contains("k") == w.contains("k_list")) fail("wave", "give exactly one of k, k_list");
    if (w.contains("k")) {
        c.k_list.push_back(positive(w["k"], "wave.k"));
    } else {
        if (!w["k_list"].is_array() || w["k_list"].empty()) fail("wave.k_list", "must be a non-empty array");
        for (std::size_t i = 0; i < w["k_list"].size(); ++i)
            c.k_list.push_back(positive(w["k_list"][i], "wave.k_list[" + std::to_string(i) + "]"));
    }
    if (w.contains("theta") == w.contains("theta_list")) fail("wave", "give exactly one of theta, theta_list");
    if (w.contains("theta")) {
        c.theta_list.push_back(unit(w["theta"], "wave.theta", dim));
    } else {
        if (!w["theta_list"].is_array() || w["theta_list"].empty())
            fail("wave.theta_list", "must be a non-empty array");
        for (std::size_t i = 0; i < w["theta_list"].size(); ++i)
            c.theta_list.push_back(unit(w["theta_list"][i], "wave.theta_list[" + std::to_string(i) + "]", dim));
    }

    if (root.contains("solver")) {
        const json& s = root["solver"];
        only_keys(s, "solver", {"method", "tol", "max_iters", "max_terms", "delta", "norm_iters", "quadrature", "kernel"});
        try {
            if (s.contains("method")) c.solver.method = solve_method_from_string(text(s["method"], "solver.method"));
            if (s.contains("quadrature"))
                c.solver.quadrature = quadrature_from_string(text(s["quadrature"], "solver.quadrature"));
            if (s.contains("kernel")) c.solver.rule = kernel_rule_from_string(text(s["kernel"], "solver.kernel"));
        } catch (const ValidationError& e) {
            fail("solver", e.what());
        }
        if (s.contains("tol")) c.solver.tol = positive(s["tol"], "solver.tol");
        if (c.solver.tol >= 1.0) fail("solver.tol", "must be below 1");
        if (s.contains("max_iters")) c.solver.max_iters = integer(s["max_iters"], "solver.max_iters", 1, 100000);
        if (s.contains("max_terms")) c.solver.max_terms = integer(s["max_terms"], "solver.max_terms", 1, 100000);
        if (s.contains("delta")) c.solver.delta = positive(s["delta"], "solver.delta");
        if (s.contains("norm_iters")) c.solver.norm_iters = integer(s["norm_iters"], "solver.norm_iters", 10, 10000);
    }

    if (root.contains("amplitude")) {
        const json& a = root["amplitude"];
        only_keys(a, "amplitude", {"directions", "farfield_radii"});
        if (a.contains("directions")) {
            const json& d = a["directions"];
            auto& dc = c.directions;
            if (d.is_string()) {
                const std::string s = d.get<std::string>();
                if (s == "backscatter") dc.kind = DirectionConfig::Kind::backscatter;
                else if (s == "default") dc.kind = DirectionConfig::Kind::default_set;
                else fail("amplitude.directions", "unknown direction set '" + s + "'");
            } else if (d.is_object() && d.contains("count")) {
                only_keys(d, "amplitude.directions", {"count"});
                if (dim != 2) fail("amplitude.directions.count", "equispaced angles are 2D only");
                dc.kind = DirectionConfig::Kind::circle;
                dc.count = integer(d["count"], "amplitude.directions.count", 1, 100000);
            } else if (d.is_object()) {
                only_keys(d, "amplitude.directions", {"n_polar", "n_azimuth"});
                if (dim != 3) fail("amplitude.directions", "latitude-longitude sets are 3D only");
                dc.kind = DirectionConfig::Kind::latlong;
                dc.n_polar = integer(d.value("n_polar", json(16)), "amplitude.directions.n_polar", 1, 10000);
                dc.n_azimuth = integer(d.value("n_azimuth", json(32)), "amplitude.directions.n_azimuth", 1, 10000);
            } else if (d.is_array()) {
                dc.kind = DirectionConfig::Kind::explicit_list;
                for (std::size_t i = 0; i < d.size(); ++i)
                    dc.list.push_back(unit(d[i], "amplitude.directions[" + std::to_string(i) + "]", dim));
            } else {
                fail("amplitude.directions", "must be a name, an object or a list of unit vectors");
            }
        }
        if (a.contains("farfield_radii")) {
            const json& r = a["farfield_radii"];
            if (!r.is_array()) fail("amplitude.farfield_radii", "must be an array");
            for (std::size_t i = 0; i < r.size(); ++i) {
                const double v = positive(r[i], "amplitude.farfield_radii[" + std::to_string(i) + "]");
                if (v > 0.8 * c.grid.half_width) fail("amplitude.farfield_radii", "radii must not exceed 0.8 * half_width");
                c.farfield_radii.push_back(v);
            }
            if (c.farfield_radii.size() < 3) fail("amplitude.farfield_radii", "at least 3 radii required");
        }
    }

    if (root.contains("born")) {
        const json& b = root["born"];
        only_keys(b, "born", {"pv_shell_gap", "angular_order", "second_order"});
        if (b.contains("pv_shell_gap")) {
            const double gap = positive(b["pv_shell_gap"], "born.pv_shell_gap");
            for (double k : c.k_list)
                if (gap >= k / 4.0) fail("born.pv_shell_gap", "must be below k/4 for every k");
            c.born.pv_shell_gap = gap;
        }
        if (b.contains("angular_order")) c.born.angular_order = integer(b["angular_order"], "born.angular_order", 2, 512);
        if (b.contains("second_order")) {
            if (!b["second_order"].is_boolean()) fail("born.second_order", "must be a boolean");
            c.born.second_order = b["second_order"].get<bool>();
        }
    }

    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        only_keys(s, "sweep", {"axis", "values"});
        SweepConfig sc;
        const std::string axis = text(s.value("axis", json("epsilon")), "sweep.axis");
        if (axis == "epsilon") sc.axis = SweepConfig::Axis::epsilon;
        else if (axis == "k") sc.axis = SweepConfig::Axis::k;
        else if (axis == "resolution") sc.axis = SweepConfig::Axis::resolution;
        else fail("sweep.axis", "must be epsilon, k or resolution");
        if (!s.contains("values") || !s["values"].is_array() || s["values"].empty())
            fail("sweep.values", "must be a non-empty array");
        for (std::size_t i = 0; i < s["values"].size(); ++i) {
            const std::string path = "sweep.values[" + std::to_string(i) + "]";
            const double v = sc.axis == SweepConfig::Axis::resolution
                                 ? integer(s["values"][i], path, 8, 4096)
                                 : positive(s["values"][i], path);
            if (sc.axis == SweepConfig::Axis::resolution && static_cast<int>(v) % 2) fail(path, "must be even");
            if (!sc.values.empty() && !(v > sc.values.back())) fail("sweep.values", "must be strictly increasing");
            sc.values.push_back(v);
        }
        c.sweep = sc;
    }

    if (root.contains("invert")) {
        const json& v = root["invert"];
        only_keys(v, "invert", {"half_width", "points_per_axis", "source"});
        if (v.contains("half_width")) c.invert.half_width = positive(v["half_width"], "invert.half_width");
        if (v.contains("points_per_axis")) {
            c.invert.points_per_axis = integer(v["points_per_axis"], "invert.points_per_axis", 8, 4096);
            if (c.invert.points_per_axis % 2) fail("invert.points_per_axis", "must be even");
        }
        if (v.contains("source")) {
            const std::string s = text(v["source"], "invert.source");
            if (s != "solver" && s != "born") fail("invert.source", "must be solver or born");
            c.invert.from_solver = s == "solver";
        }
    }
    return c;
}

}  // namespace magscatter
