#include "magscatter/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "magscatter/born.hpp"
#include "magscatter/error.hpp"
#include "magscatter/farfield.hpp"
#include "magscatter/io.hpp"

namespace magscatter {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double x) { return format_double(x); }

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

json vec_json(const Vec& v, int dim) {
    json a = json::array();
    for (int d = 0; d < dim; ++d) a.push_back(v[d]);
    return a;
}

Vec negate(const Vec& v) { return {-v[0], -v[1], -v[2]}; }

/// CSV table with a header row; '.' decimals, ',' separators.
class Table {
public:
    explicit Table(std::vector<std::string> header) : width_(header.size()) { add(header); }

    void add(const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) text_ += (i ? "," : "") + row[i];
        for (std::size_t i = row.size(); i < width_; ++i) text_ += ",";
        text_ += "\n";
    }
    const std::string& text() const { return text_; }

private:
    std::size_t width_;
    std::string text_;
};

std::vector<std::string> direction_columns(const Vec& v, int dim) {
    std::vector<std::string> out;
    for (int d = 0; d < dim; ++d) out.push_back(num(v[d]));
    return out;
}

std::vector<std::string> direction_header(const std::string& prefix, int dim) {
    std::vector<std::string> out;
    const char* axes = "xyz";
    for (int d = 0; d < dim; ++d) out.push_back(prefix + "_" + axes[d]);
    return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

json condition_json(const ConditionReport& r) {
    return json{{"pass", r.pass},         {"mu", r.mu},           {"mu_ok", r.mu_ok},
                {"delta", r.delta},       {"delta_ok", r.delta_ok}, {"delta_threshold", r.delta_threshold},
                {"c_decay", r.c_decay},   {"decay_ok", r.decay_ok}, {"low_mu_flag", r.low_mu_flag},
                {"reasons", r.reasons},   {"note", r.note}};
}

struct SolveRecord {
    double k = 0.0;
    Vec theta{};
    ScatteringSolution solution;
    double residual_pde = 0.0;
};

/// Everything computed for one wavenumber: operator, norm estimate, c0 per direction.
struct Context {
    const ExperimentConfig& config;
    Grid grid;
    PotentialData potential;
    QuadratureMode quadrature;
    json runs = json::array();

    SolverOptions options() const {
        SolverOptions o;
        o.quadrature = quadrature;
        o.rule = config.solver.rule;
        o.delta = config.solver.delta;
        return o;
    }

    double norm_estimate(const LkOperator& op) const {
        return estimate_operator_norm_detail(op, config.solver.delta, config.solver.norm_iters, quadrature).value;
    }

    SolveRecord solve(const LkOperator& op, double norm, const Vec& theta) {
        const WaveParams wave{op.k(), theta};
        SolveRecord rec{op.k(), theta, {}, 0.0};
        rec.solution = config.solver.method == SolveMethod::direct
                           ? solve_direct(op, wave, config.solver.tol, config.solver.max_iters, options())
                           : solve_born_series(op, wave, config.solver.max_terms, config.solver.tol, options());
        rec.residual_pde = residual_pde(rec.solution, potential);
        const double c0 =
            weighted_norm(tilde_u0_pair(op, wave, quadrature).value, {2.0, -config.solver.delta});
        json entry{{"k", op.k()},
                   {"theta", vec_json(theta, grid.dim())},
                   {"method", to_string(rec.solution.method)},
                   {"iterations", rec.solution.iterations},
                   {"linear_residual", rec.solution.linear_residual},
                   {"residual_pde", rec.residual_pde},
                   {"norm_estimate", norm},
                   {"c0", c0},
                   {"remainder_bound", norm < 1.0 ? json(remainder_bound(c0, norm)) : json(nullptr)}};
        if (!rec.solution.born_ratio_history.empty()) entry["born_ratio_history"] = rec.solution.born_ratio_history;
        runs.push_back(entry);
        return rec;
    }

    std::vector<Vec> theta_primes(const Vec& theta) const {
        const auto& d = config.directions;
        switch (d.kind) {
            case DirectionConfig::Kind::backscatter: return {negate(theta)};
            case DirectionConfig::Kind::default_set: return default_directions(grid.dim()).directions;
            case DirectionConfig::Kind::circle: return circle_directions(d.count).directions;
            case DirectionConfig::Kind::latlong: return latlong_directions(d.n_polar, d.n_azimuth).directions;
            case DirectionConfig::Kind::explicit_list: return d.list;
        }
        return {};
    }

    double gap(double k) const { return config.born.pv_shell_gap.value_or(k / 8.0); }
};

class Bundle {
public:
    Bundle(const RunRequest& req, const std::string& config_bytes) : dir_(req.out_dir) {
        fs::create_directories(dir_);
        write_file_atomic(path_in(dir_, "config.json"), config_bytes);
        diagnostics_ = json{{"tool_version", kToolVersion}, {"command", req.command}};
        if (req.seed) diagnostics_["seed"] = *req.seed;
    }
    void text(const std::string& name, const std::string& contents) { write_file_atomic(path_in(dir_, name), contents); }
    std::string path(const std::string& name) const { return path_in(dir_, name); }
    json& diagnostics() { return diagnostics_; }
    void finish() { text("diagnostics.json", diagnostics_.dump(2) + "\n"); }

private:
    std::string dir_;
    json diagnostics_;
};

void command_solve(Context& ctx, Bundle& out, bool amplitudes) {
    const int dim = ctx.grid.dim();
    Table amp(concat(concat(concat({"k"}, direction_header("theta", dim)), direction_header("theta_prime", dim)),
                     {"re", "im", "abs", "method"}));
    Table index(concat(concat({"file", "k"}, direction_header("theta", dim)), {"iterations", "linear_residual"}));
    for (std::size_t ik = 0; ik < ctx.config.k_list.size(); ++ik) {
        const LkOperator op(ctx.potential, ctx.config.k_list[ik], ctx.config.solver.rule);
        const double norm = ctx.norm_estimate(op);
        for (std::size_t it = 0; it < ctx.config.theta_list.size(); ++it) {
            const Vec& theta = ctx.config.theta_list[it];
            const SolveRecord rec = ctx.solve(op, norm, theta);
            const std::string file = "u_sc_" + std::to_string(ik) + "_" + std::to_string(it) + ".bin";
            write_field(out.path(file), rec.solution.u_sc);
            index.add(concat(concat({file, num(rec.k)}, direction_columns(theta, dim)),
                             {std::to_string(rec.solution.iterations), num(rec.solution.linear_residual)}));
            if (!amplitudes) continue;
            auto emit = [&](const Vec& tp, complex value, AmplitudeMethod m) {
                amp.add(concat(concat(concat({num(rec.k)}, direction_columns(theta, dim)),
                                      direction_columns(tp, dim)),
                               {num(value.real()), num(value.imag()), num(std::abs(value)), to_string(m)}));
            };
            const std::vector<Vec> tps = ctx.theta_primes(theta);
            for (const auto& r : amplitude_integral(rec.solution, ctx.potential, tps))
                emit(r.theta_prime, r.value, r.method);
            if (ctx.config.farfield_radii.size() >= 3)
                for (const Vec& tp : tps)
                    emit(tp, farfield_fit(rec.solution, ctx.potential, rec.k, ctx.config.farfield_radii, tp),
                         AmplitudeMethod::farfield_fit);
        }
    }
    out.text("solutions.csv", index.text());
    if (amplitudes) out.text("amplitudes.csv", amp.text());
}

void command_born(Context& ctx, Bundle& out) {
    const int dim = ctx.grid.dim();
    Table amp(concat(concat(concat({"k"}, direction_header("theta", dim)), direction_header("theta_prime", dim)),
                     {"re", "im", "abs", "method"}));
    Table terms(concat(concat({"k"}, direction_header("theta", dim)),
                       {"I1_re", "I1_im", "I2_re", "I2_im", "I3_re", "I3_im", "I4_re", "I4_im", "eta_max",
                        "tail_estimate"}));
    for (double k : ctx.config.k_list)
        for (const Vec& theta : ctx.config.theta_list) {
            auto emit = [&](const Vec& tp, complex v, AmplitudeMethod m) {
                amp.add(concat(concat(concat({num(k)}, direction_columns(theta, dim)),
                                      direction_columns(tp, dim)),
                               {num(v.real()), num(v.imag()), num(std::abs(v)), to_string(m)}));
            };
            for (const Vec& tp : ctx.theta_primes(theta))
                emit(tp, born_amplitude(ctx.potential, k, theta, tp), AmplitudeMethod::born_first_order);
            if (!ctx.config.born.second_order) continue;
            const SecondOrderTerms t = second_order_fourier(ctx.potential, k, theta, ctx.gap(k),
                                                            ctx.config.born.angular_order);
            emit(negate(theta), backscatter_born(ctx.potential, k, theta) + t.sum(), AmplitudeMethod::born_improved);
            terms.add(concat(concat({num(k)}, direction_columns(theta, dim)),
                             {num(t.I1.real()), num(t.I1.imag()), num(t.I2.real()), num(t.I2.imag()),
                              num(t.I3.real()), num(t.I3.imag()), num(t.I4.real()), num(t.I4.imag()),
                              num(t.eta_max), num(t.tail_estimate)}));
        }
    out.text("amplitudes.csv", amp.text());
    if (ctx.config.born.second_order) out.text("second_order.csv", terms.text());
}

struct Comparison {
    complex A, AB, improved;
    double norm = 0.0, residual = 0.0;
    std::optional<double> bound;
};

Comparison compare_one(Context& ctx, const LkOperator& op, double norm, const Vec& theta) {
    const SolveRecord rec = ctx.solve(op, norm, theta);
    Comparison c;
    c.A = amplitude_integral(rec.solution, ctx.potential, {negate(theta)})[0].value;
    c.AB = backscatter_born(ctx.potential, op.k(), theta);
    c.improved = c.AB + second_order_fourier(ctx.potential, op.k(), theta, ctx.gap(op.k()),
                                             ctx.config.born.angular_order)
                            .sum();
    c.norm = norm;
    c.residual = rec.residual_pde;
    if (!ctx.runs.back()["remainder_bound"].is_null()) c.bound = ctx.runs.back()["remainder_bound"].get<double>();
    return c;
}

void command_compare(Context& ctx, Bundle& out) {
    const int dim = ctx.grid.dim();
    Table t(concat(concat({"k"}, direction_header("theta", dim)),
                   {"A_re", "A_im", "A_B_re", "A_B_im", "A_improved_re", "A_improved_im", "abs_A_minus_AB",
                    "abs_A_minus_improved", "norm_estimate", "residual", "remainder_bound"}));
    for (double k : ctx.config.k_list) {
        const LkOperator op(ctx.potential, k, ctx.config.solver.rule);
        const double norm = ctx.norm_estimate(op);
        for (const Vec& theta : ctx.config.theta_list) {
            const Comparison c = compare_one(ctx, op, norm, theta);
            t.add(concat(concat({num(k)}, direction_columns(theta, dim)),
                         {num(c.A.real()), num(c.A.imag()), num(c.AB.real()), num(c.AB.imag()),
                          num(c.improved.real()), num(c.improved.imag()), num(std::abs(c.A - c.AB)),
                          num(std::abs(c.A - c.improved)), num(c.norm), num(c.residual),
                          c.bound ? num(*c.bound) : ""}));
        }
    }
    out.text("compare.csv", t.text());
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += std::log(x[i]) / n, my += std::log(y[i]) / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

void command_sweep(const ExperimentConfig& base, QuadratureMode quadrature, Bundle& out) {
    if (!base.sweep) throw ValidationError("config sweep: required for the sweep command");
    const SweepConfig& sw = *base.sweep;
    Table t({"value", "abs_A_minus_AB", "abs_A_minus_improved", "norm_estimate", "residual", "remainder_bound",
             "k_resolvent_ratio"});
    std::vector<double> xs, e1, e2;
    json runs = json::array();
    auto flush = [&](bool complete) {
        if (complete && xs.size() >= 2)
            t.add({"slope", num(loglog_slope(xs, e1)), num(loglog_slope(xs, e2))});
        out.text("sweep.csv", t.text());
        out.diagnostics()["runs"] = runs;
        out.diagnostics()["sweep_axis"] = to_string(sw.axis);
    };
    try {
        for (double v : sw.values) {
            ExperimentConfig cfg = base;
            if (sw.axis == SweepConfig::Axis::epsilon) {
                cfg.V = base.V.scaled(v);
                cfg.W = base.W.scaled(v);
            } else if (sw.axis == SweepConfig::Axis::k) {
                cfg.k_list = {v};
            } else {
                cfg.grid.points_per_axis = static_cast<int>(v);
            }
            const Grid grid = cfg.make_grid();
            Context ctx{cfg, grid, cfg.sample(grid), quadrature};
            const double k = cfg.k_list.front();
            const LkOperator op(ctx.potential, k, cfg.solver.rule);
            const double norm = ctx.norm_estimate(op);
            const Comparison c = compare_one(ctx, op, norm, cfg.theta_list.front());
            std::string agmon;
            if (k >= 1.0 && !ctx.potential.is_zero()) {
                ComplexField probe(grid);
                for (std::size_t i = 0; i < grid.size(); ++i) probe[i] = ctx.potential.q_tilde[i];
                agmon = num(verify_agmon_decay(grid, cfg.solver.delta, {k}, probe, cfg.solver.rule)[0].k_ratio);
            }
            const double d1 = std::abs(c.A - c.AB), d2 = std::abs(c.A - c.improved);
            t.add({num(v), num(d1), num(d2), num(c.norm), num(c.residual), c.bound ? num(*c.bound) : "", agmon});
            for (auto& r : ctx.runs) runs.push_back(r);
            xs.push_back(v);
            e1.push_back(d1);
            e2.push_back(d2);
        }
    } catch (...) {
        flush(false);
        throw;
    }
    flush(true);
}

void command_invert(Context& ctx, Bundle& out) {
    const int dim = ctx.grid.dim();
    std::vector<AmplitudeRecord> records;
    Table t(concat(concat({"k"}, direction_header("theta", dim)), {"re", "im", "method"}));
    for (double k : ctx.config.k_list) {
        std::unique_ptr<LkOperator> op;
        double norm = 0.0;
        if (ctx.config.invert.from_solver) {
            op = std::make_unique<LkOperator>(ctx.potential, k, ctx.config.solver.rule);
            norm = ctx.norm_estimate(*op);
        }
        for (const Vec& theta : ctx.config.theta_list) {
            AmplitudeRecord r;
            if (op) {
                r = amplitude_integral(ctx.solve(*op, norm, theta).solution, ctx.potential, {negate(theta)})[0];
            } else {
                r = {k, theta, negate(theta), backscatter_born(ctx.potential, k, theta),
                     AmplitudeMethod::born_first_order};
            }
            t.add(concat(concat({num(k)}, direction_columns(theta, dim)),
                         {num(r.value.real()), num(r.value.imag()), to_string(r.method)}));
            records.push_back(r);
        }
    }
    out.text("backscatter.csv", t.text());
    const Grid target = make_grid(dim, ctx.config.invert.half_width, ctx.config.invert.points_per_axis);
    write_field(out.path("reconstruction.bin"), invert_backscatter(records, target));
}

struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw ValidationError("CSV column '" + name + "' missing");
    }
};

CsvData read_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    CsvData d;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (first) d.header = cells, first = false;
        else d.rows.push_back(cells);
    }
    return d;
}

}  // namespace

void export_plotdata(const std::string& dir, const std::string& kind) {
    if (kind == "amplitude_vs_angle") {
        const CsvData d = read_csv(path_in(dir, "amplitudes.csv"));
        const bool three = std::find(d.header.begin(), d.header.end(), "theta_z") != d.header.end();
        std::string out = three ? "# angle_between_theta_and_theta_prime\tabs\tre\tim\n" : "# angle_of_theta_prime\tabs\tre\tim\n";
        for (const auto& r : d.rows) {
            double angle;
            if (three) {
                const Vec th{std::stod(r[d.column("theta_x")]), std::stod(r[d.column("theta_y")]),
                             std::stod(r[d.column("theta_z")])};
                const Vec tp{std::stod(r[d.column("theta_prime_x")]), std::stod(r[d.column("theta_prime_y")]),
                             std::stod(r[d.column("theta_prime_z")])};
                angle = std::acos(std::clamp(dot(th, tp), -1.0, 1.0));
            } else {
                angle = std::atan2(std::stod(r[d.column("theta_prime_y")]), std::stod(r[d.column("theta_prime_x")]));
            }
            out += num(angle) + "\t" + r[d.column("abs")] + "\t" + r[d.column("re")] + "\t" + r[d.column("im")] + "\n";
        }
        write_file_atomic(path_in(dir, "plot_amplitude_vs_angle.txt"), out);
    } else if (kind == "field_slice") {
        const ComplexField f = read_complex_field(path_in(dir, "u_sc_0_0.bin"));
        const Grid& g = f.grid();
        const int m = g.points_per_axis();
        // 2D: the whole grid; 3D: the slice through the middle of the last axis.
        const std::size_t stride = g.dim() == 3 ? static_cast<std::size_t>(m) : 1;
        const std::size_t offset = g.dim() == 3 ? static_cast<std::size_t>(m / 2) : 0;
        std::string re = "# real part, rows = first axis, columns = second axis\n";
        std::string im = "# imaginary part, rows = first axis, columns = second axis\n";
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const std::size_t idx = (static_cast<std::size_t>(i) * m + j) * stride + offset;
                re += (j ? "\t" : "") + num(f[idx].real());
                im += (j ? "\t" : "") + num(f[idx].imag());
            }
            re += "\n";
            im += "\n";
        }
        write_file_atomic(path_in(dir, "plot_field_slice_re.txt"), re);
        write_file_atomic(path_in(dir, "plot_field_slice_im.txt"), im);
    } else if (kind == "sweep_curve") {
        const CsvData d = read_csv(path_in(dir, "sweep.csv"));
        std::string out = "#";
        for (std::size_t i = 0; i < d.header.size(); ++i) out += (i ? "\t" : " ") + d.header[i];
        out += "\n";
        for (const auto& r : d.rows) {
            if (!r.empty() && r[0] == "slope") continue;
            for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "\t" : "") + (r[i].empty() ? "nan" : r[i]);
            out += "\n";
        }
        write_file_atomic(path_in(dir, "plot_sweep.txt"), out);
    } else {
        throw ValidationError("unknown export kind '" + kind + "' (amplitude_vs_angle, field_slice, sweep_curve)");
    }
}

ExitCode run(const RunRequest& req) {
    auto report = [&](ExitCode code, const std::string& status, const std::string& message, const json& extra) {
        json err{{"status", status}, {"message", message}, {"exit_code", static_cast<int>(code)}};
        err.update(extra);
        std::cerr << err.dump() << "\n";
        try {
            if (!req.out_dir.empty()) {
                fs::create_directories(req.out_dir);
                write_file_atomic(path_in(req.out_dir, "error.json"), err.dump(2) + "\n");
            }
        } catch (...) {
        }
        return code;
    };
    try {
        if (req.command == "export") {
            export_plotdata(req.out_dir, req.export_kind);
            return ExitCode::ok;
        }
        const std::string bytes = read_file(req.config_path);
        const ExperimentConfig config = parse_config(bytes);
        Bundle out(req, bytes);
        const QuadratureMode quadrature = req.quadrature.value_or(config.solver.quadrature);
        out.diagnostics()["quadrature"] = to_string(quadrature);
        if (req.command == "sweep") {
            try {
                command_sweep(config, quadrature, out);
            } catch (...) {
                out.finish();
                throw;
            }
            out.finish();
            return ExitCode::ok;
        }
        const Grid grid = config.make_grid();
        Context ctx{config, grid, config.sample(grid), quadrature};
        out.diagnostics()["condition_report"] = condition_json(check_conditions(ctx.potential, 2.0, config.solver.delta));
        try {
            if (req.command == "solve") command_solve(ctx, out, false);
            else if (req.command == "amplitude") command_solve(ctx, out, true);
            else if (req.command == "born") command_born(ctx, out);
            else if (req.command == "compare") command_compare(ctx, out);
            else if (req.command == "invert") command_invert(ctx, out);
            else throw ValidationError("unknown command '" + req.command + "'");
        } catch (...) {
            out.diagnostics()["runs"] = ctx.runs;
            out.finish();
            throw;
        }
        out.diagnostics()["runs"] = ctx.runs;
        out.finish();
        return ExitCode::ok;
    } catch (const ValidationError& e) {
        return report(ExitCode::validation, "validation_error", e.what(), json::object());
    } catch (const fs::filesystem_error& e) {
        return report(ExitCode::validation, "validation_error", e.what(), json::object());
    } catch (const NumericalError& e) {
        return report(ExitCode::numerical, "numerical_error", e.what(),
                      json{{"quantity", e.quantity()}, {"value", e.value()}});
    } catch (const std::exception& e) {
        return report(ExitCode::internal, "internal_error", e.what(), json::object());
    }
}

}  // namespace magscatter
