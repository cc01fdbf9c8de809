#include "magscatter/fourier.hpp"

#include <cmath>
#include <map>

#include "magscatter/error.hpp"
#include "magscatter/fft.hpp"
#include "magscatter/parallel.hpp"
#include "magscatter/special.hpp"

namespace magscatter {
namespace {

bool on_lattice(const Grid& g, const std::vector<Vec>& freqs, std::vector<std::array<int, 3>>& lattice) {
    const double scale = g.half_width() / kPi;
    const int m = g.points_per_axis();
    lattice.resize(freqs.size());
    for (std::size_t j = 0; j < freqs.size(); ++j) {
        for (int d = 0; d < 3; ++d) {
            if (d >= g.dim()) {
                if (freqs[j][d] != 0.0) return false;
                lattice[j][d] = 0;
                continue;
            }
            const double p = freqs[j][d] * scale;
            const double r = std::round(p);
            if (std::abs(p - r) > 1e-9 * std::max(1.0, std::abs(p)) || std::abs(r) >= m / 2) return false;
            lattice[j][d] = static_cast<int>(r);
        }
    }
    return true;
}

std::vector<std::vector<complex>> lattice_path(const std::vector<const ComplexField*>& fields,
                                               const std::vector<Vec>& freqs,
                                               const std::vector<std::array<int, 3>>& lattice) {
    const Grid& g = fields.front()->grid();
    const int n = g.dim(), m = g.points_per_axis();
    FftPlan plan(std::vector<int>(n, m), +1);
    FftBuffer buf(g.size());
    const double x0 = g.coordinate(0);
    std::vector<std::vector<complex>> out(fields.size(), std::vector<complex>(freqs.size()));
    for (std::size_t f = 0; f < fields.size(); ++f) {
        for (std::size_t i = 0; i < g.size(); ++i) buf[i] = (*fields[f])[i];
        plan.execute(buf);
        for (std::size_t j = 0; j < freqs.size(); ++j) {
            std::array<int, 3> idx{0, 0, 0};
            for (int d = 0; d < n; ++d) idx[d] = lattice[j][d] < 0 ? lattice[j][d] + m : lattice[j][d];
            double phase = 0.0;
            for (int d = 0; d < n; ++d) phase += freqs[j][d] * x0;
            out[f][j] = buf[g.linear_index(idx)] * std::exp(complex(0.0, phase)) * g.cell_volume();
        }
    }
    return out;
}

}  // namespace

std::vector<std::vector<complex>> fourier_many(const std::vector<const ComplexField*>& fields,
                                               const std::vector<Vec>& freqs) {
    std::vector<std::vector<complex>> out(fields.size(), std::vector<complex>(freqs.size()));
    if (fields.empty() || freqs.empty()) return out;
    const Grid& g = fields.front()->grid();
    for (const auto* f : fields) require_same_grid(g, f->grid(), "fourier");
    std::vector<std::array<int, 3>> lattice;
    if (on_lattice(g, freqs, lattice)) return lattice_path(fields, freqs, lattice);

    const int n = g.dim(), m = g.points_per_axis();
    const std::size_t plane = g.size() / m;  // points per fixed last index
    std::vector<double> x(m);
    for (int i = 0; i < m; ++i) x[i] = g.coordinate(i);

    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t j = 0; j < freqs.size(); ++j) groups[freqs[j][n - 1]].push_back(j);
    std::vector<const std::vector<std::size_t>*> group_list;
    std::vector<double> group_key;
    for (const auto& [key, members] : groups) {
        group_key.push_back(key);
        group_list.push_back(&members);
    }
    const double vol = g.cell_volume();
    parallel_for(group_list.size(), [&](std::size_t b, std::size_t e) {
        std::vector<complex> last(m), e1(m), e2(m);
        std::vector<complex> partial(plane);
        for (std::size_t gi = b; gi < e; ++gi) {
            for (int i = 0; i < m; ++i) last[i] = std::exp(complex(0.0, x[i] * group_key[gi]));
            for (std::size_t f = 0; f < fields.size(); ++f) {
                const auto& vals = fields[f]->values();
                for (std::size_t p = 0; p < plane; ++p) {
                    complex s = 0.0;
                    const complex* row = vals.data() + p * m;
                    for (int i = 0; i < m; ++i) s += row[i] * last[i];
                    partial[p] = s;
                }
                for (std::size_t j : *group_list[gi]) {
                    const Vec& xi = freqs[j];
                    for (int i = 0; i < m; ++i) e1[i] = std::exp(complex(0.0, x[i] * xi[0]));
                    complex acc = 0.0;
                    if (n == 2) {
                        for (int i = 0; i < m; ++i) acc += e1[i] * partial[i];
                    } else {
                        for (int i = 0; i < m; ++i) e2[i] = std::exp(complex(0.0, x[i] * xi[1]));
                        for (int i1 = 0; i1 < m; ++i1) {
                            complex inner = 0.0;
                            const complex* row = partial.data() + static_cast<std::size_t>(i1) * m;
                            for (int i2 = 0; i2 < m; ++i2) inner += e2[i2] * row[i2];
                            acc += e1[i1] * inner;
                        }
                    }
                    out[f][j] = acc * vol;
                }
            }
        }
    });
    return out;
}

FourierSamples fourier(const ComplexField& field, const std::vector<Vec>& frequencies) {
    FourierSamples s;
    s.frequencies = frequencies;
    s.values = std::move(fourier_many({&field}, frequencies).front());
    return s;
}

FourierSamples fourier(const RealField& field, const std::vector<Vec>& frequencies) {
    ComplexField c(field.grid());
    for (std::size_t i = 0; i < field.size(); ++i) c[i] = field[i];
    return fourier(c, frequencies);
}

}  // namespace magscatter
