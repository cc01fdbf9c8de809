#include "magscatter/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "magscatter/error.hpp"

namespace magscatter {

static_assert(std::endian::native == std::endian::little, "field I/O assumes a little-endian host");

namespace {

struct Header {
    std::int32_t dim = 0;
    std::int32_t m = 0;
    double half_width = 0.0;
    std::int32_t is_complex = 0;
    std::int32_t reserved = 0;
};

std::string encode(const Grid& g, bool is_complex, const std::vector<double>& data) {
    Header h{g.dim(), g.points_per_axis(), g.half_width(), is_complex ? 1 : 0, 0};
    std::string out(16 + 24 + data.size() * sizeof(double), '\0');
    std::memcpy(out.data(), kFieldMagic, 16);
    std::memcpy(out.data() + 16, &h.dim, 4);
    std::memcpy(out.data() + 20, &h.m, 4);
    std::memcpy(out.data() + 24, &h.half_width, 8);
    std::memcpy(out.data() + 32, &h.is_complex, 4);
    std::memcpy(out.data() + 36, &h.reserved, 4);
    std::memcpy(out.data() + 40, data.data(), data.size() * sizeof(double));
    return out;
}

std::pair<Grid, std::vector<double>> decode(const std::string& path, bool want_complex) {
    const std::string bytes = read_file(path);
    if (bytes.size() < 40 || std::memcmp(bytes.data(), kFieldMagic, 16) != 0)
        throw ValidationError(path + ": not a field file");
    Header h;
    std::memcpy(&h.dim, bytes.data() + 16, 4);
    std::memcpy(&h.m, bytes.data() + 20, 4);
    std::memcpy(&h.half_width, bytes.data() + 24, 8);
    std::memcpy(&h.is_complex, bytes.data() + 32, 4);
    if ((h.is_complex == 1) != want_complex)
        throw ValidationError(path + (want_complex ? ": field is real" : ": field is complex"));
    const Grid g = make_grid(h.dim, h.half_width, h.m);
    const std::size_t count = g.size() * (want_complex ? 2 : 1);
    if (bytes.size() != 40 + count * sizeof(double)) throw ValidationError(path + ": truncated field file");
    std::vector<double> data(count);
    std::memcpy(data.data(), bytes.data() + 40, count * sizeof(double));
    return {g, std::move(data)};
}

}  // namespace

void write_field(const std::string& path, const ComplexField& field) {
    std::vector<double> data;
    data.reserve(2 * field.size());
    for (const auto& v : field.values()) {
        data.push_back(v.real());
        data.push_back(v.imag());
    }
    write_file_atomic(path, encode(field.grid(), true, data));
}

void write_field(const std::string& path, const RealField& field) {
    write_file_atomic(path, encode(field.grid(), false, field.values()));
}

ComplexField read_complex_field(const std::string& path) {
    auto [g, data] = decode(path, true);
    ComplexField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = {data[2 * i], data[2 * i + 1]};
    return f;
}

RealField read_real_field(const std::string& path) {
    auto [g, data] = decode(path, false);
    RealField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = data[i];
    return f;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp);
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw ValidationError("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

}  // namespace magscatter
