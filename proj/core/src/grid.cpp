#include "hesseig/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

#include "hesseig/errors.hpp"

namespace hesseig {

namespace {

constexpr char kMagic[4] = {'H', 'S', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes, bytes + sizeof(T));
    }
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in)
{
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if (!in) {
        throw IoError("truncated grid field snapshot");
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes, bytes + sizeof(T));
    }
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

GridGeometry covering_geometry(const DomainDescriptor& domain, double h)
{
    if (!(h > 0.0)) {
        throw ParameterError("grid spacing h must be positive");
    }
    const int mx = static_cast<int>(std::ceil(domain.half_extent_x() / h)) + 1;
    const int my = static_cast<int>(std::ceil(domain.half_extent_y() / h)) + 1;
    if (mx > 20000 || my > 20000) {
        throw ParameterError("grid spacing too small for the domain");
    }
    GridGeometry g;
    g.nx = 2 * mx + 1;
    g.ny = 2 * my + 1;
    g.h = h;
    g.x0 = -mx * h;
    g.y0 = -my * h;
    return g;
}

GridField::GridField(GridGeometry geometry, std::vector<std::uint8_t> inside, double boundary_value)
    : geometry_(geometry), inside_(std::move(inside)), values_(geometry.size(), boundary_value),
      boundary_value_(boundary_value)
{
    if (inside_.size() != geometry_.size()) {
        throw ParameterError("grid mask size does not match geometry");
    }
}

double GridField::sup_norm() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (inside_[i]) {
            m = std::max(m, std::abs(values_[i]));
        }
    }
    return m;
}

double GridField::min_value() const
{
    double m = INFINITY;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (inside_[i]) {
            m = std::min(m, values_[i]);
        }
    }
    return m;
}

void GridField::write_csv(std::ostream& out) const
{
    out << "x,y,u\n";
    char line[96];
    for (int j = 0; j < geometry_.ny; ++j) {
        for (int i = 0; i < geometry_.nx; ++i) {
            const auto node = static_cast<std::size_t>(geometry_.index(i, j));
            if (!inside_[node]) {
                continue;
            }
            std::snprintf(line, sizeof line, "%.10g,%.10g,%.15g\n", geometry_.x(i), geometry_.y(j), values_[node]);
            out << line;
        }
    }
}

void GridField::write_csv(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    write_csv(out);
}

void GridField::write_binary(std::ostream& out) const
{
    out.write(kMagic, 4);
    put_le<std::uint32_t>(out, kVersion);
    put_le<std::int32_t>(out, geometry_.nx);
    put_le<std::int32_t>(out, geometry_.ny);
    put_le<double>(out, geometry_.h);
    put_le<double>(out, geometry_.x0);
    put_le<double>(out, geometry_.y0);
    put_le<double>(out, boundary_value_);
    std::vector<char> packed((inside_.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < inside_.size(); ++i) {
        if (inside_[i]) {
            packed[i / 8] = static_cast<char>(packed[i / 8] | (1 << (i % 8)));
        }
    }
    out.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    for (double v : values_) {
        put_le<double>(out, v);
    }
    if (!out) {
        throw IoError("failed writing grid field snapshot");
    }
}

void GridField::write_binary(const std::string& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    write_binary(out);
}

GridField GridField::read_binary(std::istream& in)
{
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("not a grid field snapshot");
    }
    if (get_le<std::uint32_t>(in) != kVersion) {
        throw IoError("unsupported grid field snapshot version");
    }
    GridGeometry g;
    g.nx = get_le<std::int32_t>(in);
    g.ny = get_le<std::int32_t>(in);
    g.h = get_le<double>(in);
    g.x0 = get_le<double>(in);
    g.y0 = get_le<double>(in);
    const double boundary = get_le<double>(in);
    if (g.nx <= 0 || g.ny <= 0 || g.nx > 40001 || g.ny > 40001 || !(g.h > 0.0)) {
        throw IoError("corrupt grid field header");
    }
    std::vector<char> packed((g.size() + 7) / 8);
    in.read(packed.data(), static_cast<std::streamsize>(packed.size()));
    if (!in) {
        throw IoError("truncated grid field mask");
    }
    std::vector<std::uint8_t> mask(g.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = static_cast<std::uint8_t>((packed[i / 8] >> (i % 8)) & 1);
    }
    GridField field(g, std::move(mask), boundary);
    for (auto& v : field.values_) {
        v = get_le<double>(in);
    }
    return field;
}

GridField GridField::read_binary(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return read_binary(in);
}

}  // namespace hesseig
