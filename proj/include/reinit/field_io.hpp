#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "reinit/errors.hpp"
#include "reinit/grid.hpp"
#include "reinit/interface_mesh.hpp"

namespace reinit {
namespace detail {

// Shortest decimal that round-trips the exact double.
inline void append_double(std::string& out, double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, r.ptr);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline double parse_csv_double(std::string_view tok, std::size_t line_no) {
    double v = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size())
        throw ConfigError("line " + std::to_string(line_no) + ": bad number '" +
                          std::string(tok) + "'");
    return v;
}

inline std::size_t parse_csv_count(std::string_view tok, std::size_t line_no) {
    std::size_t v = 0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size())
        throw ConfigError("line " + std::to_string(line_no) + ": bad count '" +
                          std::string(tok) + "'");
    return v;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw ConfigError("short write to '" + path + "'");
}

}  // namespace detail

// Field files carry their own grid. Header `# dim,nx[,ny],xmin,xmax[,ymin,ymax]`,
// then one data row per grid line (constant y), values comma-separated as
// shortest round-trip decimals: read after write is bit-exact.
inline void write_field_csv(const ScalarField& field, const std::string& path) {
    const GridSpec& g = field.grid();
    std::string out = "# ";
    out += std::to_string(g.dim());
    out += ',';
    out += std::to_string(g.points(0));
    if (g.dim() == 2) {
        out += ',';
        out += std::to_string(g.points(1));
    }
    for (int a = 0; a < g.dim(); ++a) {
        out += ',';
        detail::append_double(out, g.lo(a));
        out += ',';
        detail::append_double(out, g.hi(a));
    }
    out += '\n';

    const std::vector<double>& v = field.values();
    const std::size_t nx = g.points(0);
    const std::size_t rows = v.size() / nx;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < nx; ++i) {
            if (i) out += ',';
            detail::append_double(out, v[r * nx + i]);
        }
        out += '\n';
    }
    detail::write_text_file(path, out);
}

inline ScalarField read_field_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for reading");

    std::string line;
    if (!std::getline(f, line))
        throw ConfigError("line 1: empty file, expected header");
    if (line.rfind("# ", 0) != 0)
        throw ConfigError("line 1: header must start with '# '");
    const auto head = detail::split_csv(std::string_view(line).substr(2));
    const std::size_t dim = detail::parse_csv_count(head[0], 1);
    if (dim != 1 && dim != 2)
        throw ConfigError("line 1: dimension must be 1 or 2");
    if (head.size() != (dim == 1 ? 4u : 7u))
        throw ConfigError(dim == 1
                              ? "line 1: 1d header needs dim,nx,xmin,xmax"
                              : "line 1: 2d header needs "
                                "dim,nx,ny,xmin,xmax,ymin,ymax");

    const std::size_t nx = detail::parse_csv_count(head[1], 1);
    const std::size_t ny = dim == 2 ? detail::parse_csv_count(head[2], 1) : 1;
    const std::size_t b = dim == 2 ? 3 : 2;  // first bounds token
    auto build_grid = [&]() -> GridSpec {
        AxisSpec x{detail::parse_csv_double(head[b], 1),
                   detail::parse_csv_double(head[b + 1], 1), nx};
        if (dim == 1) return GridSpec(x);
        AxisSpec y{detail::parse_csv_double(head[b + 2], 1),
                   detail::parse_csv_double(head[b + 3], 1), ny};
        return GridSpec(x, y);
    };
    std::optional<GridSpec> grid;
    try {
        grid.emplace(build_grid());
    } catch (const ConfigError& e) {
        throw ConfigError("line 1: " + std::string(e.what()));
    }

    std::vector<double> values(grid->node_count());
    for (std::size_t r = 0; r < ny; ++r) {
        const std::size_t line_no = 2 + r;
        if (!std::getline(f, line))
            throw ConfigError("line " + std::to_string(line_no) +
                              ": unexpected end of file (expected " +
                              std::to_string(ny) + " data rows)");
        const auto toks = detail::split_csv(line);
        if (toks.size() != nx)
            throw ConfigError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(nx) + " values, got " +
                              std::to_string(toks.size()));
        for (std::size_t i = 0; i < nx; ++i)
            values[r * nx + i] = detail::parse_csv_double(toks[i], line_no);
    }
    std::size_t line_no = 2 + ny;
    while (std::getline(f, line)) {
        if (!line.empty())
            throw ConfigError("line " + std::to_string(line_no) +
                              ": unexpected trailing data");
        ++line_no;
    }
    return ScalarField(*grid, std::move(values));
}

// Interface meshes: header `# dim,count`, then one crossing coordinate (1d)
// or one `x0,y0,x1,y1` segment (2d) per row.
inline void write_mesh_csv(const InterfaceMesh& mesh, const std::string& path) {
    std::string out = "# ";
    out += std::to_string(mesh.dim);
    out += ',';
    out += std::to_string(mesh.element_count());
    out += '\n';
    if (mesh.dim == 1) {
        for (double c : mesh.crossings) {
            detail::append_double(out, c);
            out += '\n';
        }
    } else {
        for (const Segment& s : mesh.segments) {
            detail::append_double(out, s.a[0]);
            out += ',';
            detail::append_double(out, s.a[1]);
            out += ',';
            detail::append_double(out, s.b[0]);
            out += ',';
            detail::append_double(out, s.b[1]);
            out += '\n';
        }
    }
    detail::write_text_file(path, out);
}

// Two-column curve for external plotters, `# xname,yname` then one x,y row
// per sample.
inline void write_curve_csv(const std::string& path, std::string_view x_name,
                            std::string_view y_name,
                            const std::vector<std::pair<double, double>>& rows) {
    std::string out = "# ";
    out += x_name;
    out += ',';
    out += y_name;
    out += '\n';
    for (const auto& [x, y] : rows) {
        detail::append_double(out, x);
        out += ',';
        detail::append_double(out, y);
        out += '\n';
    }
    detail::write_text_file(path, out);
}

}  // namespace reinit
