#include "dca/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <string_view>
#include <type_traits>

#include "dca/errors.hpp"

namespace dca {

namespace {

constexpr std::array<char, 4> kPointMagic = {'D', 'C', 'A', '1'};
constexpr std::array<char, 4> kGraphMagic = {'D', 'C', 'A', 'G'};

template <class T>
void write_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T read_le(std::istream& in, const char* what) {
    std::array<unsigned char, sizeof(T)> bytes;
    in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
    if (!in) throw ParseError(std::string("truncated file while reading ") + what);
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

struct ParsedRows {
    std::size_t dim = 0;
    std::vector<double> coords;
};

ParsedRows parse_csv(const std::filesystem::path& path, bool header) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());

    ParsedRows rows;
    std::string line;
    std::size_t line_no = 0;
    bool skipped_header = !header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
        if (blank) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }

        std::size_t row_width = 0;
        std::string_view rest(line);
        while (true) {
            const std::size_t comma = rest.find(',');
            std::string_view cell = rest.substr(0, comma);
            while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front())))
                cell.remove_prefix(1);
            while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back())))
                cell.remove_suffix(1);

            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": cannot parse '" + std::string(cell) + "' as a number");
            if (!std::isfinite(value))
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": non-finite coordinate");
            rows.coords.push_back(value);
            ++row_width;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }

        if (rows.dim == 0) {
            rows.dim = row_width;
        } else if (row_width != rows.dim) {
            throw DimMismatch(path.string() + ":" + std::to_string(line_no) + ": row has " +
                              std::to_string(row_width) + " values, expected " +
                              std::to_string(rows.dim));
        }
    }
    if (rows.coords.empty()) throw EmptyInput(path.string() + ": no data rows");
    return rows;
}

struct ParsedBinary {
    std::size_t dim = 0;
    std::vector<double> coords;
    std::vector<Membership> membership; // empty when the file carries no tags
};

ParsedBinary parse_dcabin(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());

    std::array<char, 4> magic;
    in.read(magic.data(), magic.size());
    if (!in || magic != kPointMagic) throw ParseError(path.string() + ": bad magic");

    const auto count = read_le<std::uint32_t>(in, "point count");
    const auto dim = read_le<std::uint32_t>(in, "dimension");
    const auto has_membership = read_le<std::uint8_t>(in, "membership flag");
    if (count == 0) throw EmptyInput(path.string() + ": zero points");
    if (dim == 0) throw ParseError(path.string() + ": zero dimension");

    ParsedBinary out;
    out.dim = dim;
    out.coords.resize(static_cast<std::size_t>(count) * dim);
    for (double& v : out.coords) {
        const auto bits = read_le<std::uint32_t>(in, "coordinate");
        float f;
        std::memcpy(&f, &bits, sizeof(f));
        if (!std::isfinite(f)) throw ParseError(path.string() + ": non-finite coordinate");
        v = static_cast<double>(f);
    }
    if (has_membership) {
        out.membership.resize(count);
        for (Membership& m : out.membership) {
            const auto tag = read_le<std::uint8_t>(in, "membership tag");
            if (tag > 1) throw ParseError(path.string() + ": bad membership tag");
            m = tag == 0 ? Membership::Ref : Membership::Eval;
        }
    }
    return out;
}

void warn_duplicates(const PointSet& points, const std::filesystem::path& path) {
    const std::size_t dupes = points.duplicate_count();
    if (dupes > 0)
        std::cerr << "warning: " << path.string() << " contains " << dupes
                  << " duplicate coordinate row(s); they are kept as distinct points\n";
}

} // namespace

Format format_from_extension(const std::filesystem::path& path, Format fallback) {
    return path.extension() == ".dcabin" ? Format::Dcabin : fallback;
}

PointSet load_pointset(const std::filesystem::path& path, Membership tag,
                       const LoadOptions& options) {
    if (options.format == Format::Csv) {
        ParsedRows rows = parse_csv(path, options.header);
        PointSet points(rows.dim, std::move(rows.coords), tag);
        warn_duplicates(points, path);
        return points;
    }
    ParsedBinary bin = parse_dcabin(path);
    PointSet points = bin.membership.empty()
                          ? PointSet(bin.dim, std::move(bin.coords), tag)
                          : PointSet(bin.dim, std::move(bin.coords), std::move(bin.membership));
    warn_duplicates(points, path);
    return points;
}

QuerySet load_queryset(const std::filesystem::path& path, const LoadOptions& options) {
    if (options.format == Format::Csv) {
        ParsedRows rows = parse_csv(path, options.header);
        return QuerySet(rows.dim, std::move(rows.coords));
    }
    ParsedBinary bin = parse_dcabin(path);
    return QuerySet(bin.dim, std::move(bin.coords));
}

void save_dcabin(const PointSet& points, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out.write(kPointMagic.data(), kPointMagic.size());
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(points.size()));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(points.dim()));
    write_le<std::uint8_t>(out, 1);
    for (double v : points.coords()) {
        const float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof(bits));
        write_le<std::uint32_t>(out, bits);
    }
    for (Membership m : points.memberships())
        write_le<std::uint8_t>(out, m == Membership::Ref ? 0 : 1);
    if (!out) throw ParseError("failed writing " + path.string());
}

void save_csv(const PointSet& points, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out.precision(17);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto p = points.point(i);
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (k > 0) out << ',';
            out << p[k];
        }
        out << '\n';
    }
    if (!out) throw ParseError("failed writing " + path.string());
}

void save_graph(const ApproxDelaunayGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out.write(kGraphMagic.data(), kGraphMagic.size());
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(graph.n_vertices()));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(graph.dim()));
    write_le<std::uint32_t>(out, graph.rays_per_vertex());
    write_le<std::uint64_t>(out, graph.n_edges());
    for (const GraphEdge& e : graph.edges()) {
        write_le<std::uint32_t>(out, e.i);
        write_le<std::uint32_t>(out, e.j);
        write_le<double>(out, e.length);
        write_le<double>(out, graph.beta_from(e, e.i));
        write_le<double>(out, graph.beta_from(e, e.j));
    }
    for (std::size_t v = 0; v < graph.n_vertices(); ++v)
        write_le<double>(out, graph.unbounded_fraction(v));
    if (!out) throw ParseError("failed writing " + path.string());
}

ApproxDelaunayGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifact("cannot open " + path.string());

    std::array<char, 4> magic;
    in.read(magic.data(), magic.size());
    if (!in || magic != kGraphMagic) throw ParseError(path.string() + ": bad magic");

    const auto n_vertices = read_le<std::uint32_t>(in, "vertex count");
    const auto dim = read_le<std::uint32_t>(in, "dimension");
    const auto rays = read_le<std::uint32_t>(in, "ray count");
    const auto n_edges = read_le<std::uint64_t>(in, "edge count");
    if (rays == 0) throw ParseError(path.string() + ": zero rays per vertex");

    std::vector<GraphEdge> edges;
    edges.reserve(n_edges);
    for (std::uint64_t k = 0; k < n_edges; ++k) {
        GraphEdge e;
        e.i = read_le<std::uint32_t>(in, "edge endpoint");
        e.j = read_le<std::uint32_t>(in, "edge endpoint");
        e.length = read_le<double>(in, "edge length");
        const double beta_ij = read_le<double>(in, "edge beta");
        const double beta_ji = read_le<double>(in, "edge beta");
        e.hits_ij = static_cast<std::uint32_t>(std::llround(beta_ij * rays));
        e.hits_ji = static_cast<std::uint32_t>(std::llround(beta_ji * rays));
        edges.push_back(e);
    }
    std::vector<std::uint32_t> unbounded(n_vertices);
    for (std::uint32_t v = 0; v < n_vertices; ++v) {
        const double fraction = read_le<double>(in, "unbounded fraction");
        unbounded[v] = static_cast<std::uint32_t>(std::llround(fraction * rays));
    }
    return ApproxDelaunayGraph(n_vertices, dim, rays, std::move(edges), std::move(unbounded), {});
}

} // namespace dca
