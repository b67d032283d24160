#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fermigas/common.hpp"

// Domains, their uniform Cartesian grids and eroded compact subsets.
// All types are immutable after construction.

namespace fermigas {

enum class DomainKind { rectangle, disk, l_shape, polygon, mask };

inline const char* to_string(DomainKind k) {
    switch (k) {
        case DomainKind::rectangle: return "rectangle";
        case DomainKind::disk: return "disk";
        case DomainKind::l_shape: return "l_shape";
        case DomainKind::polygon: return "polygon";
        case DomainKind::mask: return "mask";
    }
    return "?";
}

/// Bitmap domain loaded from PGM; nonzero pixels are inside. Row j covers
/// y in [j*dy, (j+1)*dy), i.e. the raster is not vertically flipped.
struct MaskData {
    int width = 0, height = 0;
    double extent_x = 0.0, extent_y = 0.0;
    std::vector<std::uint8_t> inside;  // row-major, width*height

    bool pixel(int i, int j) const {
        if (i < 0 || j < 0 || i >= width || j >= height) return false;
        return inside[static_cast<std::size_t>(j) * width + i] != 0;
    }
    double px() const { return extent_x / width; }
    double py() const { return extent_y / height; }
};

namespace detail {

inline void skip_pgm_junk(std::istream& in) {
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

inline MaskData load_pgm(const std::string& path, double extent_x, double extent_y) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open PGM mask: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P2" && magic != "P5") throw ConfigError("mask must be PGM P2/P5: " + path);
    skip_pgm_junk(in);
    int w = 0, h = 0, maxval = 0;
    in >> w;
    skip_pgm_junk(in);
    in >> h;
    skip_pgm_junk(in);
    in >> maxval;
    if (w <= 0 || h <= 0 || maxval <= 0) throw ConfigError("bad PGM header: " + path);

    MaskData m;
    m.width = w;
    m.height = h;
    m.extent_x = extent_x;
    m.extent_y = extent_y;
    m.inside.assign(static_cast<std::size_t>(w) * h, 0);
    if (magic == "P2") {
        for (auto& v : m.inside) {
            long val = 0;
            in >> val;
            v = val != 0;
        }
    } else {
        in.get();  // single whitespace after maxval
        if (maxval > 255) throw ConfigError("16-bit P5 masks unsupported: " + path);
        std::vector<unsigned char> raw(m.inside.size());
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        for (std::size_t i = 0; i < raw.size(); ++i) m.inside[i] = raw[i] != 0;
    }
    if (!in) throw ConfigError("truncated PGM mask: " + path);
    return m;
}

/// Single 4-connected component check over the nonzero pixels.
inline void require_connected(const MaskData& m) {
    const std::size_t total = m.inside.size();
    std::vector<std::uint8_t> seen(total, 0);
    std::size_t first = total, count_inside = 0;
    for (std::size_t i = 0; i < total; ++i)
        if (m.inside[i]) {
            ++count_inside;
            if (first == total) first = i;
        }
    if (count_inside == 0) throw EmptyInterior("mask has no nonzero pixel");
    std::deque<std::size_t> queue{first};
    seen[first] = 1;
    std::size_t reached = 0;
    while (!queue.empty()) {
        const std::size_t p = queue.front();
        queue.pop_front();
        ++reached;
        const int i = static_cast<int>(p % m.width), j = static_cast<int>(p / m.width);
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            const int ni = i + di[d], nj = j + dj[d];
            if (!m.pixel(ni, nj)) continue;
            const std::size_t q = static_cast<std::size_t>(nj) * m.width + ni;
            if (!seen[q]) {
                seen[q] = 1;
                queue.push_back(q);
            }
        }
    }
    if (reached != count_inside)
        throw DisconnectedMask("mask splits into multiple components");
}

/// Two-pass chamfer distance (in pixels) to the nearest outside pixel.
inline std::vector<float> chamfer_distance(const MaskData& m) {
    const float kInf = 1e30f, kD1 = 1.0f, kD2 = 1.41421356f;
    std::vector<float> d(m.inside.size(), 0.0f);
    auto at = [&](int i, int j) -> float& {
        return d[static_cast<std::size_t>(j) * m.width + i];
    };
    for (int j = 0; j < m.height; ++j)
        for (int i = 0; i < m.width; ++i) at(i, j) = m.pixel(i, j) ? kInf : 0.0f;
    auto relax = [&](int i, int j, int di, int dj, float w) {
        const int ni = i + di, nj = j + dj;
        const float nd = (ni < 0 || nj < 0 || ni >= m.width || nj >= m.height)
                             ? 0.0f
                             : at(ni, nj);
        at(i, j) = std::min(at(i, j), nd + w);
    };
    for (int j = 0; j < m.height; ++j)
        for (int i = 0; i < m.width; ++i) {
            relax(i, j, -1, 0, kD1);
            relax(i, j, 0, -1, kD1);
            relax(i, j, -1, -1, kD2);
            relax(i, j, 1, -1, kD2);
        }
    for (int j = m.height - 1; j >= 0; --j)
        for (int i = m.width - 1; i >= 0; --i) {
            relax(i, j, 1, 0, kD1);
            relax(i, j, 0, 1, kD1);
            relax(i, j, 1, 1, kD2);
            relax(i, j, -1, 1, kD2);
        }
    return d;
}

inline double point_segment_distance(double px, double py, double ax, double ay,
                                     double bx, double by) {
    const double vx = bx - ax, vy = by - ay;
    const double wx = px - ax, wy = py - ay;
    const double vv = vx * vx + vy * vy;
    double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
    return std::hypot(dx, dy);
}

}  // namespace detail

/// Geometric description of the domain Omega. Construct through the named
/// factories; `contains` tests the open interior, `boundary_distance` is the
/// distance to the boundary for interior points (conservative for masks).
struct DomainSpec {
    DomainKind kind = DomainKind::rectangle;
    int dim = 2;
    std::vector<double> lengths;                      // rectangle / box
    double radius = 0.0;                              // disk
    std::array<double, 2> outer{}, notch{};           // l_shape
    std::vector<std::array<double, 2>> vertices;      // polygon
    MaskData mask_data;                               // mask
    std::vector<float> mask_distance;                 // pixels, chamfer
    double volume = 0.0;
    Point box_lo{}, box_hi{};

    static DomainSpec rectangle(std::vector<double> L) {
        if (L.size() != 2 && L.size() != 3)
            throw ConfigError("rectangle needs 2 or 3 lengths");
        DomainSpec d;
        d.kind = DomainKind::rectangle;
        d.dim = static_cast<int>(L.size());
        d.lengths = std::move(L);
        d.volume = 1.0;
        for (int i = 0; i < d.dim; ++i) {
            if (d.lengths[static_cast<std::size_t>(i)] <= 0.0)
                throw ConfigError("rectangle lengths must be positive");
            d.volume *= d.lengths[static_cast<std::size_t>(i)];
            d.box_lo[static_cast<std::size_t>(i)] = 0.0;
            d.box_hi[static_cast<std::size_t>(i)] = d.lengths[static_cast<std::size_t>(i)];
        }
        return d;
    }

    static DomainSpec disk(double R) {
        if (R <= 0.0) throw ConfigError("disk radius must be positive");
        DomainSpec d;
        d.kind = DomainKind::disk;
        d.dim = 2;
        d.radius = R;
        d.volume = kPi * R * R;
        d.box_lo = {-R, -R, 0.0};
        d.box_hi = {R, R, 0.0};
        return d;
    }

    /// Rectangle (0,Lx)x(0,Ly) with the closed notch removed at the
    /// top-right corner.
    static DomainSpec l_shape(std::array<double, 2> outer, std::array<double, 2> notch) {
        if (outer[0] <= 0 || outer[1] <= 0 || notch[0] <= 0 || notch[1] <= 0 ||
            notch[0] >= outer[0] || notch[1] >= outer[1])
            throw ConfigError("l_shape needs 0 < notch < outer");
        DomainSpec d;
        d.kind = DomainKind::l_shape;
        d.dim = 2;
        d.outer = outer;
        d.notch = notch;
        d.volume = outer[0] * outer[1] - notch[0] * notch[1];
        d.box_lo = {0.0, 0.0, 0.0};
        d.box_hi = {outer[0], outer[1], 0.0};
        return d;
    }

    static DomainSpec polygon(std::vector<std::array<double, 2>> verts) {
        if (verts.size() < 3) throw ConfigError("polygon needs >= 3 vertices");
        DomainSpec d;
        d.kind = DomainKind::polygon;
        d.dim = 2;
        d.vertices = std::move(verts);
        // shoelace area; orientation-free
        double a2 = 0.0;
        const std::size_t n = d.vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = d.vertices[i];
            const auto& q = d.vertices[(i + 1) % n];
            a2 += p[0] * q[1] - q[0] * p[1];
        }
        d.volume = 0.5 * std::abs(a2);
        if (d.volume <= 0.0) throw ConfigError("polygon is degenerate");
        if (detail_polygon_self_intersects(d.vertices))
            throw ConfigError("polygon is self-intersecting");
        d.box_lo = {d.vertices[0][0], d.vertices[0][1], 0.0};
        d.box_hi = d.box_lo;
        for (const auto& v : d.vertices) {
            d.box_lo[0] = std::min(d.box_lo[0], v[0]);
            d.box_lo[1] = std::min(d.box_lo[1], v[1]);
            d.box_hi[0] = std::max(d.box_hi[0], v[0]);
            d.box_hi[1] = std::max(d.box_hi[1], v[1]);
        }
        return d;
    }

    static DomainSpec mask_from_pgm(const std::string& path, double extent_x,
                                    double extent_y) {
        DomainSpec d;
        d.kind = DomainKind::mask;
        d.dim = 2;
        d.mask_data = detail::load_pgm(path, extent_x, extent_y);
        detail::require_connected(d.mask_data);
        d.mask_distance = detail::chamfer_distance(d.mask_data);
        std::size_t count = 0;
        for (auto v : d.mask_data.inside) count += v;
        d.volume = static_cast<double>(count) * d.mask_data.px() * d.mask_data.py();
        d.box_lo = {0.0, 0.0, 0.0};
        d.box_hi = {extent_x, extent_y, 0.0};
        return d;
    }

    bool contains(const Point& p) const {
        switch (kind) {
            case DomainKind::rectangle:
                for (int i = 0; i < dim; ++i)
                    if (p[static_cast<std::size_t>(i)] <= 0.0 ||
                        p[static_cast<std::size_t>(i)] >= lengths[static_cast<std::size_t>(i)])
                        return false;
                return true;
            case DomainKind::disk:
                return std::hypot(p[0], p[1]) < radius;
            case DomainKind::l_shape:
                if (p[0] <= 0.0 || p[0] >= outer[0] || p[1] <= 0.0 || p[1] >= outer[1])
                    return false;
                return !(p[0] >= outer[0] - notch[0] && p[1] >= outer[1] - notch[1]);
            case DomainKind::polygon: {
                if (polygon_boundary_distance(p) < 1e-13) return false;  // boundary is outside
                bool in = false;
                const std::size_t n = vertices.size();
                for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                    const auto& a = vertices[i];
                    const auto& b = vertices[j];
                    if ((a[1] > p[1]) != (b[1] > p[1])) {
                        const double xint =
                            (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0];
                        if (p[0] < xint) in = !in;
                    }
                }
                return in;
            }
            case DomainKind::mask: {
                if (p[0] <= 0.0 || p[0] >= mask_data.extent_x || p[1] <= 0.0 ||
                    p[1] >= mask_data.extent_y)
                    return false;
                const int i = static_cast<int>(p[0] / mask_data.px());
                const int j = static_cast<int>(p[1] / mask_data.py());
                return mask_data.pixel(i, j);
            }
        }
        return false;
    }

    /// Distance from an interior point to the boundary. Exact for
    /// rectangle/disk/l_shape/polygon, one-cell conservative for masks.
    double boundary_distance(const Point& p) const {
        switch (kind) {
            case DomainKind::rectangle: {
                double d = 1e300;
                for (int i = 0; i < dim; ++i) {
                    d = std::min(d, p[static_cast<std::size_t>(i)]);
                    d = std::min(d, lengths[static_cast<std::size_t>(i)] -
                                        p[static_cast<std::size_t>(i)]);
                }
                return d;
            }
            case DomainKind::disk:
                return radius - std::hypot(p[0], p[1]);
            case DomainKind::l_shape: {
                double d = std::min(std::min(p[0], outer[0] - p[0]),
                                    std::min(p[1], outer[1] - p[1]));
                const double dx = std::max(outer[0] - notch[0] - p[0], 0.0);
                const double dy = std::max(outer[1] - notch[1] - p[1], 0.0);
                const double to_notch =
                    (dx == 0.0 && dy == 0.0) ? 0.0 : std::hypot(dx, dy);
                return std::min(d, to_notch);
            }
            case DomainKind::polygon:
                return polygon_boundary_distance(p);
            case DomainKind::mask: {
                const int i = static_cast<int>(p[0] / mask_data.px());
                const int j = static_cast<int>(p[1] / mask_data.py());
                if (i < 0 || j < 0 || i >= mask_data.width || j >= mask_data.height)
                    return 0.0;
                const float cells =
                    mask_distance[static_cast<std::size_t>(j) * mask_data.width + i];
                const double cell = std::max(mask_data.px(), mask_data.py());
                // chamfer paths overestimate Euclidean distance by <= 8%;
                // scale down and drop one cell to stay conservative
                return std::max(0.0, (static_cast<double>(cells) * 0.92 - 1.0) * cell);
            }
        }
        return 0.0;
    }

    /// Canonical content string; hashing it keys caches and manifests.
    std::string canonical() const {
        std::ostringstream os;
        os.precision(17);
        os << to_string(kind) << ";dim=" << dim;
        switch (kind) {
            case DomainKind::rectangle:
                os << ";L=";
                for (double l : lengths) os << l << ",";
                break;
            case DomainKind::disk: os << ";R=" << radius; break;
            case DomainKind::l_shape:
                os << ";outer=" << outer[0] << "," << outer[1] << ";notch=" << notch[0]
                   << "," << notch[1];
                break;
            case DomainKind::polygon:
                os << ";verts=";
                for (const auto& v : vertices) os << v[0] << "," << v[1] << ";";
                break;
            case DomainKind::mask:
                os << ";mask=" << hex64(fnv1a64(mask_data.inside.data(),
                                                mask_data.inside.size()))
                   << ";ext=" << mask_data.extent_x << "," << mask_data.extent_y;
                break;
        }
        return os.str();
    }

private:
    double polygon_boundary_distance(const Point& p) const {
        double d = 1e300;
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = vertices[i];
            const auto& b = vertices[(i + 1) % n];
            d = std::min(d, detail::point_segment_distance(p[0], p[1], a[0], a[1],
                                                           b[0], b[1]));
        }
        return d;
    }

    static bool detail_polygon_self_intersects(
        const std::vector<std::array<double, 2>>& v) {
        auto seg_intersect = [](const std::array<double, 2>& a, const std::array<double, 2>& b,
                                const std::array<double, 2>& c, const std::array<double, 2>& d) {
            auto cross = [](double ox, double oy, double ax, double ay, double bx, double by) {
                return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
            };
            const double d1 = cross(c[0], c[1], d[0], d[1], a[0], a[1]);
            const double d2 = cross(c[0], c[1], d[0], d[1], b[0], b[1]);
            const double d3 = cross(a[0], a[1], b[0], b[1], c[0], c[1]);
            const double d4 = cross(a[0], a[1], b[0], b[1], d[0], d[1]);
            return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
        };
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                // skip adjacent edges (shared vertex)
                if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
                if (seg_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                    return true;
            }
        return false;
    }
};

/// Uniform vertex-centered lattice of the interior of a domain. Nodes are
/// integer multiples of the spacing, ordered lexicographically by their
/// integer coordinates.
struct Grid {
    int dim = 2;
    double spacing = 0.0;
    double cell_measure = 0.0;
    std::array<int, 3> lat_lo{}, lat_hi{};  // inclusive lattice index range
    std::vector<std::array<int, 3>> nodes;  // interior node -> lattice coords
    std::vector<Point> coords;
    std::vector<std::int32_t> index_map;    // bounding lattice -> node or -1

    std::size_t size() const { return nodes.size(); }

    std::array<int, 3> lat_shape() const {
        return {lat_hi[0] - lat_lo[0] + 1, lat_hi[1] - lat_lo[1] + 1,
                dim == 3 ? lat_hi[2] - lat_lo[2] + 1 : 1};
    }

    std::int32_t node_at(int i, int j, int k = 0) const {
        if (i < lat_lo[0] || i > lat_hi[0] || j < lat_lo[1] || j > lat_hi[1])
            return -1;
        if (dim == 3 && (k < lat_lo[2] || k > lat_hi[2])) return -1;
        const auto s = lat_shape();
        const std::size_t flat =
            (static_cast<std::size_t>(k - (dim == 3 ? lat_lo[2] : 0)) * s[1] +
             (j - lat_lo[1])) *
                s[0] +
            (i - lat_lo[0]);
        return index_map[flat];
    }
};

/// Interior lattice at `resolution` nodes per unit length. Quadrature-grade
/// behavior assumes resolution >= 8; coarser grids are still built (the
/// single-node stencil checks rely on that).
inline Grid build_grid(const DomainSpec& domain, int resolution) {
    if (resolution < 1) throw ConfigError("resolution must be >= 1");
    Grid g;
    g.dim = domain.dim;
    g.spacing = 1.0 / resolution;
    g.cell_measure = std::pow(g.spacing, domain.dim);
    for (int a = 0; a < domain.dim; ++a) {
        g.lat_lo[static_cast<std::size_t>(a)] = static_cast<int>(
            std::floor(domain.box_lo[static_cast<std::size_t>(a)] / g.spacing)) - 1;
        g.lat_hi[static_cast<std::size_t>(a)] = static_cast<int>(
            std::ceil(domain.box_hi[static_cast<std::size_t>(a)] / g.spacing)) + 1;
    }
    const auto s = g.lat_shape();
    g.index_map.assign(static_cast<std::size_t>(s[0]) * s[1] * s[2], -1);

    const int k_lo = domain.dim == 3 ? g.lat_lo[2] : 0;
    const int k_hi = domain.dim == 3 ? g.lat_hi[2] : 0;
    std::int32_t next = 0;
    for (int i = g.lat_lo[0]; i <= g.lat_hi[0]; ++i)
        for (int j = g.lat_lo[1]; j <= g.lat_hi[1]; ++j)
            for (int k = k_lo; k <= k_hi; ++k) {
                const Point p{i * g.spacing, j * g.spacing,
                              domain.dim == 3 ? k * g.spacing : 0.0};
                if (!domain.contains(p)) continue;
                const std::size_t flat =
                    (static_cast<std::size_t>(k - k_lo) * s[1] + (j - g.lat_lo[1])) * s[0] +
                    (i - g.lat_lo[0]);
                g.index_map[flat] = next++;
                g.nodes.push_back({i, j, k});
                g.coords.push_back(p);
            }
    if (g.nodes.empty()) throw EmptyInterior("no lattice node falls inside the domain");
    return g;
}

/// Interior measure estimated from the lattice (the quadrature path of the
/// volume operation).
inline double volume_by_quadrature(const DomainSpec& domain, int resolution) {
    const Grid g = build_grid(domain, resolution);
    return static_cast<double>(g.size()) * g.cell_measure;
}

/// Closed-form volume where one exists; mask volumes count pixels.
inline double volume(const DomainSpec& domain) { return domain.volume; }

/// Points at distance >= margin from the boundary.
struct CompactSubset {
    DomainSpec parent;
    double margin = 0.0;

    CompactSubset(DomainSpec dom, double eps) : parent(std::move(dom)), margin(eps) {
        if (eps <= 0.0) throw ConfigError("compact subset margin must be positive");
        if (!has_any_member())
            throw EmptyErosion("margin " + std::to_string(eps) + " empties the domain");
    }

    bool contains(const Point& p) const {
        return parent.contains(p) && parent.boundary_distance(p) >= margin;
    }

    /// Closed form for rectangle/disk, lattice estimate otherwise.
    double measure(int resolution = 512) const {
        switch (parent.kind) {
            case DomainKind::rectangle: {
                double v = 1.0;
                for (int i = 0; i < parent.dim; ++i) {
                    const double side =
                        parent.lengths[static_cast<std::size_t>(i)] - 2.0 * margin;
                    if (side <= 0.0) return 0.0;
                    v *= side;
                }
                return v;
            }
            case DomainKind::disk: {
                const double r = parent.radius - margin;
                return r > 0.0 ? kPi * r * r : 0.0;
            }
            default: {
                const double h = 1.0 / resolution;
                std::size_t count = 0, total = 0;
                for (double x = parent.box_lo[0] + 0.5 * h; x < parent.box_hi[0]; x += h)
                    for (double y = parent.box_lo[1] + 0.5 * h; y < parent.box_hi[1]; y += h) {
                        ++total;
                        if (contains({x, y, 0.0})) ++count;
                    }
                (void)total;
                return static_cast<double>(count) * h * h;
            }
        }
    }

private:
    bool has_any_member() const {
        const int probes = 128;
        for (int a = 0; a < probes; ++a)
            for (int b = 0; b < probes; ++b) {
                Point p{parent.box_lo[0] +
                            (a + 0.5) * (parent.box_hi[0] - parent.box_lo[0]) / probes,
                        parent.box_lo[1] +
                            (b + 0.5) * (parent.box_hi[1] - parent.box_lo[1]) / probes,
                        0.0};
                if (parent.dim == 2) {
                    if (contains(p)) return true;
                } else {
                    for (int c = 0; c < probes; c += 4) {
                        p[2] = parent.box_lo[2] +
                               (c + 0.5) * (parent.box_hi[2] - parent.box_lo[2]) / probes;
                        if (contains(p)) return true;
                    }
                }
            }
        return false;
    }
};

inline CompactSubset compact_subset(const DomainSpec& domain, double margin) {
    return CompactSubset(domain, margin);
}

/// Deterministic tensor sample set inside a compact subset: an nx-per-axis
/// midpoint lattice over the bounding box, filtered by membership.
inline std::vector<Point> tensor_samples(const CompactSubset& subset, int nx) {
    std::vector<Point> out;
    const auto& d = subset.parent;
    const int nz = d.dim == 3 ? nx : 1;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j)
            for (int k = 0; k < nz; ++k) {
                Point p{d.box_lo[0] + (i + 0.5) * (d.box_hi[0] - d.box_lo[0]) / nx,
                        d.box_lo[1] + (j + 0.5) * (d.box_hi[1] - d.box_lo[1]) / nx,
                        d.dim == 3
                            ? d.box_lo[2] + (k + 0.5) * (d.box_hi[2] - d.box_lo[2]) / nz
                            : 0.0};
                if (subset.contains(p)) out.push_back(p);
            }
    return out;
}

}  // namespace fermigas
