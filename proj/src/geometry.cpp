#include "balfield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "balfield/field_ops.hpp"
#include "balfield/parallel.hpp"
#include "mc_tables.hpp"

namespace balfield {

namespace {

inline bool inside(double v) { return v > 0.0; }

inline double crossing_t(double fa, double fb) { return fa / (fa - fb); }

// Same neighbor rule as the stencil ops: mirror clamps to the edge node.
inline int step_idx(int i, int n, int d, Boundary b) {
    int j = i + d;
    if (j < 0) return b == Boundary::Periodic ? j + n : 0;
    if (j >= n) return b == Boundary::Periodic ? j - n : n - 1;
    return j;
}

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

// True when the face's corner signs alternate diagonally (all four edges
// crossed), the only case with two valid segment pairings.
inline bool face_ambiguous(int cfg, int face) {
    const int* c = mc::face_corner[face];
    int b0 = (cfg >> c[0]) & 1, b1 = (cfg >> c[1]) & 1;
    int b2 = (cfg >> c[2]) & 1, b3 = (cfg >> c[3]) & 1;
    return b0 == b2 && b1 == b3 && b0 != b1;
}

// Whether the triangulation row keeps the face's corner-0/corner-2 diagonal
// connected: its boundary segments on the face then pair cyclic edges
// (0,1) and (2,3) rather than (1,2) and (3,0). Boundary segments are the
// directed triangle sides whose reverse never occurs.
bool row_pairs_02(const int* tri, int face) {
    int from[16], to[16], n = 0;
    for (int t = 0; tri[t] != -1; t += 3) {
        for (int m = 0; m < 3; ++m) {
            from[n] = tri[t + m];
            to[n] = tri[t + (m + 1) % 3];
            ++n;
        }
    }
    const int* fe = mc::face_edge[face];
    auto is_boundary = [&](int a, int b) {
        bool fwd = false, rev = false;
        for (int q = 0; q < n; ++q) {
            if (from[q] == a && to[q] == b) fwd = true;
            if (from[q] == b && to[q] == a) rev = true;
        }
        return fwd != rev;
    };
    if (is_boundary(fe[0], fe[1]) || is_boundary(fe[2], fe[3])) return true;
    if (is_boundary(fe[1], fe[2]) || is_boundary(fe[3], fe[0])) return false;
    throw std::logic_error("marching cubes: ambiguous face without boundary segments");
}

// Sign of the bilinear saddle decides which diagonal stays connected.
// With corner signs alternating, a + c and b + d have opposite strict signs,
// so the denominator cannot vanish.
inline bool decider_pairs_02(double a, double b, double c, double d) {
    double saddle = (a * c - b * d) / (a + c - b - d);
    return inside(saddle) == inside(a);
}

}  // namespace

ZeroCrossings extract_zero_crossings(const Field& f) {
    require_valid_input(f, "extract_zero_crossings");
    const GridSpec& g = f.grid;
    ZeroCrossings out;
    const int nn[3] = {g.nx, g.ny, g.nz};
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t idx = g.index(i, j, k);
                const double fa = f.v[idx];
                const int coord[3] = {i, j, k};
                for (int axis = 0; axis < g.dim; ++axis) {
                    if (coord[axis] + 1 >= nn[axis]) continue;
                    const std::size_t stride =
                        axis == 0 ? 1
                                  : (axis == 1 ? static_cast<std::size_t>(g.nx)
                                               : static_cast<std::size_t>(g.nx) * g.ny);
                    const double fb = f.v[idx + stride];
                    if (inside(fa) == inside(fb)) continue;
                    const double t = crossing_t(fa, fb);
                    std::array<double, 3> pos = g.position(i, j, k);
                    pos[axis] += t * g.h;
                    out.points.push_back({idx, axis, t, pos});
                }
            }
    return out;
}

TriMesh extract_surface(const Field& f) {
    require_valid_input(f, "extract_surface");
    const GridSpec& g = f.grid;
    if (g.dim != 3) throw std::invalid_argument("extract_surface: 3-D fields only");
    TriMesh mesh;
    // One shared vertex per crossed grid edge, keyed by (lower node, axis).
    std::unordered_map<std::uint64_t, int> edge_vertex;
    edge_vertex.reserve(1024);

    const std::size_t stride[3] = {1, static_cast<std::size_t>(g.nx),
                                   static_cast<std::size_t>(g.nx) * g.ny};

    auto vertex_on = [&](int i, int j, int k, int e) {
        const int* ca = mc::corner_offset[mc::edge_corner[e][0]];
        const int* cb = mc::corner_offset[mc::edge_corner[e][1]];
        int axis = 0;
        for (int a = 0; a < 3; ++a)
            if (ca[a] != cb[a]) axis = a;
        const int lo[3] = {i + std::min(ca[0], cb[0]), j + std::min(ca[1], cb[1]),
                           k + std::min(ca[2], cb[2])};
        const std::size_t node = g.index(lo[0], lo[1], lo[2]);
        const std::uint64_t key = static_cast<std::uint64_t>(node) * 4 + axis;
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        const double fa = f.v[node];
        const double fb = f.v[node + stride[axis]];
        const double t = crossing_t(fa, fb);
        std::array<double, 3> pos = g.position(lo[0], lo[1], lo[2]);
        pos[axis] += t * g.h;
        const int id = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(pos);
        edge_vertex.emplace(key, id);
        return id;
    };

    for (int k = 0; k + 1 < g.nz; ++k)
        for (int j = 0; j + 1 < g.ny; ++j)
            for (int i = 0; i + 1 < g.nx; ++i) {
                double cv[8];
                int cfg = 0;
                for (int c = 0; c < 8; ++c) {
                    const int* o = mc::corner_offset[c];
                    cv[c] = f.v[g.index(i + o[0], j + o[1], k + o[2])];
                    if (inside(cv[c])) cfg |= 1 << c;
                }
                if (cfg == 0 || cfg == 255) continue;
                const int* tri = mc::tri_table[cfg];

                int amb = -1, n_amb = 0;
                for (int fc = 0; fc < 6; ++fc)
                    if (face_ambiguous(cfg, fc)) {
                        amb = fc;
                        ++n_amb;
                    }
                if (n_amb == 1) {
                    const int* c4 = mc::face_corner[amb];
                    const bool want = decider_pairs_02(cv[c4[0]], cv[c4[1]],
                                                       cv[c4[2]], cv[c4[3]]);
                    if (want != row_pairs_02(tri, amb)) tri = mc::tri_table[255 - cfg];
                }

                for (int t = 0; tri[t] != -1; t += 3) {
                    int v0 = vertex_on(i, j, k, tri[t]);
                    int v1 = vertex_on(i, j, k, tri[t + 1]);
                    int v2 = vertex_on(i, j, k, tri[t + 2]);
                    if (v0 == v1 || v1 == v2 || v0 == v2) continue;
                    mesh.triangles.push_back({v0, v1, v2});
                }
            }

    if (mesh.vertices.empty())
        throw std::runtime_error("extract_surface: field does not change sign");
    return mesh;
}

namespace {

double mesh_area(const TriMesh& mesh) {
    KahanSum area;
    for (const auto& t : mesh.triangles) {
        const auto& a = mesh.vertices[t[0]];
        const auto& b = mesh.vertices[t[1]];
        const auto& c = mesh.vertices[t[2]];
        const double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        const double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        const double cx = u[1] * v[2] - u[2] * v[1];
        const double cy = u[2] * v[0] - u[0] * v[2];
        const double cz = u[0] * v[1] - u[1] * v[0];
        area.add(0.5 * std::sqrt(cx * cx + cy * cy + cz * cz));
    }
    return area.s;
}

double contour_length_2d(const Field& f) {
    const GridSpec& g = f.grid;
    KahanSum len;
    bool any = false;
    // Cell corners counterclockwise from the origin corner; edge e joins
    // corner e and e+1.
    const int cox[4] = {0, 1, 1, 0};
    const int coy[4] = {0, 0, 1, 1};
    auto edge_point = [&](int i, int j, int e, std::array<double, 2>& p) {
        const int a = e, b = (e + 1) % 4;
        const double fa = f.at(i + cox[a], j + coy[a], 0);
        const double fb = f.at(i + cox[b], j + coy[b], 0);
        const double t = crossing_t(fa, fb);
        p[0] = (i + cox[a] + t * (cox[b] - cox[a])) * g.h;
        p[1] = (j + coy[a] + t * (coy[b] - coy[a])) * g.h;
    };
    auto add_segment = [&](int i, int j, int ea, int eb) {
        std::array<double, 2> p, q;
        edge_point(i, j, ea, p);
        edge_point(i, j, eb, q);
        len.add(std::hypot(q[0] - p[0], q[1] - p[1]));
        any = true;
    };
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) {
            double cv[4];
            int crossed[4], nc = 0;
            for (int e = 0; e < 4; ++e) cv[e] = f.at(i + cox[e], j + coy[e], 0);
            for (int e = 0; e < 4; ++e)
                if (inside(cv[e]) != inside(cv[(e + 1) % 4])) crossed[nc++] = e;
            if (nc == 0) continue;
            if (nc == 2) {
                add_segment(i, j, crossed[0], crossed[1]);
            } else {
                // All four edges crossed: resolve with the bilinear saddle.
                if (decider_pairs_02(cv[0], cv[1], cv[2], cv[3])) {
                    add_segment(i, j, 0, 1);
                    add_segment(i, j, 2, 3);
                } else {
                    add_segment(i, j, 1, 2);
                    add_segment(i, j, 3, 0);
                }
            }
        }
    if (!any) throw std::runtime_error("surface_area: field does not change sign");
    return len.s;
}

}  // namespace

double surface_area(const Field& f) {
    require_valid_input(f, "surface_area");
    if (f.grid.dim == 2) return contour_length_2d(f);
    return mesh_area(extract_surface(f));
}

void write_off(const TriMesh& mesh, std::ostream& out) {
    out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
    char line[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(line, sizeof line, "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
        out << line;
    }
    for (const auto& t : mesh.triangles)
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

double enclosed_volume(const Field& f) {
    require_valid_input(f, "enclosed_volume");
    const GridSpec& g = f.grid;
    KahanSum total;
    for (int k = 0; k < g.nz; ++k) {
        const double wk = (g.dim == 3 && (k == 0 || k == g.nz - 1)) ? 0.5 : 1.0;
        for (int j = 0; j < g.ny; ++j) {
            const double wj = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
            KahanSum col;
            const std::size_t row = g.index(0, j, k);
            for (int i = 0; i + 1 < g.nx; ++i) {
                const double fa = f.v[row + i];
                const double fb = f.v[row + i + 1];
                const bool ia = inside(fa), ib = inside(fb);
                if (ia && ib) {
                    col.add(g.h);
                } else if (ia != ib) {
                    const double t = crossing_t(fa, fb);
                    col.add((ia ? t : 1.0 - t) * g.h);
                }
            }
            total.add(wk * wj * col.s);
        }
    }
    return total.s * (g.dim == 3 ? g.h * g.h : g.h);
}

namespace {

enum class CurvKind { Sum, Gauss };

CurvatureField curvature_field(const Field& f, CurvKind kind, const char* op) {
    require_valid_input(f, op);
    const GridSpec& g = f.grid;
    CurvatureField out{Field(g), std::vector<std::uint8_t>(g.node_count(), 1)};
    const double inv_2h = 1.0 / (2.0 * g.h);
    const double inv_h2 = 1.0 / (g.h * g.h);
    const double inv_4h2 = 1.0 / (4.0 * g.h * g.h);
    const double eps = 1e-6 / g.h;
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const Boundary b = g.boundary;
    const bool three = g.dim == 3;

    auto do_plane = [&](int k) {
        const int km = three ? step_idx(k, nz, -1, b) : 0;
        const int kp = three ? step_idx(k, nz, +1, b) : 0;
        for (int j = 0; j < ny; ++j) {
            const int jm = step_idx(j, ny, -1, b);
            const int jp = step_idx(j, ny, +1, b);
            for (int i = 0; i < nx; ++i) {
                const int im = step_idx(i, nx, -1, b);
                const int ip = step_idx(i, nx, +1, b);
                auto F = [&](int ii, int jj, int kk) {
                    return f.v[g.index(ii, jj, kk)];
                };
                const double f0 = F(i, j, k);
                const double gx = (F(ip, j, k) - F(im, j, k)) * inv_2h;
                const double gy = (F(i, jp, k) - F(i, jm, k)) * inv_2h;
                const double gz =
                    three ? (F(i, j, kp) - F(i, j, km)) * inv_2h : 0.0;
                const double fxx = (F(ip, j, k) - 2.0 * f0 + F(im, j, k)) * inv_h2;
                const double fyy = (F(i, jp, k) - 2.0 * f0 + F(i, jm, k)) * inv_h2;
                const double fzz =
                    three ? (F(i, j, kp) - 2.0 * f0 + F(i, j, km)) * inv_h2 : 0.0;
                const double fxy =
                    (F(ip, jp, k) - F(ip, jm, k) - F(im, jp, k) + F(im, jm, k)) *
                    inv_4h2;
                const double fxz =
                    three ? (F(ip, j, kp) - F(ip, j, km) - F(im, j, kp) +
                             F(im, j, km)) *
                                inv_4h2
                          : 0.0;
                const double fyz =
                    three ? (F(i, jp, kp) - F(i, jp, km) - F(i, jm, kp) +
                             F(i, jm, km)) *
                                inv_4h2
                          : 0.0;

                const std::size_t idx = g.index(i, j, k);
                const double g2 = gx * gx + gy * gy + gz * gz;
                const double gn = std::sqrt(g2);
                if (gn < eps) {
                    out.values.v[idx] = 0.0;
                    out.valid[idx] = 0;
                    continue;
                }
                if (kind == CurvKind::Sum) {
                    const double lap = fxx + fyy + fzz;
                    const double quad = gx * gx * fxx + gy * gy * fyy +
                                        gz * gz * fzz + 2.0 * gx * gy * fxy +
                                        2.0 * gx * gz * fxz + 2.0 * gy * gz * fyz;
                    out.values.v[idx] = -(lap * g2 - quad) / (g2 * gn);
                } else {
                    const double adj00 = fyy * fzz - fyz * fyz;
                    const double adj11 = fxx * fzz - fxz * fxz;
                    const double adj22 = fxx * fyy - fxy * fxy;
                    const double adj01 = fyz * fxz - fxy * fzz;
                    const double adj02 = fxy * fyz - fxz * fyy;
                    const double adj12 = fxy * fxz - fyz * fxx;
                    const double quad = gx * gx * adj00 + gy * gy * adj11 +
                                        gz * gz * adj22 +
                                        2.0 * (gx * gy * adj01 + gx * gz * adj02 +
                                               gy * gz * adj12);
                    out.values.v[idx] = quad / (g2 * g2);
                }
            }
        }
    };
    if (three)
        parallel_for(nz, do_plane);
    else
        do_plane(0);
    return out;
}

}  // namespace

CurvatureField sum_curvature_field(const Field& f) {
    return curvature_field(f, CurvKind::Sum, "sum_curvature_field");
}

CurvatureField gaussian_curvature_field(const Field& f) {
    if (f.grid.dim != 3)
        throw std::invalid_argument("gaussian_curvature_field: 3-D fields only");
    return curvature_field(f, CurvKind::Gauss, "gaussian_curvature_field");
}

RadiusStats sphere_radius(const Field& f, const std::array<double, 3>& center) {
    ZeroCrossings zc = extract_zero_crossings(f);
    if (zc.empty()) throw std::runtime_error("sphere_radius: no zero crossings");
    RadiusStats st;
    st.count = static_cast<int>(zc.points.size());
    KahanSum sum;
    st.min = st.max = -1.0;
    for (const auto& p : zc.points) {
        const double dx = p.position[0] - center[0];
        const double dy = p.position[1] - center[1];
        const double dz = p.position[2] - center[2];
        const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        sum.add(r);
        if (st.min < 0.0 || r < st.min) st.min = r;
        if (r > st.max) st.max = r;
    }
    st.mean = sum.s / st.count;
    KahanSum var;
    for (const auto& p : zc.points) {
        const double dx = p.position[0] - center[0];
        const double dy = p.position[1] - center[1];
        const double dz = p.position[2] - center[2];
        const double d = std::sqrt(dx * dx + dy * dy + dz * dz) - st.mean;
        var.add(d * d);
    }
    st.stddev = std::sqrt(var.s / st.count);
    return st;
}

SurfaceMetrics surface_metrics(const Field& f,
                               const std::array<double, 3>& center) {
    ZeroCrossings zc = extract_zero_crossings(f);
    if (zc.empty()) throw std::runtime_error("surface_metrics: no zero crossings");
    const GridSpec& g = f.grid;
    SurfaceMetrics m;
    m.area = surface_area(f);
    m.volume = enclosed_volume(f);

    KahanSum rsum;
    for (const auto& p : zc.points) {
        const double dx = p.position[0] - center[0];
        const double dy = p.position[1] - center[1];
        const double dz = p.position[2] - center[2];
        rsum.add(std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    m.radius = rsum.s / static_cast<double>(zc.points.size());

    const CurvatureField ks = sum_curvature_field(f);
    const std::size_t stride[3] = {1, static_cast<std::size_t>(g.nx),
                                   static_cast<std::size_t>(g.nx) * g.ny};
    KahanSum ksum;
    std::size_t n = 0;
    for (const auto& p : zc.points) {
        const std::size_t a = p.node;
        const std::size_t b2 = p.node + stride[p.axis];
        if (!ks.valid[a] || !ks.valid[b2]) continue;
        ksum.add((1.0 - p.t) * ks.values.v[a] + p.t * ks.values.v[b2]);
        ++n;
    }
    m.mean_k_s = n ? ksum.s / static_cast<double>(n) : 0.0;
    return m;
}

}  // namespace balfield
