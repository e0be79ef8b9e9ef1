#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "balfield/geometry.hpp"
#include "balfield/grid.hpp"
#include "balfield/profile.hpp"

using namespace balfield;

namespace {

Field sphere_field(int n, double h, double radius, double width) {
    auto g = GridSpec::make3d(n, n, n, h);
    auto c = g.center();
    return init_field(g, {SphereShape{{c[0], c[1], c[2]}, radius}},
                      {width});
}

double rel_err(double measured, double exact) {
    return std::abs(measured - exact) / std::abs(exact);
}

}  // namespace

TEST_CASE("sphere area and volume within two percent") {
    Field f = sphere_field(64, 1.0, 16.0, 6.0);
    auto c = f.grid.center();
    SurfaceMetrics m = surface_metrics(f, c);
    double area_exact = 4.0 * std::numbers::pi * 256.0;
    double vol_exact = 4.0 / 3.0 * std::numbers::pi * 4096.0;
    CHECK(rel_err(m.area, area_exact) < 0.02);
    CHECK(rel_err(m.volume, vol_exact) < 0.02);
    CHECK(rel_err(m.radius, 16.0) < 0.01);
    CHECK(surface_area(f) == doctest::Approx(m.area).epsilon(1e-12));
    CHECK(enclosed_volume(f) == doctest::Approx(m.volume).epsilon(1e-12));
}

TEST_CASE("axis plane meshes to the exact cross-section") {
    auto g = GridSpec::make3d(64, 64, 64, 1.0);
    Field f = init_field(g, {PlaneShape{0, 31.5}}, {6.0});
    // 63 x 63 node-span cross section, crossings at exact midpoints
    CHECK(surface_area(f) == doctest::Approx(63.0 * 63.0).epsilon(1e-12));
    ZeroCrossings zc = extract_zero_crossings(f);
    CHECK(zc.points.size() == 64 * 64);
    for (const auto& p : zc.points) {
        CHECK(p.axis == 0);
        CHECK(p.t == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p.position[0] == doctest::Approx(31.5).epsilon(1e-12));
    }
    // half the box on the positive side
    CHECK(enclosed_volume(f) ==
          doctest::Approx(0.5 * 63.0 * 63.0 * 63.0).epsilon(1e-9));
}

TEST_CASE("uniform positive field fills the node-span box") {
    auto g = GridSpec::make3d(64, 64, 64, 1.0);
    Field f(g);
    for (double& v : f.v) v = 1.0;
    CHECK(enclosed_volume(f) == doctest::Approx(63.0 * 63.0 * 63.0));
    Field neg(g);
    for (double& v : neg.v) v = -1.0;
    CHECK(enclosed_volume(neg) == 0.0);
    CHECK_THROWS_AS(surface_area(f), std::runtime_error);
    CHECK_THROWS_AS(extract_surface(f), std::runtime_error);
    CHECK_THROWS_AS(sphere_radius(f, g.center()), std::runtime_error);
    CHECK_THROWS_AS(surface_metrics(f, g.center()), std::runtime_error);
}

TEST_CASE("2-D circle length and disc area") {
    auto g = GridSpec::make2d(128, 128, 1.0);
    auto c = g.center();
    Field f = init_field(g, {SphereShape{{c[0], c[1], 0.0}, 30.0}}, {6.0});
    CHECK(rel_err(surface_area(f), 2.0 * std::numbers::pi * 30.0) < 0.02);
    CHECK(rel_err(enclosed_volume(f), std::numbers::pi * 900.0) < 0.02);
}

TEST_CASE("sphere area error drops at least quadratically with h") {
    double exact = 4.0 * std::numbers::pi * 9.0;
    Field coarse = sphere_field(33, 0.5, 3.0, 2.5);
    Field fine = sphere_field(65, 0.25, 3.0, 2.5);
    double e_coarse = rel_err(surface_area(coarse), exact);
    double e_fine = rel_err(surface_area(fine), exact);
    CHECK(e_coarse / e_fine >= 1.8);
}

TEST_CASE("extracted sphere mesh is watertight") {
    Field f = sphere_field(48, 1.0, 12.0, 6.0);
    TriMesh mesh = extract_surface(f);
    REQUIRE(!mesh.triangles.empty());
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            CHECK(a != b);
            edge_count[{std::min(a, b), std::max(a, b)}]++;
        }
    for (const auto& [edge, count] : edge_count) CHECK(count == 2);
    // Euler characteristic of a sphere: V - E + F = 2
    CHECK(static_cast<long>(mesh.vertices.size()) -
              static_cast<long>(edge_count.size()) +
              static_cast<long>(mesh.triangles.size()) ==
          2);
}

TEST_CASE("OFF export round trip header") {
    Field f = sphere_field(32, 1.0, 8.0, 4.0);
    TriMesh mesh = extract_surface(f);
    std::ostringstream out;
    write_off(mesh, out);
    std::istringstream in(out.str());
    std::string tag;
    std::size_t nv = 0, nf = 0, ne = 0;
    in >> tag >> nv >> nf >> ne;
    CHECK(tag == "OFF");
    CHECK(nv == mesh.vertices.size());
    CHECK(nf == mesh.triangles.size());
}

TEST_CASE("curvature fields on the resolved sphere") {
    Field f = sphere_field(64, 1.0, 16.0, 6.0);
    auto c = f.grid.center();
    CurvatureField ks = sum_curvature_field(f);
    CurvatureField kg = gaussian_curvature_field(f);
    double ks_exact = 2.0 / 16.0;
    double kg_exact = 1.0 / 256.0;

    // statistics over the core of the band, where level sets are read
    double ks_err_max = 0.0, ks_err_sum = 0.0, kg_err_sum = 0.0;
    double defect_sum = 0.0, ks_sq_sum = 0.0;
    int count = 0;
    const auto& g = f.grid;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                std::size_t idx = g.index(i, j, k);
                if (std::abs(f.v[idx]) > 0.5) continue;
                REQUIRE(ks.valid[idx]);
                REQUIRE(kg.valid[idx]);
                double ks_err = rel_err(ks.values.v[idx], ks_exact);
                ks_err_max = std::max(ks_err_max, ks_err);
                ks_err_sum += ks_err;
                kg_err_sum += rel_err(kg.values.v[idx], kg_exact);
                double s = ks.values.v[idx];
                defect_sum += std::abs(s * s - 4.0 * kg.values.v[idx]);
                ks_sq_sum += s * s;
                ++count;
            }
    REQUIRE(count > 1000);
    CHECK(ks_err_max < 0.20);
    CHECK(ks_err_sum / count < 0.06);
    CHECK(kg_err_sum / count < 0.12);
    // the umbilic combination K_S^2 - 4 K_G cancels far better than either
    // curvature alone
    CHECK(defect_sum / ks_sq_sum < 0.1);

    RadiusStats rs = sphere_radius(f, c);
    CHECK(rs.stddev < 0.1 * g.h);
    CHECK(rs.count > 1000);
    CHECK(rs.min <= rs.mean);
    CHECK(rs.mean <= rs.max);
}

TEST_CASE("flat-gradient nodes are masked out, not clamped") {
    Field f = sphere_field(32, 1.0, 8.0, 4.0);
    CurvatureField ks = sum_curvature_field(f);
    std::size_t center_idx =
        f.grid.index(f.grid.nx / 2, f.grid.ny / 2, f.grid.nz / 2);
    // deep inside the plateau the gradient vanishes
    CHECK(!ks.valid[center_idx]);
    CHECK(ks.values.v[center_idx] == 0.0);
}

TEST_CASE("torus area and volume against closed forms") {
    auto g = GridSpec::make3d(64, 64, 64, 1.0);
    auto c = g.center();
    Field f = init_field(g, {TorusShape{{c[0], c[1], c[2]}, 18.0, 6.0}},
                         {4.0});
    double area_exact = 4.0 * std::numbers::pi * std::numbers::pi * 18.0 * 6.0;
    double vol_exact = 2.0 * std::numbers::pi * std::numbers::pi * 18.0 * 36.0;
    CHECK(rel_err(surface_area(f), area_exact) < 0.01);
    CHECK(rel_err(enclosed_volume(f), vol_exact) < 0.01);
}

TEST_CASE("dimension guards") {
    auto g2 = GridSpec::make2d(32, 32, 1.0);
    auto c = g2.center();
    Field f = init_field(g2, {SphereShape{{c[0], c[1], 0.0}, 8.0}}, {4.0});
    CHECK_THROWS_AS(extract_surface(f), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_curvature_field(f), std::invalid_argument);
    // sum curvature works in 2-D
    CurvatureField ks = sum_curvature_field(f);
    int valid = 0;
    for (std::size_t i = 0; i < ks.valid.size(); ++i)
        if (ks.valid[i] && std::abs(f.v[i]) < 0.9) {
            CHECK(ks.values.v[i] == doctest::Approx(1.0 / 8.0).epsilon(0.2));
            ++valid;
        }
    CHECK(valid > 50);
}

TEST_CASE("crossing rule: inside is strictly positive") {
    auto g = GridSpec::make3d(8, 8, 8, 1.0);
    Field f(g);
    for (double& v : f.v) v = -1.0;
    // one positive node produces exactly 6 crossings, t from the positive node
    f.v[g.index(4, 4, 4)] = 1.0;
    ZeroCrossings zc = extract_zero_crossings(f);
    CHECK(zc.points.size() == 6);
    for (const auto& p : zc.points) CHECK(p.t == doctest::Approx(0.5));

    // zero values are outside: no sign change against -1
    Field z(g);
    for (double& v : z.v) v = 0.0;
    z.v[g.index(4, 4, 4)] = -1.0;
    CHECK(extract_zero_crossings(z).empty());
}
