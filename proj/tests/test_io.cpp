#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "balfield/grid.hpp"
#include "balfield/io.hpp"

using namespace balfield;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

}  // namespace

TEST_CASE("experiment names round trip") {
    for (ExperimentKind kind :
         {ExperimentKind::GlShrink, ExperimentKind::BalancedStasis,
          ExperimentKind::ProfileRecovery, ExperimentKind::ReinitBench,
          ExperimentKind::OracleReport, ExperimentKind::Compare}) {
        CHECK(experiment_from_name(experiment_name(kind)) == kind);
    }
    CHECK(std::string(experiment_name(ExperimentKind::GlShrink)) ==
          "gl-shrink");
    CHECK_THROWS_AS(experiment_from_name("warp-drive"),
                    std::invalid_argument);
}

TEST_CASE("full config parses with comments and blank lines") {
    ExperimentConfig cfg = parse(
        "# leading comment\n"
        "experiment = gl-shrink\n"
        "\n"
        "dim = 3\n"
        "nx = 48\n"
        "ny = 40\n"
        "nz = 32\n"
        "h = 0.5   # trailing comment\n"
        "boundary = periodic\n"
        "shape = torus\n"
        "major_radius = 7\n"
        "minor_radius = 2\n"
        "width = 4\n"
        "duration = 3.5\n"
        "dt = 1e-4\n"
        "out = /tmp/some-dir\n"
        "record_every = 5\n"
        "snapshots = 50\n"
        "seed = 42\n");
    CHECK(cfg.experiment == ExperimentKind::GlShrink);
    CHECK(cfg.grid.nx == 48);
    CHECK(cfg.grid.ny == 40);
    CHECK(cfg.grid.nz == 32);
    CHECK(cfg.grid.dim == 3);
    CHECK(cfg.grid.h == 0.5);
    CHECK(cfg.grid.boundary == Boundary::Periodic);
    auto* torus = std::get_if<AnalyticTorus>(&cfg.shape);
    REQUIRE(torus != nullptr);
    CHECK(torus->major_radius == 7.0);
    CHECK(torus->minor_radius == 2.0);
    CHECK(cfg.width == 4.0);
    CHECK(cfg.duration == 3.5);
    CHECK(!cfg.steps);
    CHECK(cfg.dt == 1e-4);
    CHECK(cfg.out_dir == "/tmp/some-dir");
    CHECK(cfg.record_every == 5);
    CHECK(cfg.snapshot_every == 50);
    CHECK(cfg.seed == 42);
}

TEST_CASE("defaults fill everything optional") {
    ExperimentConfig cfg = parse("experiment = balanced-stasis\n");
    CHECK(cfg.grid.nx == 64);
    CHECK(cfg.grid.dim == 3);
    CHECK(cfg.grid.boundary == Boundary::MirrorNeumann);
    auto* sphere = std::get_if<AnalyticSphere>(&cfg.shape);
    REQUIRE(sphere != nullptr);
    CHECK(sphere->radius == 16.0);
    CHECK(cfg.width == 6.0);
    CHECK(!cfg.duration);
    CHECK(!cfg.steps);
    CHECK(!cfg.dt);
    CHECK(!cfg.plane_offset);
    CHECK(cfg.record_every == 20);
    CHECK(cfg.snapshot_every == 0);
}

TEST_CASE("2-D configs build 2-D grids") {
    ExperimentConfig cfg = parse(
        "experiment = compare\n"
        "dim = 2\n"
        "nx = 96\n"
        "ny = 80\n"
        "h = 0.25\n"
        "shape = sphere\n"
        "radius = 8\n");
    CHECK(cfg.grid.dim == 2);
    CHECK(cfg.grid.nx == 96);
    CHECK(cfg.grid.ny == 80);
    CHECK(cfg.grid.nz == 1);
}

TEST_CASE("plane shape with axis and offset") {
    ExperimentConfig cfg = parse(
        "experiment = profile-recovery\n"
        "shape = plane\n"
        "axis = 2\n"
        "offset = 21.25\n");
    CHECK(std::holds_alternative<AnalyticPlane>(cfg.shape));
    CHECK(cfg.plane_axis == 2);
    CHECK(cfg.plane_offset == 21.25);
}

TEST_CASE("config rejections name the offending line") {
    auto error_of = [](const std::string& text) {
        try {
            parse(text);
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(error_of("bogus_key = 1\n").find("test.cfg:1") !=
          std::string::npos);
    CHECK(error_of("width = 4\nwidth = 6\n").find("test.cfg:2") !=
          std::string::npos);
    CHECK(error_of("width = four\n").find("test.cfg:1") !=
          std::string::npos);
    CHECK(error_of("width = four\n").find("'four'") != std::string::npos);
    CHECK(!error_of("h = 0\n").empty());
    CHECK(!error_of("h = -1\n").empty());
    CHECK(!error_of("dim = 4\n").empty());
    CHECK(!error_of("nx = 3\n").empty());
    CHECK(!error_of("boundary = absorbing\n").empty());
    CHECK(!error_of("shape = cube\n").empty());
    CHECK(!error_of("axis = 3\n").empty());
    CHECK(!error_of("experiment = shrink\n").empty());
    CHECK(!error_of("duration = 2\nsteps = 7\n").empty());
    CHECK(!error_of("width = 4 5\n").empty());
    CHECK(!error_of("record_every = 0\n").empty());
    CHECK(!error_of("no_equals_here\n").empty());
}

TEST_CASE("metrics CSV is schema-led and stable") {
    std::vector<MetricsRow> rows(2);
    rows[0] = {0,   0.0, 16.0, 3216.99, 17157.28, 241.27,
               120.0, -80.0, 201.27, 1.0, 0.125};
    rows[1].step = 20;
    rows[1].time = 1.0 / 3.0;
    rows[1].radius = 15.998877665544332;

    std::ostringstream a, b;
    write_metrics_csv(rows, a);
    write_metrics_csv(rows, b);
    CHECK(a.str() == b.str());

    std::istringstream in(a.str());
    std::string schema, header, row0, row1;
    std::getline(in, schema);
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    CHECK(schema == kMetricsSchema);
    CHECK(header ==
          "step,time,radius,area,volume,energy_total,energy_bilaplacian,"
          "energy_gradient,energy_well,max_abs_phi,band_mean_k_s");
    CHECK(row0.substr(0, 5) == "0,0,1");
    // 17 significant digits survive
    CHECK(row1.find("15.99887766554433") != std::string::npos);
    CHECK(row1.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("snapshot round trip is bit exact") {
    auto g = GridSpec::make3d(12, 10, 8, 0.5);
    Field f(g);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (double& v : f.v) v = dist(rng);
    f.v[0] = 0.1 + 0.2;  // a value that needs all 17 digits
    SnapshotMeta meta{1234, 0.1 + 0.2, ModelKind::Balanced, 6.0};

    std::ostringstream out;
    write_snapshot(f, meta, out);
    std::istringstream in(out.str());
    Snapshot snap = read_snapshot(in);

    CHECK(snap.field.grid.nx == 12);
    CHECK(snap.field.grid.ny == 10);
    CHECK(snap.field.grid.nz == 8);
    CHECK(snap.field.grid.h == 0.5);
    CHECK(snap.field.grid.boundary == g.boundary);
    CHECK(snap.meta.step == 1234);
    CHECK(snap.meta.time == meta.time);
    CHECK(snap.meta.model == ModelKind::Balanced);
    CHECK(snap.meta.width == 6.0);
    REQUIRE(snap.field.v.size() == f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(snap.field.v[i] == f.v[i]);

    // writing the reread field reproduces the byte stream
    std::ostringstream out2;
    write_snapshot(snap.field, snap.meta, out2);
    CHECK(out2.str() == out.str());
}

TEST_CASE("snapshot round trip for 2-D periodic GL fields") {
    auto g = GridSpec::make2d(12, 8, 2.0, Boundary::Periodic);
    Field f(g);
    for (std::size_t i = 0; i < f.v.size(); ++i)
        f.v[i] = std::sin(0.37 * static_cast<double>(i));
    SnapshotMeta meta{0, 0.0, ModelKind::GinzburgLandau, 4.0};
    std::ostringstream out;
    write_snapshot(f, meta, out);
    std::istringstream in(out.str());
    Snapshot snap = read_snapshot(in);
    CHECK(snap.field.grid.dim == 2);
    CHECK(snap.field.grid.boundary == Boundary::Periodic);
    CHECK(snap.meta.model == ModelKind::GinzburgLandau);
    for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(snap.field.v[i] == f.v[i]);
}

TEST_CASE("snapshot reader rejects tampered streams") {
    auto g = GridSpec::make3d(8, 8, 8, 1.0);
    Field f(g);
    SnapshotMeta meta{};
    std::ostringstream out;
    write_snapshot(f, meta, out);
    std::string text = out.str();

    {
        std::istringstream bad("not-a-snapshot\n" +
                               text.substr(text.find('\n') + 1));
        CHECK_THROWS_AS(read_snapshot(bad), std::runtime_error);
    }
    {
        // truncated payload
        std::istringstream bad(text.substr(0, text.size() - 8));
        CHECK_THROWS_AS(read_snapshot(bad), std::runtime_error);
    }
}

TEST_CASE("load_config reports missing files") {
    CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"),
                    std::invalid_argument);
}
