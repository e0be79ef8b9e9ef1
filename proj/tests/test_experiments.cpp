#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "balfield/experiments.hpp"
#include "balfield/io.hpp"
#include "balfield/parallel.hpp"

using namespace balfield;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

ExperimentConfig small_2d_stasis(const fs::path& out) {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::BalancedStasis;
    cfg.grid = GridSpec::make2d(32, 32, 1.0);
    cfg.shape = AnalyticSphere{8.0};
    cfg.width = 4.0;
    cfg.duration = 4.0;
    cfg.record_every = 40;
    cfg.out_dir = out.string();
    return cfg;
}

bool has_verdict(const ExperimentResult& res, const std::string& name) {
    for (const auto& v : res.verdicts)
        if (v.name == name) return true;
    return false;
}

const Verdict& verdict(const ExperimentResult& res, const std::string& name) {
    for (const auto& v : res.verdicts)
        if (v.name == name) return v;
    throw std::logic_error("missing verdict " + name);
}

}  // namespace

TEST_CASE("artifacts are byte-identical across worker counts") {
    auto run_with = [](int workers, const char* dirname) {
        set_worker_count(workers);
        ExperimentConfig cfg = small_2d_stasis(fresh_dir(dirname));
        run_experiment(cfg);
        set_worker_count(0);
        return slurp(fs::path(cfg.out_dir) / "metrics.csv");
    };
    std::string serial = run_with(1, "balfield-workers-1");
    std::string wide = run_with(7, "balfield-workers-7");
    CHECK(serial == wide);
    CHECK(serial.find("# schema=balance-field-metrics-v1") == 0);

    // and a rerun at the same width is byte-identical too
    std::string again = run_with(7, "balfield-workers-7b");
    CHECK(wide == again);
}

TEST_CASE("gl shrink on a small disc follows the radius law") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::GlShrink;
    cfg.grid = GridSpec::make2d(48, 48, 1.0);
    cfg.shape = AnalyticSphere{12.0};
    cfg.width = 4.0;
    cfg.record_every = 10;
    cfg.out_dir = fresh_dir("balfield-gl2d").string();
    ExperimentResult res = run_experiment(cfg);
    CHECK(res.pass());
    CHECK(verdict(res, "radius_law").pass);
    CHECK(verdict(res, "energy_monotone").pass);

    // energy column really is non-increasing in the artifact
    std::ifstream in(fs::path(cfg.out_dir) / "metrics.csv");
    std::string line;
    std::getline(in, line);  // schema
    std::getline(in, line);  // header
    double prev = 0.0;
    bool first = true;
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string cell;
        for (int c = 0; c < 6; ++c) std::getline(ls, cell, ',');
        double e = std::stod(cell);
        if (!first) CHECK(e <= prev + 1e-12 * std::abs(prev));
        prev = e;
        first = false;
        ++rows;
    }
    CHECK(rows >= 3);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "verdicts.txt"));
}

TEST_CASE("gl plane interface stays put") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::GlShrink;
    cfg.grid = GridSpec::make3d(32, 32, 32, 1.0);
    cfg.shape = AnalyticPlane{};
    cfg.plane_axis = 1;
    cfg.width = 4.0;
    cfg.duration = 4.0;
    cfg.out_dir = fresh_dir("balfield-glplane").string();
    ExperimentResult res = run_experiment(cfg);
    CHECK(res.pass());
    const Verdict& drift = verdict(res, "plane_drift");
    CHECK(drift.pass);
    CHECK(drift.value <= 0.05);
}

TEST_CASE("snapshots appear at the requested cadence and read back") {
    ExperimentConfig cfg = small_2d_stasis(fresh_dir("balfield-snaps"));
    cfg.snapshot_every = 160;
    run_experiment(cfg);
    fs::path first = fs::path(cfg.out_dir) / "snap_000000.snap";
    REQUIRE(fs::exists(first));
    Snapshot snap = read_snapshot(first.string());
    CHECK(snap.meta.step == 0);
    CHECK(snap.meta.model == ModelKind::Balanced);
    CHECK(snap.meta.width == 4.0);
    CHECK(snap.field.grid.nx == 32);
    CHECK(snap.field.grid.dim == 2);

    int count = 0;
    for (const auto& entry : fs::directory_iterator(cfg.out_dir))
        if (entry.path().extension() == ".snap") ++count;
    // 320 steps at cadence 160, plus the forced final record
    CHECK(count == 3);
}

TEST_CASE("model comparison on a small disc") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::Compare;
    cfg.grid = GridSpec::make2d(64, 64, 1.0);
    cfg.shape = AnalyticSphere{14.0};
    cfg.width = 4.0;
    cfg.duration = 8.0;
    cfg.record_every = 20;
    cfg.out_dir = fresh_dir("balfield-compare").string();
    ExperimentResult res = run_experiment(cfg);
    CHECK(verdict(res, "shared_initial_geometry").pass);
    CHECK(verdict(res, "gl_energy_monotone").pass);
    CHECK(verdict(res, "radius_law").pass);
    CHECK(verdict(res, "balanced_radius_return").pass);

    std::string csv = slurp(fs::path(cfg.out_dir) / "compare.csv");
    CHECK(csv.find("# schema=balance-field-compare-v1") == 0);
    CHECK(csv.find("gl,") != std::string::npos);
    CHECK(csv.find("balanced,") != std::string::npos);

    std::string summary = slurp(fs::path(cfg.out_dir) / "summary.json");
    CHECK(summary.find("\"gl\"") != std::string::npos);
    CHECK(summary.find("\"balanced\"") != std::string::npos);
    CHECK(summary.find("\"radius_drift_rate\"") != std::string::npos);
}

TEST_CASE("oracle report stands alone") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::OracleReport;
    cfg.out_dir = fresh_dir("balfield-oracle").string();
    ExperimentResult res = run_experiment(cfg);
    CHECK(res.pass());
    CHECK(has_verdict(res, "balance_residuals"));
    CHECK(has_verdict(res, "profile_energy_quadrature"));
    for (const char* name :
         {"balance_residuals.csv", "profile_energy.csv", "metric_sphere.csv",
          "energy_terms.csv", "elastica_torus.csv", "well_band.csv",
          "profile_gap.csv"})
        CHECK(fs::exists(fs::path(cfg.out_dir) / name));
}

TEST_CASE("a dt override above the stable cap is rejected") {
    ExperimentConfig cfg = small_2d_stasis(fresh_dir("balfield-dt"));
    ModelWeights w = weights_from_width(cfg.width);
    cfg.dt = stable_dt(w, cfg.grid) * 1.01;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    // at or below the cap it is accepted
    cfg.dt = stable_dt(w, cfg.grid);
    ExperimentResult res = run_experiment(cfg);
    CHECK(has_verdict(res, "radius_return"));
}

TEST_CASE("runners reject shapes they cannot measure") {
    ExperimentConfig cfg = small_2d_stasis(fresh_dir("balfield-shapes"));
    cfg.shape = AnalyticPlane{};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg = small_2d_stasis(fresh_dir("balfield-shapes"));
    cfg.experiment = ExperimentKind::GlShrink;
    cfg.shape = AnalyticTorus{18.0, 6.0};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg = small_2d_stasis(fresh_dir("balfield-shapes"));
    cfg.experiment = ExperimentKind::Compare;
    cfg.shape = AnalyticPlane{};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("result pass() is the conjunction of its verdicts") {
    ExperimentResult res;
    CHECK(res.pass());
    res.verdicts.push_back({"a", true, 0.0, 1.0, ""});
    CHECK(res.pass());
    res.verdicts.push_back({"b", false, 2.0, 1.0, ""});
    CHECK(!res.pass());
}
