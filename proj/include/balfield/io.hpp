#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "balfield/grid.hpp"
#include "balfield/model.hpp"
#include "balfield/oracle.hpp"

namespace balfield {

enum class ExperimentKind {
    GlShrink,
    BalancedStasis,
    ProfileRecovery,
    ReinitBench,
    OracleReport,
    Compare,
};

/// Round-trips the CLI spelling of each experiment (gl-shrink,
/// balanced-stasis, profile-recovery, reinit-bench, oracle-report, compare).
const char* experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

/// Everything a run needs, read from a flat `key = value` file. Shape keys:
/// `shape = sphere|torus|plane`, `radius`, `major_radius`, `minor_radius`,
/// `axis`, `offset`. Shapes are placed at the grid box center; `offset`
/// moves a plane off it. `duration` is simulated time; `steps` is the
/// alternative. `dt` must not exceed the model's stable step.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::BalancedStasis;
    GridSpec grid = GridSpec::make3d(64, 64, 64, 1.0);
    AnalyticSurface shape = AnalyticSphere{16.0};
    int plane_axis = 0;
    std::optional<double> plane_offset;  ///< grid-box center when absent
    double width = 6.0;
    std::optional<double> duration;
    std::optional<long> steps;
    std::optional<double> dt;
    std::string out_dir = "out";
    int record_every = 20;    ///< metrics cadence in steps
    int snapshot_every = 0;   ///< 0 disables snapshots
    unsigned long seed = 0;   ///< reserved for perturbed variants
};

/// Parses a config stream / file. Unknown keys, malformed lines, and
/// out-of-range values throw std::invalid_argument naming the line.
ExperimentConfig parse_config(std::istream& in, const std::string& origin);
ExperimentConfig load_config(const std::string& path);

/// One metrics record. Columns are frozen; additions go to new files, not
/// new columns.
struct MetricsRow {
    long step = 0;
    double time = 0.0;
    double radius = 0.0;
    double area = 0.0;
    double volume = 0.0;
    double energy_total = 0.0;
    double energy_bilaplacian = 0.0;
    double energy_gradient = 0.0;
    double energy_well = 0.0;
    double max_abs_phi = 0.0;
    double band_mean_k_s = 0.0;
};

/// First line of every metrics CSV.
extern const char* const kMetricsSchema;

/// Schema line, header line, then one row per record, doubles printed with
/// %.17g so reruns are byte-identical.
void write_metrics_csv(const std::vector<MetricsRow>& rows, std::ostream& out);
void write_metrics_csv(const std::vector<MetricsRow>& rows,
                       const std::string& path);

struct SnapshotMeta {
    long step = 0;
    double time = 0.0;
    ModelKind model = ModelKind::Balanced;
    double width = 0.0;
};

struct Snapshot {
    Field field;
    SnapshotMeta meta;
};

/// Snapshot format: a text header (magic line, dims, spacing, boundary,
/// step, time, model, width, payload_bytes) followed by the node values as
/// little-endian float64, x fastest. Write/read round-trips bit for bit.
void write_snapshot(const Field& f, const SnapshotMeta& meta,
                    std::ostream& out);
void write_snapshot(const Field& f, const SnapshotMeta& meta,
                    const std::string& path);
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::string& path);

}  // namespace balfield
