#include "balfield/io.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace balfield {

namespace {

[[noreturn]] void bad(const std::string& origin, int line,
                      const std::string& what) {
    throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " +
                                what);
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct RawEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

double to_double(const std::string& origin, const RawEntry& e) {
    try {
        std::size_t pos = 0;
        double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument(e.value);
        return v;
    } catch (const std::exception&) {
        bad(origin, e.line, "expected a number, got '" + e.value + "'");
    }
}

long to_long(const std::string& origin, const RawEntry& e) {
    try {
        std::size_t pos = 0;
        long v = std::stol(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument(e.value);
        return v;
    } catch (const std::exception&) {
        bad(origin, e.line, "expected an integer, got '" + e.value + "'");
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void put_le64(std::ostream& out, double x) {
    auto u = std::bit_cast<std::uint64_t>(x);
    char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
    out.write(b, 8);
}

double get_le64(std::istream& in) {
    char b[8];
    in.read(b, 8);
    if (!in) throw std::runtime_error("snapshot payload truncated");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i)
        u |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i]))
             << (8 * i);
    return std::bit_cast<double>(u);
}

const char* const kSnapshotMagic = "balance-field-snapshot-v1";

}  // namespace

const char* experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::GlShrink: return "gl-shrink";
        case ExperimentKind::BalancedStasis: return "balanced-stasis";
        case ExperimentKind::ProfileRecovery: return "profile-recovery";
        case ExperimentKind::ReinitBench: return "reinit-bench";
        case ExperimentKind::OracleReport: return "oracle-report";
        case ExperimentKind::Compare: return "compare";
    }
    throw std::logic_error("unhandled experiment kind");
}

ExperimentKind experiment_from_name(const std::string& name) {
    for (auto kind : {ExperimentKind::GlShrink, ExperimentKind::BalancedStasis,
                      ExperimentKind::ProfileRecovery,
                      ExperimentKind::ReinitBench, ExperimentKind::OracleReport,
                      ExperimentKind::Compare})
        if (name == experiment_name(kind)) return kind;
    throw std::invalid_argument("unknown experiment '" + name + "'");
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
    std::map<std::string, RawEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            bad(origin, lineno, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            bad(origin, lineno, "expected 'key = value'");
        if (entries.count(key))
            bad(origin, lineno, "duplicate key '" + key + "'");
        entries[key] = {value, lineno, false};
    }

    auto take = [&](const char* key) -> RawEntry* {
        auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    };

    ExperimentConfig cfg;
    if (auto* e = take("experiment")) {
        try {
            cfg.experiment = experiment_from_name(e->value);
        } catch (const std::invalid_argument& ex) {
            bad(origin, e->line, ex.what());
        }
    }

    int dim = 3;
    if (auto* e = take("dim")) {
        dim = static_cast<int>(to_long(origin, *e));
        if (dim != 2 && dim != 3) bad(origin, e->line, "dim must be 2 or 3");
    }
    int nx = 64, ny = 64, nz = 64;
    if (auto* e = take("nx")) nx = static_cast<int>(to_long(origin, *e));
    if (auto* e = take("ny")) ny = static_cast<int>(to_long(origin, *e));
    if (auto* e = take("nz")) nz = static_cast<int>(to_long(origin, *e));
    double h = 1.0;
    if (auto* e = take("h")) h = to_double(origin, *e);
    Boundary boundary = Boundary::MirrorNeumann;
    if (auto* e = take("boundary")) {
        if (e->value == "mirror") boundary = Boundary::MirrorNeumann;
        else if (e->value == "periodic") boundary = Boundary::Periodic;
        else bad(origin, e->line, "boundary must be mirror or periodic");
    }
    try {
        cfg.grid = dim == 2 ? GridSpec::make2d(nx, ny, h, boundary)
                            : GridSpec::make3d(nx, ny, nz, h, boundary);
    } catch (const std::invalid_argument& ex) {
        throw std::invalid_argument(origin + ": " + ex.what());
    }

    std::string shape = "sphere";
    int shape_line = 0;
    if (auto* e = take("shape")) {
        shape = e->value;
        shape_line = e->line;
    }
    if (shape == "sphere") {
        double radius = 16.0;
        if (auto* e = take("radius")) radius = to_double(origin, *e);
        cfg.shape = AnalyticSphere{radius};
    } else if (shape == "torus") {
        double major = 18.0, minor = 6.0;
        if (auto* e = take("major_radius")) major = to_double(origin, *e);
        if (auto* e = take("minor_radius")) minor = to_double(origin, *e);
        cfg.shape = AnalyticTorus{major, minor};
    } else if (shape == "plane") {
        cfg.shape = AnalyticPlane{};
        if (auto* e = take("axis")) {
            cfg.plane_axis = static_cast<int>(to_long(origin, *e));
            if (cfg.plane_axis < 0 || cfg.plane_axis >= dim)
                bad(origin, e->line, "axis out of range for grid dim");
        }
        if (auto* e = take("offset")) cfg.plane_offset = to_double(origin, *e);
    } else {
        bad(origin, shape_line, "shape must be sphere, torus, or plane");
    }

    if (auto* e = take("width")) {
        cfg.width = to_double(origin, *e);
        if (!(cfg.width > 0)) bad(origin, e->line, "width must be positive");
    }
    if (auto* e = take("duration")) {
        cfg.duration = to_double(origin, *e);
        if (!(*cfg.duration > 0))
            bad(origin, e->line, "duration must be positive");
    }
    if (auto* e = take("steps")) {
        cfg.steps = to_long(origin, *e);
        if (*cfg.steps <= 0) bad(origin, e->line, "steps must be positive");
    }
    if (cfg.duration && cfg.steps)
        throw std::invalid_argument(origin +
                                    ": give duration or steps, not both");
    if (auto* e = take("dt")) {
        cfg.dt = to_double(origin, *e);
        if (!(*cfg.dt > 0)) bad(origin, e->line, "dt must be positive");
    }
    if (auto* e = take("out")) cfg.out_dir = e->value;
    if (auto* e = take("record_every")) {
        cfg.record_every = static_cast<int>(to_long(origin, *e));
        if (cfg.record_every <= 0)
            bad(origin, e->line, "record_every must be positive");
    }
    if (auto* e = take("snapshots")) {
        cfg.snapshot_every = static_cast<int>(to_long(origin, *e));
        if (cfg.snapshot_every < 0)
            bad(origin, e->line, "snapshots must be >= 0");
    }
    if (auto* e = take("seed"))
        cfg.seed = static_cast<unsigned long>(to_long(origin, *e));

    for (const auto& [key, entry] : entries)
        if (!entry.used) bad(origin, entry.line, "unknown key '" + key + "'");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
    return parse_config(in, path);
}

const char* const kMetricsSchema = "# schema=balance-field-metrics-v1";

void write_metrics_csv(const std::vector<MetricsRow>& rows,
                       std::ostream& out) {
    out << kMetricsSchema << '\n'
        << "step,time,radius,area,volume,energy_total,energy_bilaplacian,"
           "energy_gradient,energy_well,max_abs_phi,band_mean_k_s\n";
    for (const auto& r : rows) {
        out << r.step << ',' << fmt(r.time) << ',' << fmt(r.radius) << ','
            << fmt(r.area) << ',' << fmt(r.volume) << ','
            << fmt(r.energy_total) << ',' << fmt(r.energy_bilaplacian) << ','
            << fmt(r.energy_gradient) << ',' << fmt(r.energy_well) << ','
            << fmt(r.max_abs_phi) << ',' << fmt(r.band_mean_k_s) << '\n';
    }
}

void write_metrics_csv(const std::vector<MetricsRow>& rows,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_metrics_csv(rows, out);
}

void write_snapshot(const Field& f, const SnapshotMeta& meta,
                    std::ostream& out) {
    const GridSpec& g = f.grid;
    out << kSnapshotMagic << '\n'
        << "dims = " << g.nx << ' ' << g.ny << ' ' << g.nz << '\n'
        << "dim = " << g.dim << '\n'
        << "spacing = " << fmt(g.h) << '\n'
        << "boundary = "
        << (g.boundary == Boundary::MirrorNeumann ? "mirror" : "periodic")
        << '\n'
        << "step = " << meta.step << '\n'
        << "time = " << fmt(meta.time) << '\n'
        << "model = "
        << (meta.model == ModelKind::Balanced ? "balanced" : "gl") << '\n'
        << "width = " << fmt(meta.width) << '\n'
        << "payload_bytes = " << f.v.size() * 8 << '\n';
    for (double x : f.v) put_le64(out, x);
}

void write_snapshot(const Field& f, const SnapshotMeta& meta,
                    const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_snapshot(f, meta, out);
}

Snapshot read_snapshot(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kSnapshotMagic)
        throw std::runtime_error("not a snapshot stream");

    std::map<std::string, std::string> header;
    for (int i = 0; i < 9; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("snapshot header truncated");
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("bad snapshot header line: " + line);
        header[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto get = [&](const char* key) -> const std::string& {
        auto it = header.find(key);
        if (it == header.end())
            throw std::runtime_error(std::string("snapshot header missing ") +
                                     key);
        return it->second;
    };

    int nx, ny, nz;
    {
        std::istringstream dims(get("dims"));
        if (!(dims >> nx >> ny >> nz))
            throw std::runtime_error("bad snapshot dims");
    }
    int dim = std::stoi(get("dim"));
    double h = std::stod(get("spacing"));
    Boundary boundary = get("boundary") == "periodic" ? Boundary::Periodic
                                                      : Boundary::MirrorNeumann;
    GridSpec grid = dim == 2 ? GridSpec::make2d(nx, ny, h, boundary)
                             : GridSpec::make3d(nx, ny, nz, h, boundary);

    Snapshot snap;
    snap.field = Field(grid);
    snap.meta.step = std::stol(get("step"));
    snap.meta.time = std::stod(get("time"));
    snap.meta.model = get("model") == "gl" ? ModelKind::GinzburgLandau
                                           : ModelKind::Balanced;
    snap.meta.width = std::stod(get("width"));

    std::size_t payload = std::stoull(get("payload_bytes"));
    if (payload != snap.field.v.size() * 8)
        throw std::runtime_error("snapshot payload size mismatch");
    for (double& x : snap.field.v) x = get_le64(in);
    return snap;
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
    return read_snapshot(in);
}

}  // namespace balfield
