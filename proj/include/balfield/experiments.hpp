#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "balfield/io.hpp"

namespace balfield {

/// One checked claim of an experiment run. `value` is the measurement,
/// `bound` the limit it was held against (semantics named by `name`).
struct Verdict {
    std::string name;
    bool pass = true;
    double value = 0.0;
    double bound = 0.0;
    std::string note;
};

struct ExperimentResult {
    std::vector<Verdict> verdicts;
    std::vector<std::string> report;     ///< free-form "key = value" lines
    std::vector<std::string> artifacts;  ///< files written under out_dir

    bool pass() const;
};

/// "PASS name value=... bound=..." per verdict, then the report lines.
void write_result(const ExperimentResult& result, std::ostream& out);

/// Width-matched Ginzburg-Landau run. Spheres are checked against the
/// curvature-flow radius law R(t)^2 = R(0)^2 - 2 (dim-1) t within 10%
/// relative while the predicted radius stays above half the initial one; a
/// vanished surface ends the run and is reported with its time. Planes are
/// checked for zero-crossing drift instead. The energy trace must never
/// increase.
ExperimentResult run_gl_shrink(const ExperimentConfig& cfg);

/// Balanced run over the same duration the matched GL run would get.
/// Spheres must return to their initial crossing radius within 0.25 h with
/// max|phi| bounded by 1.5 throughout. The torus variant measures the
/// equatorial drift along a ray through the center and holds its sign and
/// magnitude against the closed-form zero-set speed (sign exact, magnitude
/// within a factor of 2).
ExperimentResult run_balanced_stasis(const ExperimentConfig& cfg);

/// Reinitialization recovery: a hard sign step on a plane through the grid
/// center, pulled back by n = 10 descent steps, must land within RMS 0.05
/// of the 1-D relaxed profile aligned at the recovered crossing, moving the
/// crossing at most 0.05 h. Feeding the recovered field through another
/// n = 10 must change it by at most RMS 0.01 and 0.01 h of crossing motion.
/// Single-step recovery and a width-6 variant are reported without gates.
ExperimentResult run_profile_recovery(const ExperimentConfig& cfg);

/// Reinitialization cost/quality table over n in {1, 10} for an ansatz
/// sphere and a hard-step plane: crossing motion, profile RMS, and the
/// simulated time n dt each call spends.
ExperimentResult run_reinit_bench(const ExperimentConfig& cfg);

/// Closed-form cross-checks, written as a CSV bundle: balance residuals
/// over a width sweep, profile energy vs quadrature, the sphere metric
/// factor column, the energy-term decomposition on the sphere and torus,
/// the torus elastica gap, the double-well band integral, and the relaxed
/// vs cubic profile gap.
ExperimentResult run_oracle_report(const ExperimentConfig& cfg);

/// GL and balanced runs from one shared initial sphere, stacked into a
/// single trajectory CSV plus a JSON summary of final radii, drift rates,
/// and energy slopes. Geometry columns of the two initial rows must agree
/// bit for bit.
ExperimentResult compare_models(const ExperimentConfig& cfg);

/// Dispatch on cfg.experiment; writes metrics/verdicts/report artifacts
/// under cfg.out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace balfield
