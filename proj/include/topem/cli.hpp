#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "topem/optimize.hpp"
#include "topem/problem.hpp"

namespace topem::cli {

enum class OptimizerKind { gradient, ga };

/// Everything one invocation needs: the physics problem, the working
/// projection, and both optimizer configurations.
struct RunConfig {
    std::string name = "custom";
    ProblemSpec problem;
    ProjectionSpec projection{5.0, 0.5};
    GradientConfig gradient;
    GAConfig ga;
    OptimizerKind optimizer = OptimizerKind::gradient;
    bool continuation = false;
    double dVini = 0.5;
    std::vector<double> dViniVector;  ///< optional per-variable initial guess
    std::vector<double> sweepRadii;   ///< non-empty for the filter-sweep preset
};

/// Built-in presets: metalens, filter-sweep, reflector, lens1d, ga-compare.
/// Throws std::invalid_argument for unknown names.
RunConfig preset(const std::string& name);

/// Flat key=value config file, '#' comments. Strip parameters generate the
/// design-index list.
RunConfig load_config(const std::string& path);

/// Mesh-refinement scaling: multiplies nElX, nElY, lambda, fR (and the strip
/// and target indices) by an integer factor and divides scale by it.
void apply_resolution_factor(RunConfig& cfg, int factor);

/// NA = sin(arctan((nElX/2) / f)), f = elements from the strip's top row to
/// the target row. NaN when the target is not above a strip.
double compute_geometric_na(const ProblemSpec& spec);

struct RunSummary {
    double finalFOM = 0.0;      ///< working-beta FOM of the final design
    double binarizedFOM = 0.0;  ///< beta=1000 evaluation
    double emptyDomainFOM = 0.0;
    double mnd = 0.0;  ///< measure of non-discreteness of the binarized design
    double naGeometric = 0.0;
    double fluxDiagnostic = 0.0;
    long forwardSolves = 0;
    long adjointSolves = 0;
    double wallSeconds = 0.0;
    std::vector<std::string> files;  ///< manifest of written artifacts
    Eigen::VectorXd dVs;
    RunHistory history;
};

/// Executes one optimization run and writes design.pgm, field.pgm, field.csv,
/// history.csv and summary.txt into outDir. `suffix` is appended to artifact
/// stems (used by the filter sweep). Per-iteration "FOM: <value>" lines go to
/// `log`.
RunSummary execute(const RunConfig& cfg, const std::string& outDir, std::ostream& log,
                   const std::string& suffix = "");

/// Full command-line entry point. Returns the process exit status:
/// 0 success, 2 configuration error, 3 solver failure.
int run(int argc, const char* const* argv);

// Artifact writers, exposed for tests.
void write_pgm(const std::string& path, const Eigen::ArrayXXd& values01);
void write_history_csv(const std::string& path, const RunHistory& history);

}  // namespace topem::cli
