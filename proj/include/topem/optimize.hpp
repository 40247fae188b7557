#pragma once

#include <functional>
#include <optional>

#include "topem/objective.hpp"

namespace topem {

struct ContinuationSchedule {
    double betaStart = 5.0;
    double betaMax = 20.0;
    double betaInc = 1.5;  ///< multiplicative, > 1
};

struct GradientConfig {
    int maxItr = 200;
    int memory = 8;       ///< quasi-Newton history length
    double ftol = 1e-6;   ///< relative FOM-change stop, over 5 consecutive iterations
    std::optional<ContinuationSchedule> continuation;
};

struct GAConfig {
    int populationSize = 200;
    int generations = 500;
    double crossoverRate = 0.8;
    double mutationSigma = 0.1;
    int eliteCount = 2;
    int tournamentSize = 3;
    unsigned seed = 1;
    double projectionBeta = 1e5;  ///< near-binary projection during GA evaluation
    int stallGenerations = 50;    ///< stop when best improves < stallTol this long
    double stallTol = 1e-6;
};

struct IterationRecord {
    int iteration = 0;
    double fom = 0.0;
    long forwardSolves = 0;
    long adjointSolves = 0;
    double beta = 0.0;
    double seconds = 0.0;
};

struct RunHistory {
    std::vector<IterationRecord> records;
};

struct OptResult {
    Eigen::VectorXd dVs;
    RunHistory history;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Maximizes Phi over [0,1]^N with a projected limited-memory quasi-Newton
/// method (gradient projection with L-BFGS curvature on the free variables).
/// Stops at maxItr, at a hard evaluation cap of 4*maxItr, or when the
/// relative FOM change stays below ftol for 5 consecutive iterations.
OptResult optimize_gradient(Evaluator& evaluator, const GradientConfig& cfg,
                            const ProjectionSpec& projection, Eigen::VectorXd dVini,
                            const IterationCallback& onIteration = {});

/// Repeats optimize_gradient with beta multiplied by betaInc after each inner
/// run until beta >= betaMax, warm-starting from the previous design.
OptResult run_continuation(Evaluator& evaluator, const GradientConfig& cfg,
                           const ProjectionSpec& projection, Eigen::VectorXd dVini,
                           const IterationCallback& onIteration = {});

/// Generational real-coded GA baseline: tournament selection, uniform
/// crossover, Gaussian mutation clipped to [0,1], elitism. Evaluations use
/// the near-binary projection and never compute gradients. Fully
/// reproducible for a fixed seed.
OptResult optimize_ga(Evaluator& evaluator, const GAConfig& cfg, const Eigen::VectorXd& dVini,
                      const IterationCallback& onIteration = {});

// Generic cores, exposed for direct testing against scalar oracles.

/// Minimizes f over the box [lb,ub]^N. grad may be null only if the caller
/// never requests it; here it is always requested.
struct BoxMinResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    long evaluations = 0;
    double projectedGradientNorm = 0.0;
};

using BoxObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd& grad)>;

struct BoxMinOptions {
    int maxIter = 200;
    int memory = 8;
    double ftol = 1e-6;
    int ftolWindow = 5;
    double gtol = 1e-9;
    long maxEvaluations = 0;  ///< 0 means 4*maxIter
};

BoxMinResult minimize_projected_lbfgs(
    const BoxObjective& f, Eigen::VectorXd x0, double lb, double ub, const BoxMinOptions& opt,
    const std::function<void(int iter, double fval, const Eigen::VectorXd& x)>& onAccept = {});

}  // namespace topem
