#pragma once

#include <vector>

#include "topem/fem.hpp"
#include "topem/filtering.hpp"
#include "topem/problem.hpp"

namespace topem {

/// Result of one forward (and optionally adjoint) pass.
struct Evaluation {
    double fom = 0.0;           ///< Phi = sum over target nodes of |Ez|^2 / 4
    Eigen::VectorXcd ez;        ///< nodal complex field
    Eigen::VectorXcd adjoint;   ///< adjoint vector (empty without gradient)
    Eigen::VectorXd sensFOM;    ///< dPhi/dxi over design variables (empty without gradient)
    Eigen::ArrayXXd projected;  ///< physical field after filter + threshold
    Eigen::ArrayXXd filtered;   ///< field after the density filter
};

/// Forward + adjoint pipeline for a fixed problem. Grid index sets, element
/// matrices, the filter, the boundary terms and the factorization pattern are
/// set up once and reused across evaluations.
class Evaluator {
public:
    explicit Evaluator(const ProblemSpec& problem);

    Evaluation evaluate(const Eigen::VectorXd& dVs, const ProjectionSpec& projection,
                        bool withGradient);

    /// evaluate() at beta = 1000 without gradient; the physical merit of a
    /// final design.
    Evaluation binarized_evaluate(const Eigen::VectorXd& dVs, double eta = 0.5,
                                  double beta = 1000.0);

    const ProblemSpec& problem() const { return prob_; }
    const IndexSets& indexSets() const { return idx_; }
    const SolveStats& stats() const { return stats_; }

private:
    ProblemSpec prob_;
    IndexSets idx_;
    ElementMatrices em_;
    FilterSpec filter_;
    std::vector<TripletC> boundaryTriplets_;
    Eigen::VectorXcd rhs_;
    std::vector<int> targetNodes_;  // 0-based
    HelmholtzFactorization lu_{&stats_};
    SolveStats stats_;
};

/// One-shot convenience wrappers around Evaluator.
Evaluation evaluate(const Eigen::VectorXd& dVs, const ProblemSpec& problem,
                    const ProjectionSpec& projection, bool withGradient);
Eigen::VectorXd adjoint_gradient(const Eigen::VectorXd& dVs, const ProblemSpec& problem,
                                 const ProjectionSpec& projection);
Evaluation binarized_evaluate(const Eigen::VectorXd& dVs, const ProblemSpec& problem);

/// Phi for a given nodal field: sum of |ez|^2/4 over the 4 target nodes.
double selection_fom(const Eigen::VectorXcd& ez, const std::vector<int>& targetNodes);

/// Measure of non-discreteness over the design elements:
/// sum 4*xi*(1-xi) / N_D, 0 for a pure black/white design.
double nondiscreteness(const Eigen::ArrayXXd& projected, const GridSpec& grid);

/// Diagnostic power-flux ratio through a horizontal node line one element
/// above the design strip, relative to the same flux in the empty domain.
/// Reported only; the integration line is a convention, not a contract.
double transmission_flux(const Evaluation& eval, const Evaluation& emptyDomain,
                         const ProblemSpec& problem);

}  // namespace topem
